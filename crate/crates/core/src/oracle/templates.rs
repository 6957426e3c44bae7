use crate::formula::{CapFormula, Coalition, PathFormula, TemporalFormula};
use crate::model::{GameStructure, PropId};

#[derive(Clone, Debug)]
enum Shape {
    Atom,
    Know,
    Not(Box<Shape>),
    And(Box<Shape>, Box<Shape>),
    Next(Box<Shape>),
    Until(Box<Shape>, Box<Shape>),
    Release(Box<Shape>, Box<Shape>),
}

/// Shapes by exact depth: `levels[d - 1]` holds those of depth `d`.
fn shapes(max_depth: usize) -> Vec<Vec<Shape>> {
    let mut levels: Vec<Vec<Shape>> = Vec::new();
    for d in 1..=max_depth {
        if d == 1 {
            levels.push(vec![Shape::Atom, Shape::Know]);
            continue;
        }
        let below: Vec<(usize, &Shape)> = levels
            .iter()
            .enumerate()
            .flat_map(|(i, l)| l.iter().map(move |s| (i + 1, s)))
            .collect();
        let mut here = Vec::new();
        for (_, s) in below.iter().filter(|(e, _)| *e == d - 1) {
            here.push(Shape::Not(Box::new((*s).clone())));
            here.push(Shape::Next(Box::new((*s).clone())));
        }
        for (dl, l) in &below {
            for (dr, r) in &below {
                if (*dl).max(*dr) != d - 1 {
                    continue;
                }
                let (l, r) = (Box::new((*l).clone()), Box::new((*r).clone()));
                here.push(Shape::And(l.clone(), r.clone()));
                here.push(Shape::Until(l.clone(), r.clone()));
                here.push(Shape::Release(l, r));
            }
        }
        levels.push(here);
    }
    levels
}

struct Filler {
    atoms: Vec<PathFormula>,
    knows: Vec<PathFormula>,
    coalitions: Vec<Coalition>,
    next_atom: usize,
    next_know: usize,
    next_coalition: usize,
}

impl Filler {
    fn new(g: &GameStructure) -> Self {
        let mut atoms: Vec<PathFormula> = g.props().map(PathFormula::atom).collect();
        if atoms.is_empty() {
            atoms.push(PathFormula::atom(PropId::TOP));
        }
        let mut knows = Vec::new();
        for a in g.agents() {
            for b in g.agents() {
                for c in g.capacities_of(b) {
                    knows.push(PathFormula::know(a, CapFormula::has(b, *c)));
                }
            }
        }
        let agents: Vec<_> = g.agents().collect();
        let mut coalitions: Vec<Coalition> = (0u32..1 << agents.len())
            .map(|mask| {
                Coalition::new(
                    agents
                        .iter()
                        .enumerate()
                        .filter(|(i, _)| mask & (1 << i) != 0)
                        .map(|(_, a)| *a),
                )
            })
            .collect();
        coalitions.sort_by_key(|c| (c.agents().len(), c.agents().to_vec()));
        Filler {
            atoms,
            knows,
            coalitions,
            next_atom: 0,
            next_know: 0,
            next_coalition: 0,
        }
    }

    fn take<T: Clone>(items: &[T], counter: &mut usize) -> T {
        let x = items[*counter % items.len()].clone();
        *counter += 1;
        x
    }

    fn fill(&mut self, s: &Shape) -> PathFormula {
        match s {
            Shape::Atom => Self::take(&self.atoms, &mut self.next_atom),
            Shape::Know => {
                if self.knows.is_empty() {
                    return Self::take(&self.atoms, &mut self.next_atom);
                }
                Self::take(&self.knows, &mut self.next_know)
            }
            Shape::Not(x) => PathFormula::not(self.fill(x)),
            Shape::And(l, r) => {
                let l = self.fill(l);
                PathFormula::and(l, self.fill(r))
            }
            Shape::Next(x) => {
                let y = Self::take(&self.coalitions, &mut self.next_coalition);
                PathFormula::strat(y, TemporalFormula::Next(self.fill(x)))
            }
            Shape::Until(l, r) => {
                let y = Self::take(&self.coalitions, &mut self.next_coalition);
                let l = self.fill(l);
                PathFormula::strat(y, TemporalFormula::Until(l, self.fill(r)))
            }
            Shape::Release(l, r) => {
                let y = Self::take(&self.coalitions, &mut self.next_coalition);
                let l = self.fill(l);
                PathFormula::strat(y, TemporalFormula::Release(l, self.fill(r)))
            }
        }
    }
}

/// One formula per syntax-tree shape of depth at most `max_depth`. Leaves,
/// knowledge operators and coalitions are filled round-robin from the game's
/// propositions, `K[a](b=c)` instances and agent subsets, with the counters
/// running on across shapes so that consecutive shapes get different names.
pub fn formula_templates(g: &GameStructure, max_depth: usize) -> Vec<PathFormula> {
    let mut filler = Filler::new(g);
    shapes(max_depth)
        .iter()
        .flatten()
        .map(|s| filler.fill(s))
        .collect()
}

/// Templates without knowledge operators, for structures without hidden
/// capacities.
pub fn knowledge_free_templates(g: &GameStructure, max_depth: usize) -> Vec<PathFormula> {
    formula_templates(g, max_depth)
        .into_iter()
        .filter(|f| !f.has_knowledge())
        .collect()
}
