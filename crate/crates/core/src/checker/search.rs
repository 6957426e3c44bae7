//! Strategic evaluation as an AND-OR search over the histories from the
//! pivot. A node is a history together with every live path (prefix,
//! compatible capacities, temporal monitor) that follows it; the coalition's
//! choice at a node applies to all of them at once. Each node yields the set
//! of outcome classes its subtree can be steered into.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use super::trees::{agrees, coalition_choices, successors};
use super::Verdict;
use crate::formula::{CapFormula, Coalition, PathFormula, TemporalFormula};
use crate::model::{AgentId, GameStructure, JointAction, StateId};
use crate::trace::{Compat, Path, StrategyTree};

// Outcome classes, ordered so that a set of outcomes takes the maximum.
const EMPTY: u8 = 0;
const WIN: u8 = 1;
const OPEN: u8 = 2;
const FAIL: u8 = 3;

fn bit(class: u8) -> u8 {
    1 << class
}

fn class_of(v: Verdict) -> u8 {
    match v {
        Verdict::True => WIN,
        Verdict::Unknown => OPEN,
        Verdict::False => FAIL,
    }
}

/// `{max(a, b) | a ∈ x, b ∈ y}`
fn max_combine(x: u8, y: u8) -> u8 {
    let mut out = 0;
    for a in 0..4 {
        if x & bit(a) == 0 {
            continue;
        }
        for b in 0..4 {
            if y & bit(b) != 0 {
                out |= bit(a.max(b));
            }
        }
    }
    out
}

fn verdict_of(set: u8) -> Verdict {
    if set & bit(WIN) != 0 {
        Verdict::True
    } else if set & bit(OPEN) == 0 {
        Verdict::False
    } else {
        Verdict::Unknown
    }
}

/// Incremental bounded evaluation of a temporal formula along one path.
/// Release runs as an Until over negated operands with a negated result.
#[derive(Clone, Copy, Debug)]
pub(crate) enum Monitor {
    Next(Option<Verdict>),
    Until {
        acc: Verdict,
        prefix: Verdict,
        negate: bool,
    },
}

impl Monitor {
    fn new(t: &TemporalFormula) -> Self {
        match t {
            TemporalFormula::Next(_) => Monitor::Next(None),
            TemporalFormula::Until(..) => Monitor::Until {
                acc: Verdict::False,
                prefix: Verdict::True,
                negate: false,
            },
            TemporalFormula::Release(..) => Monitor::Until {
                acc: Verdict::False,
                prefix: Verdict::True,
                negate: true,
            },
        }
    }

    fn decided(&self) -> bool {
        match *self {
            Monitor::Next(v) => v.is_some(),
            Monitor::Until { acc, prefix, .. } => acc == Verdict::True || prefix == Verdict::False,
        }
    }

    /// The verdict if the path stops here.
    fn finish(&self) -> Verdict {
        match *self {
            Monitor::Next(v) => v.unwrap_or(Verdict::Unknown),
            Monitor::Until {
                acc,
                prefix,
                negate,
            } => {
                let v = acc | (prefix & Verdict::Unknown);
                if negate {
                    !v
                } else {
                    v
                }
            }
        }
    }
}

struct Live {
    path: Path,
    compat: Compat,
    monitor: Monitor,
}

pub(crate) struct Evaluator<'g> {
    g: &'g GameStructure,
    k: usize,
    joints: Vec<Vec<JointAction>>,
    cache: HashMap<(usize, Path), Verdict>,
}

impl<'g> Evaluator<'g> {
    pub(crate) fn new(g: &'g GameStructure, k: usize) -> Self {
        Evaluator {
            g,
            k,
            joints: g
                .states()
                .map(|q| g.joint_actions(q).expect("valid state"))
                .collect(),
            cache: HashMap::new(),
        }
    }

    /// Value of `f` at the last position of `path`. Only the prefix up to the
    /// evaluation point matters, so paths are always cut there.
    pub(crate) fn eval(&mut self, f: &PathFormula, path: &Path) -> Verdict {
        match f {
            PathFormula::Atom(p) => self.g.has_label(path.last(), *p).into(),
            PathFormula::Not(x) => !self.eval(x, path),
            PathFormula::And(l, r) => {
                let lv = self.eval(l, path);
                if lv == Verdict::False {
                    return lv;
                }
                lv & self.eval(r, path)
            }
            PathFormula::Know(a, phi) => {
                let key = (f as *const PathFormula as usize, path.clone());
                if let Some(v) = self.cache.get(&key) {
                    return *v;
                }
                let v = self.knows(path, *a, phi).into();
                self.cache.insert(key, v);
                v
            }
            PathFormula::Strat(y, t) => {
                let key = (f as *const PathFormula as usize, path.clone());
                if let Some(v) = self.cache.get(&key) {
                    return *v;
                }
                let v = self.strategic(y, t, path);
                self.cache.insert(key, v);
                v
            }
        }
    }

    /// Forward closure of the compatible-capacity sets over the paths `a`
    /// cannot tell apart from `path`.
    pub(crate) fn knows(&self, path: &Path, a: AgentId, phi: &CapFormula) -> bool {
        let g = self.g;
        let mut frontier: BTreeSet<Compat> = BTreeSet::from([Compat::full(g)]);
        for (t, own) in path.actions().iter().enumerate() {
            let q = path.states()[t];
            let next = path.states()[t + 1];
            let own = own.get(a);
            let mut out = BTreeSet::new();
            for joint in &self.joints[q.index()] {
                if joint.get(a) != own || g.transition(q, joint) != Some(next) {
                    continue;
                }
                for c in &frontier {
                    let c2 = c.step(g, joint);
                    if !c2.is_empty() {
                        out.insert(c2);
                    }
                }
            }
            frontier = out;
        }
        let holds = frontier
            .iter()
            .flat_map(|c| c.assignments(g))
            .all(|lambda| super::eval_cap_formula(&lambda, phi));
        holds
    }

    fn observe(&mut self, monitor: &mut Monitor, t: &TemporalFormula, path: &Path, at_pivot: bool) {
        match (monitor, t) {
            (Monitor::Next(v), TemporalFormula::Next(f)) => {
                if !at_pivot && v.is_none() {
                    *v = Some(self.eval(f, path));
                }
            }
            (
                Monitor::Until {
                    acc,
                    prefix,
                    negate,
                },
                TemporalFormula::Until(l, r) | TemporalFormula::Release(l, r),
            ) => {
                if *acc == Verdict::True || *prefix == Verdict::False {
                    return;
                }
                let flip = |v: Verdict| if *negate { !v } else { v };
                let right = flip(self.eval(r, path));
                *acc = *acc | (*prefix & right);
                if *acc != Verdict::True {
                    *prefix = *prefix & flip(self.eval(l, path));
                }
            }
            _ => unreachable!("monitor built for another operator"),
        }
    }

    /// Bounded value of `t` along `outcome`, starting at position `start`
    /// (number of states up to the pivot).
    pub(crate) fn temporal(&mut self, t: &TemporalFormula, outcome: &Path, start: usize) -> Verdict {
        let mut m = Monitor::new(t);
        self.observe(&mut m, t, &outcome.prefix(start), true);
        for n in start + 1..=outcome.len() {
            if m.decided() {
                break;
            }
            self.observe(&mut m, t, &outcome.prefix(n), false);
        }
        m.finish()
    }

    fn root(&mut self, t: &TemporalFormula, path: &Path) -> Option<Live> {
        let compat = Compat::of_path(self.g, path);
        if compat.is_empty() {
            return None;
        }
        let mut monitor = Monitor::new(t);
        self.observe(&mut monitor, t, path, true);
        Some(Live {
            path: path.clone(),
            compat,
            monitor,
        })
    }

    fn classes(
        &mut self,
        y: &Coalition,
        t: &TemporalFormula,
        path: &Path,
        fixed: &HashMap<Vec<StateId>, usize>,
    ) -> u8 {
        match self.root(t, path) {
            None => bit(EMPTY),
            Some(live) => {
                let mut history = vec![path.last()];
                self.search(y.agents(), t, vec![live], &mut history, self.k, fixed)
            }
        }
    }

    pub(crate) fn strategic(&mut self, y: &Coalition, t: &TemporalFormula, path: &Path) -> Verdict {
        verdict_of(self.classes(y, t, path, &HashMap::new()))
    }

    fn search(
        &mut self,
        agents: &[AgentId],
        t: &TemporalFormula,
        lives: Vec<Live>,
        history: &mut Vec<StateId>,
        remaining: usize,
        fixed: &HashMap<Vec<StateId>, usize>,
    ) -> u8 {
        if remaining == 0 {
            let worst = lives
                .iter()
                .map(|l| class_of(l.monitor.finish()))
                .max()
                .unwrap_or(EMPTY);
            return bit(worst);
        }
        let g = self.g;
        let q = *history.last().expect("nonempty");
        let choices = coalition_choices(g, q, agents);
        let picked: Vec<usize> = match fixed.get(history.as_slice()) {
            Some(c) => vec![*c],
            None => (0..choices.len()).collect(),
        };
        let mut result = 0;
        for c in picked {
            let choice = &choices[c];
            let mut children: BTreeMap<StateId, Vec<Live>> = BTreeMap::new();
            for joint in self.joints[q.index()].clone() {
                if !agrees(agents, choice, &joint) {
                    continue;
                }
                let Some(next) = g.transition(q, &joint) else {
                    continue;
                };
                for live in &lives {
                    let compat = live.compat.step(g, &joint);
                    if compat.is_empty() {
                        continue;
                    }
                    let path = live.path.extended(joint.clone(), next);
                    let mut monitor = live.monitor;
                    if !monitor.decided() {
                        self.observe(&mut monitor, t, &path, false);
                    }
                    children.entry(next).or_default().push(Live {
                        path,
                        compat,
                        monitor,
                    });
                }
            }
            let mut acc = bit(EMPTY);
            for (next, kids) in children {
                history.push(next);
                let sub = self.search(agents, t, kids, history, remaining - 1, fixed);
                history.pop();
                acc = max_combine(acc, sub);
            }
            result |= acc;
        }
        result
    }

    /// The first winning tree in enumeration order, if any: decisions are
    /// fixed breadth-first, each to the smallest choice that still admits a
    /// win.
    pub(crate) fn winning_tree(&mut self, y: &Coalition, t: &TemporalFormula, path: &Path) -> Option<StrategyTree> {
        let mut fixed = HashMap::new();
        if verdict_of(self.classes(y, t, path, &fixed)) != Verdict::True {
            return None;
        }
        let g = self.g;
        let pivot = path.last();
        let mut tree = StrategyTree::new(y.agents().iter().copied(), pivot, self.k);
        if y.is_empty() || self.k == 0 {
            return Some(tree);
        }
        let mut queue = VecDeque::from([vec![pivot]]);
        while let Some(history) = queue.pop_front() {
            let q = *history.last().expect("nonempty");
            let choices = coalition_choices(g, q, y.agents());
            let mut chosen = None;
            for c in 0..choices.len() {
                fixed.insert(history.clone(), c);
                if self.classes(y, t, path, &fixed) & bit(WIN) != 0 {
                    chosen = Some(c);
                    break;
                }
            }
            let c = chosen.expect("a winning completion exists");
            fixed.insert(history.clone(), c);
            if history.len() < self.k {
                for next in successors(g, q, y.agents(), &choices[c]) {
                    let mut h = history.clone();
                    h.push(next);
                    queue.push_back(h);
                }
            }
            tree.decide(history, choices[c].clone());
        }
        Some(tree)
    }
}
