use std::collections::BTreeSet;

use crate::model::{AgentId, CapacityId, PropId};

/// A set of agents, kept sorted.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Coalition(Vec<AgentId>);

impl Coalition {
    pub fn new(agents: impl IntoIterator<Item = AgentId>) -> Self {
        let set: BTreeSet<AgentId> = agents.into_iter().collect();
        Coalition(set.into_iter().collect())
    }

    pub fn empty() -> Self {
        Coalition(Vec::new())
    }

    pub fn agents(&self) -> &[AgentId] {
        &self.0
    }

    pub fn contains(&self, a: AgentId) -> bool {
        self.0.binary_search(&a).is_ok()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PathFormula {
    Atom(PropId),
    /// Agent knows a fact about the capacity assignment.
    Know(AgentId, CapFormula),
    Not(Box<PathFormula>),
    And(Box<PathFormula>, Box<PathFormula>),
    Strat(Coalition, Box<TemporalFormula>),
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TemporalFormula {
    Next(PathFormula),
    Until(PathFormula, PathFormula),
    Release(PathFormula, PathFormula),
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CapFormula {
    HasCap(AgentId, CapacityId),
    Not(Box<CapFormula>),
    And(Box<CapFormula>, Box<CapFormula>),
}

impl PathFormula {
    pub fn atom(p: PropId) -> Self {
        PathFormula::Atom(p)
    }

    pub fn truth() -> Self {
        PathFormula::Atom(PropId::TOP)
    }

    pub fn falsity() -> Self {
        PathFormula::not(PathFormula::truth())
    }

    pub fn know(a: AgentId, f: CapFormula) -> Self {
        PathFormula::Know(a, f)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: PathFormula) -> Self {
        PathFormula::Not(Box::new(f))
    }

    pub fn and(l: PathFormula, r: PathFormula) -> Self {
        PathFormula::And(Box::new(l), Box::new(r))
    }

    pub fn or(l: PathFormula, r: PathFormula) -> Self {
        PathFormula::not(PathFormula::and(PathFormula::not(l), PathFormula::not(r)))
    }

    pub fn implies(l: PathFormula, r: PathFormula) -> Self {
        PathFormula::not(PathFormula::and(l, PathFormula::not(r)))
    }

    pub fn strat(y: Coalition, t: TemporalFormula) -> Self {
        PathFormula::Strat(y, Box::new(t))
    }

    pub fn is_truth(&self) -> bool {
        matches!(self, PathFormula::Atom(p) if p.is_top())
    }

    pub fn is_falsity(&self) -> bool {
        matches!(self, PathFormula::Not(f) if f.is_truth())
    }

    /// Nesting depth counting path-formula constructors. A strategic operator
    /// together with its temporal operator is one level; the capacity formula
    /// under a knowledge operator is not counted.
    pub fn depth(&self) -> usize {
        match self {
            PathFormula::Atom(_) | PathFormula::Know(..) => 1,
            PathFormula::Not(f) => 1 + f.depth(),
            PathFormula::And(l, r) => 1 + l.depth().max(r.depth()),
            PathFormula::Strat(_, t) => {
                1 + match t.as_ref() {
                    TemporalFormula::Next(f) => f.depth(),
                    TemporalFormula::Until(l, r) | TemporalFormula::Release(l, r) => {
                        l.depth().max(r.depth())
                    }
                }
            }
        }
    }

    /// Whether the formula mentions a knowledge operator anywhere.
    pub fn has_knowledge(&self) -> bool {
        match self {
            PathFormula::Atom(_) => false,
            PathFormula::Know(..) => true,
            PathFormula::Not(f) => f.has_knowledge(),
            PathFormula::And(l, r) => l.has_knowledge() || r.has_knowledge(),
            PathFormula::Strat(_, t) => match t.as_ref() {
                TemporalFormula::Next(f) => f.has_knowledge(),
                TemporalFormula::Until(l, r) | TemporalFormula::Release(l, r) => {
                    l.has_knowledge() || r.has_knowledge()
                }
            },
        }
    }
}

impl TemporalFormula {
    /// `F f` = `true U f`
    pub fn eventually(f: PathFormula) -> Self {
        TemporalFormula::Until(PathFormula::truth(), f)
    }

    /// `G f` = `false R f`
    pub fn always(f: PathFormula) -> Self {
        TemporalFormula::Release(PathFormula::falsity(), f)
    }
}

impl CapFormula {
    pub fn has(a: AgentId, c: CapacityId) -> Self {
        CapFormula::HasCap(a, c)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: CapFormula) -> Self {
        CapFormula::Not(Box::new(f))
    }

    pub fn and(l: CapFormula, r: CapFormula) -> Self {
        CapFormula::And(Box::new(l), Box::new(r))
    }

    pub fn or(l: CapFormula, r: CapFormula) -> Self {
        CapFormula::not(CapFormula::and(CapFormula::not(l), CapFormula::not(r)))
    }
}
