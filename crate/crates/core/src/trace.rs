//! Paths, histories, capacity compatibility, indistinguishability and bounded
//! outcomes.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use itertools::Itertools;
use thiserror::Error;

use crate::model::{ActionId, AgentId, CapacityId, GameStructure, JointAction, StateId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TraceError {
    #[error("a path needs one more state than joint actions (got {states} states, {actions} actions)")]
    Shape { states: usize, actions: usize },
    #[error("paths have different lengths ({0} vs {1} states)")]
    LengthMismatch(usize, usize),
    #[error("strategy pivot {pivot} does not match the last state {last} of the path")]
    PivotMismatch { pivot: usize, last: usize },
    #[error("strategy depth {depth} is smaller than the horizon {horizon}")]
    InsufficientDepth { depth: usize, horizon: usize },
    #[error("strategy gives no decision for a reachable history of length {0}")]
    Undecided(usize),
    #[error("strategy prescribes an action outside the protocol")]
    OutsideProtocol,
    #[error("strategy history does not start at the pivot")]
    ForeignHistory,
}

/// A finite path `q1 α1 q2 … qn`: states and joint actions alternate and the
/// path ends with a state.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Path {
    states: Vec<StateId>,
    actions: Vec<JointAction>,
}

impl Path {
    pub fn new(start: StateId) -> Self {
        Path {
            states: vec![start],
            actions: Vec::new(),
        }
    }

    pub fn from_parts(states: Vec<StateId>, actions: Vec<JointAction>) -> Result<Self, TraceError> {
        if states.is_empty() || states.len() != actions.len() + 1 {
            return Err(TraceError::Shape {
                states: states.len(),
                actions: actions.len(),
            });
        }
        Ok(Path { states, actions })
    }

    pub fn push(&mut self, joint: JointAction, next: StateId) {
        self.actions.push(joint);
        self.states.push(next);
    }

    pub fn extended(&self, joint: JointAction, next: StateId) -> Path {
        let mut p = self.clone();
        p.push(joint, next);
        p
    }

    pub fn pop(&mut self) -> Option<(JointAction, StateId)> {
        if self.actions.is_empty() {
            return None;
        }
        let q = self.states.pop().expect("nonempty");
        let j = self.actions.pop().expect("nonempty");
        Some((j, q))
    }

    /// Number of states.
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Number of joint actions.
    pub fn steps(&self) -> usize {
        self.actions.len()
    }

    pub fn first(&self) -> StateId {
        self.states[0]
    }

    pub fn last(&self) -> StateId {
        *self.states.last().expect("paths are nonempty")
    }

    /// The state trace.
    pub fn states(&self) -> &[StateId] {
        &self.states
    }

    /// The action trace.
    pub fn actions(&self) -> &[JointAction] {
        &self.actions
    }

    /// The prefix with `n` states (`1 ≤ n ≤ len`).
    pub fn prefix(&self, n: usize) -> Path {
        assert!(n >= 1 && n <= self.len(), "prefix length out of range");
        Path {
            states: self.states[..n].to_vec(),
            actions: self.actions[..n - 1].to_vec(),
        }
    }

    pub fn state_trace(&self) -> History {
        History(self.states.clone())
    }

    pub fn action_trace(&self) -> Vec<JointAction> {
        self.actions.clone()
    }

    pub fn display<'a>(&'a self, g: &'a GameStructure) -> PathDisplay<'a> {
        PathDisplay { path: self, g }
    }
}

pub struct PathDisplay<'a> {
    path: &'a Path,
    g: &'a GameStructure,
}

impl fmt::Display for PathDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.g.state_name(self.path.states[0]))?;
        for (j, q) in self.path.actions.iter().zip(&self.path.states[1..]) {
            write!(
                f,
                " {} {}",
                self.g.joint_action_string(j),
                self.g.state_name(*q)
            )?;
        }
        Ok(())
    }
}

/// A finite state trace.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct History(pub Vec<StateId>);

impl History {
    pub fn last(&self) -> StateId {
        *self.0.last().expect("histories are nonempty")
    }
}

/// Checks that every step is available and follows the transition function.
pub fn validate_path(g: &GameStructure, path: &Path) -> bool {
    if path.states.iter().any(|q| q.0 >= g.state_count()) {
        return false;
    }
    path.actions.iter().enumerate().all(|(i, joint)| {
        matches!(g.successor(path.states[i], joint), Ok(t) if t == path.states[i + 1])
    })
}

/// A partial map from agents to capacities.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CapacityAssignment(Vec<Option<CapacityId>>);

impl CapacityAssignment {
    pub fn empty(agent_count: usize) -> Self {
        CapacityAssignment(vec![None; agent_count])
    }

    pub fn complete(caps: Vec<CapacityId>) -> Self {
        CapacityAssignment(caps.into_iter().map(Some).collect())
    }

    pub fn get(&self, a: AgentId) -> Option<CapacityId> {
        self.0.get(a.0).copied().flatten()
    }

    pub fn set(&mut self, a: AgentId, c: CapacityId) {
        self.0[a.0] = Some(c);
    }

    pub fn is_complete(&self) -> bool {
        self.0.iter().all(Option::is_some)
    }

    /// `λ(a) ∈ Γ(a)` wherever defined.
    pub fn respects(&self, g: &GameStructure) -> bool {
        self.0.len() == g.agent_count()
            && g.agents()
                .all(|a| self.get(a).map_or(true, |c| g.capacities_of(a).contains(&c)))
    }

    /// `obs=normal, opp=lefty`
    pub fn describe(&self, g: &GameStructure) -> String {
        g.agents()
            .filter_map(|a| {
                self.get(a)
                    .map(|c| format!("{}={}", g.agent_name(a), g.capacity_name(c)))
            })
            .join(", ")
    }

    /// Canonical complete assignment: each agent's lowest-indexed capacity.
    pub fn canonical(g: &GameStructure) -> Option<Self> {
        g.agents()
            .map(|a| g.capacities_of(a).iter().next().copied())
            .collect::<Option<Vec<_>>>()
            .map(CapacityAssignment::complete)
    }
}

pub type AssignmentSet = BTreeSet<CapacityAssignment>;

/// Every complete, Γ-respecting capacity assignment.
pub fn complete_assignments(g: &GameStructure) -> AssignmentSet {
    g.agents()
        .map(|a| g.capacities_of(a).iter().copied())
        .multi_cartesian_product()
        .map(CapacityAssignment::complete)
        .collect()
}

/// Per-agent sets of capacities still compatible with a path, as masks over
/// the positions of `Γ(a)`. `F(ρ)` is the product of these sets.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub(crate) struct Compat(Vec<u64>);

impl Compat {
    pub(crate) fn full(g: &GameStructure) -> Self {
        Compat(g.agents().map(|a| g.full_capacity_mask(a)).collect())
    }

    pub(crate) fn of_path(g: &GameStructure, path: &Path) -> Self {
        path.actions()
            .iter()
            .fold(Compat::full(g), |c, j| c.step(g, j))
    }

    pub(crate) fn step(&self, g: &GameStructure, joint: &JointAction) -> Self {
        Compat(
            self.0
                .iter()
                .zip(g.agents())
                .map(|(m, a)| m & g.capacity_mask(a, joint.get(a)))
                .collect(),
        )
    }

    /// `F = ∅` iff some agent has no capacity left.
    pub(crate) fn is_empty(&self) -> bool {
        self.0.iter().any(|m| *m == 0)
    }

    pub(crate) fn assignments<'a>(
        &'a self,
        g: &'a GameStructure,
    ) -> impl Iterator<Item = CapacityAssignment> + 'a {
        g.agents()
            .map(move |a| {
                let m = self.0[a.0];
                (0..64)
                    .filter(move |bit| m & (1 << bit) != 0)
                    .map(move |bit| g.capacity_at(a, bit))
            })
            .multi_cartesian_product()
            .map(CapacityAssignment::complete)
    }
}

/// `F(ρ)`: the complete capacity assignments under which every agent was
/// allowed every action it took along `ρ`.
pub fn compatible_assignments(g: &GameStructure, path: &Path) -> AssignmentSet {
    let compat = Compat::of_path(g, path);
    if compat.is_empty() {
        return AssignmentSet::new();
    }
    compat.assignments(g).collect()
}

/// `ρ ∼_a ρ'`: same state trace and the same actions of `a` at every step.
pub fn indistinguishable(
    path: &Path,
    other: &Path,
    agent: AgentId,
) -> Result<bool, TraceError> {
    if path.len() != other.len() {
        return Err(TraceError::LengthMismatch(path.len(), other.len()));
    }
    Ok(path.states == other.states
        && path
            .actions
            .iter()
            .zip(&other.actions)
            .all(|(x, y)| x.get(agent) == y.get(agent)))
}

/// Every valid path of the same length as `path` that `agent` cannot tell
/// apart from it. Members with `F = ∅` are kept.
pub fn indistinguishability_class(g: &GameStructure, path: &Path, agent: AgentId) -> BTreeSet<Path> {
    let mut out = BTreeSet::new();
    let mut current = Path::new(path.first());
    extend_class(g, path, agent, &mut current, &mut out);
    out
}

fn extend_class(
    g: &GameStructure,
    reference: &Path,
    agent: AgentId,
    current: &mut Path,
    out: &mut BTreeSet<Path>,
) {
    let step = current.steps();
    if step == reference.steps() {
        out.insert(current.clone());
        return;
    }
    let q = reference.states[step];
    let next = reference.states[step + 1];
    let own = reference.actions[step].get(agent);
    for joint in g.joint_actions(q).expect("valid state") {
        if joint.get(agent) != own || g.transition(q, &joint) != Some(next) {
            continue;
        }
        current.push(joint, next);
        extend_class(g, reference, agent, current, out);
        current.pop();
    }
}

/// A memoryful strategy for a coalition, materialized on the histories (state
/// sequences starting at the pivot) of length at most `depth`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StrategyTree {
    coalition: Vec<AgentId>,
    pivot: StateId,
    depth: usize,
    decisions: BTreeMap<Vec<StateId>, Vec<ActionId>>,
}

impl StrategyTree {
    pub fn new(coalition: impl IntoIterator<Item = AgentId>, pivot: StateId, depth: usize) -> Self {
        let coalition: Vec<AgentId> = coalition.into_iter().collect::<BTreeSet<_>>().into_iter().collect();
        StrategyTree {
            coalition,
            pivot,
            depth,
            decisions: BTreeMap::new(),
        }
    }

    pub fn coalition(&self) -> &[AgentId] {
        &self.coalition
    }

    pub fn pivot(&self) -> StateId {
        self.pivot
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    /// Prescribes `actions` (one per coalition agent, in agent order) at
    /// `history`.
    pub fn decide(&mut self, history: Vec<StateId>, actions: Vec<ActionId>) -> &mut Self {
        assert_eq!(actions.len(), self.coalition.len(), "one action per coalition agent");
        self.decisions.insert(history, actions);
        self
    }

    pub fn decisions(&self) -> &BTreeMap<Vec<StateId>, Vec<ActionId>> {
        &self.decisions
    }

    /// The coalition's actions at `history`; the empty coalition always
    /// decides (on nothing).
    pub fn decision(&self, history: &[StateId]) -> Option<&[ActionId]> {
        if self.coalition.is_empty() {
            return Some(&[]);
        }
        self.decisions.get(history).map(Vec::as_slice)
    }

    /// Whether `joint` agrees with the coalition's `actions`.
    pub(crate) fn agrees(&self, actions: &[ActionId], joint: &JointAction) -> bool {
        self.coalition
            .iter()
            .zip(actions)
            .all(|(a, x)| joint.get(*a) == *x)
    }

    /// Checks the protocol and totality invariants: every prescribed action is
    /// in `d(a, last(h))`, and every history reachable under the tree's own
    /// prescriptions (of length at most `depth`) has a decision.
    pub fn check(&self, g: &GameStructure) -> Result<(), TraceError> {
        for (h, xs) in &self.decisions {
            if h.first() != Some(&self.pivot) {
                return Err(TraceError::ForeignHistory);
            }
            let q = *h.last().expect("nonempty");
            for (a, x) in self.coalition.iter().zip(xs) {
                if !g.protocol(*a, q).contains(x) {
                    return Err(TraceError::OutsideProtocol);
                }
            }
        }
        let mut frontier = vec![vec![self.pivot]];
        while let Some(h) = frontier.pop() {
            if h.len() > self.depth {
                continue;
            }
            let xs = self
                .decision(&h)
                .ok_or(TraceError::Undecided(h.len()))?;
            let q = *h.last().expect("nonempty");
            let succ: BTreeSet<StateId> = g
                .joint_actions(q)
                .expect("valid state")
                .iter()
                .filter(|j| self.agrees(xs, j))
                .filter_map(|j| g.transition(q, j))
                .collect();
            for t in succ {
                let mut h2 = h.clone();
                h2.push(t);
                frontier.push(h2);
            }
        }
        Ok(())
    }
}

/// The `k`-step extensions of `path` in which the coalition follows `strategy`
/// on the history since the pivot, the other agents move freely, and some
/// complete capacity assignment stays compatible with every prefix.
pub fn outcomes_bounded(
    g: &GameStructure,
    path: &Path,
    strategy: &StrategyTree,
    k: usize,
) -> Result<Vec<Path>, TraceError> {
    if strategy.pivot != path.last() {
        return Err(TraceError::PivotMismatch {
            pivot: strategy.pivot.0,
            last: path.last().0,
        });
    }
    if strategy.depth < k {
        return Err(TraceError::InsufficientDepth {
            depth: strategy.depth,
            horizon: k,
        });
    }
    let compat = Compat::of_path(g, path);
    let mut out = Vec::new();
    if compat.is_empty() {
        return Ok(out);
    }
    let mut current = path.clone();
    let mut history = vec![path.last()];
    extend_outcomes(g, strategy, k, &compat, &mut current, &mut history, &mut out)?;
    Ok(out)
}

fn extend_outcomes(
    g: &GameStructure,
    strategy: &StrategyTree,
    k: usize,
    compat: &Compat,
    current: &mut Path,
    history: &mut Vec<StateId>,
    out: &mut Vec<Path>,
) -> Result<(), TraceError> {
    if history.len() == k + 1 {
        out.push(current.clone());
        return Ok(());
    }
    let q = current.last();
    let xs = strategy
        .decision(history)
        .ok_or(TraceError::Undecided(history.len()))?
        .to_vec();
    for joint in g.joint_actions(q).expect("valid state") {
        if !strategy.agrees(&xs, &joint) {
            continue;
        }
        let next = compat.step(g, &joint);
        if next.is_empty() {
            continue;
        }
        let t = g.transition(q, &joint).expect("valid structure");
        current.push(joint, t);
        history.push(t);
        extend_outcomes(g, strategy, k, &next, current, history, out)?;
        history.pop();
        current.pop();
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    struct Names<'a>(&'a GameStructure);

    impl Names<'_> {
        fn q(&self, n: &str) -> StateId {
            self.0.state_id(n).unwrap()
        }
        fn x(&self, n: &str) -> ActionId {
            self.0.action_id(n).unwrap()
        }
        fn a(&self, n: &str) -> AgentId {
            self.0.agent_id(n).unwrap()
        }
        fn j(&self, xs: &[&str]) -> JointAction {
            JointAction::new(xs.iter().map(|n| self.x(n)).collect())
        }
        fn lam(&self, caps: &[&str]) -> CapacityAssignment {
            CapacityAssignment::complete(caps.iter().map(|c| self.0.capacity_id(c).unwrap()).collect())
        }
        /// `s0 watch,swingL s1 ...`
        fn path(&self, start: &str, steps: &[(&[&str], &str)]) -> Path {
            let mut p = Path::new(self.q(start));
            for (xs, t) in steps {
                p.push(self.j(xs), self.q(t));
            }
            p
        }
    }

    #[test]
    fn traces_are_projections() {
        let g = fixtures::hand();
        let n = Names(&g);
        let p = n.path("s0", &[(&["watch", "swingL"], "s1")]);
        assert_eq!(p.state_trace(), History(vec![n.q("s0"), n.q("s1")]));
        assert_eq!(p.action_trace(), vec![n.j(&["watch", "swingL"])]);
        let single = Path::new(n.q("s0"));
        assert_eq!(single.state_trace().0.len(), 1);
        assert!(single.action_trace().is_empty());
        assert!(Path::from_parts(vec![n.q("s0")], vec![n.j(&["watch", "serve"])]).is_err());
    }

    #[test]
    fn path_validation() {
        let g = fixtures::hand();
        let n = Names(&g);
        assert!(validate_path(&g, &n.path("s0", &[(&["watch", "swingL"], "s1")])));
        assert!(!validate_path(&g, &n.path("s0", &[(&["watch", "swingL"], "s2")])));
        assert!(validate_path(&g, &Path::new(n.q("s0"))));
    }

    #[test]
    fn compatible_assignments_examples() {
        let g = fixtures::hand();
        let n = Names(&g);
        let both: AssignmentSet = [n.lam(&["normal", "lefty"]), n.lam(&["normal", "righty"])].into();
        assert_eq!(compatible_assignments(&g, &Path::new(n.q("s0"))), both);
        let left = n.path("s0", &[(&["watch", "swingL"], "s1")]);
        assert_eq!(
            compatible_assignments(&g, &left),
            [n.lam(&["normal", "lefty"])].into()
        );

        let m = fixtures::mix();
        let n = Names(&m);
        let mixed = n.path(
            "s0",
            &[(&["watch", "swingL"], "s1"), (&["watch", "swingR"], "s2")],
        );
        assert!(compatible_assignments(&m, &mixed).is_empty());
    }

    #[test]
    fn indistinguishability_examples() {
        let g = fixtures::hand();
        let n = Names(&g);
        let served = n.path("s0", &[(&["watch", "serve"], "s0")]);
        let left = n.path("s0", &[(&["watch", "swingL"], "s1")]);
        assert!(indistinguishable(&served, &served, n.a("obs")).unwrap());
        assert!(!indistinguishable(&served, &left, n.a("obs")).unwrap());
        assert!(indistinguishable(&served, &Path::new(n.q("s0")), n.a("obs")).is_err());

        assert_eq!(
            indistinguishability_class(&g, &left, n.a("obs")),
            [left.clone()].into()
        );
        assert_eq!(
            indistinguishability_class(&g, &served, n.a("opp")),
            [served.clone()].into()
        );
        let single = Path::new(n.q("s1"));
        assert_eq!(indistinguishability_class(&g, &single, n.a("obs")), [single.clone()].into());
    }

    #[test]
    fn swapped_opponents_are_indistinguishable_to_the_third() {
        // Agents 2 and 3 swap actions, landing in the same state.
        let mut b = crate::model::GameBuilder::new("swap");
        let a1 = b.add_agent("a").unwrap();
        let a2 = b.add_agent("b").unwrap();
        let a3 = b.add_agent("c").unwrap();
        let q = b.add_state("q").unwrap();
        let r = b.add_state("r").unwrap();
        let w = b.add_action("w").unwrap();
        let x = b.add_action("x").unwrap();
        let y = b.add_action("y").unwrap();
        let cw = b.add_capacity("cw").unwrap();
        let cxy = b.add_capacity("cxy").unwrap();
        b.allow(cw, w).allow(cxy, x).allow(cxy, y);
        b.grant(a1, cw).grant(a2, cxy).grant(a3, cxy);
        for s in [q, r] {
            b.set_protocol(a1, s, [w]);
            b.set_protocol(a2, s, [x, y]);
            b.set_protocol(a3, s, [x, y]);
            for (u, v) in [(x, x), (x, y), (y, x), (y, y)] {
                let t = if u == v { q } else { r };
                b.set_transition(s, JointAction::new(vec![w, u, v]), t);
            }
        }
        let g = b.build().unwrap();
        assert!(g.validate().is_clean());
        let mut p1 = Path::new(q);
        p1.push(JointAction::new(vec![w, x, y]), r);
        let mut p2 = Path::new(q);
        p2.push(JointAction::new(vec![w, y, x]), r);
        assert!(indistinguishable(&p1, &p2, a1).unwrap());
        assert!(!indistinguishable(&p1, &p2, a2).unwrap());
        assert_eq!(indistinguishability_class(&g, &p1, a1), [p1.clone(), p2.clone()].into());
    }

    #[test]
    fn outcomes_examples() {
        let g = fixtures::hand();
        let n = Names(&g);
        let s0 = n.q("s0");
        let opp = n.a("opp");

        let mut left_first = StrategyTree::new([opp], s0, 1);
        left_first.decide(vec![s0], vec![n.x("swingL")]);
        assert_eq!(
            outcomes_bounded(&g, &Path::new(s0), &left_first, 1).unwrap(),
            vec![n.path("s0", &[(&["watch", "swingL"], "s1")])]
        );

        // In `hand` the s1 branch can only serve.
        let mut tree = StrategyTree::new([opp], s0, 2);
        tree.decide(vec![s0], vec![n.x("swingL")]);
        tree.decide(vec![s0, n.q("s1")], vec![n.x("serve")]);
        tree.check(&g).unwrap();
        assert_eq!(
            outcomes_bounded(&g, &Path::new(s0), &tree, 2).unwrap(),
            vec![n.path(
                "s0",
                &[(&["watch", "swingL"], "s1"), (&["watch", "serve"], "s0")]
            )]
        );

        let m = fixtures::mix();
        let n = Names(&m);
        let mut mixed = StrategyTree::new([opp], s0, 2);
        mixed.decide(vec![s0], vec![n.x("swingL")]);
        mixed.decide(vec![s0, n.q("s1")], vec![n.x("swingR")]);
        mixed.check(&m).unwrap();
        assert!(outcomes_bounded(&m, &Path::new(s0), &mixed, 2).unwrap().is_empty());
    }

    #[test]
    fn outcome_preconditions() {
        let g = fixtures::hand();
        let n = Names(&g);
        let tree = StrategyTree::new([n.a("opp")], n.q("s1"), 1);
        assert!(matches!(
            outcomes_bounded(&g, &Path::new(n.q("s0")), &tree, 1),
            Err(TraceError::PivotMismatch { .. })
        ));
        let tree = StrategyTree::new([n.a("opp")], n.q("s0"), 0);
        assert!(matches!(
            outcomes_bounded(&g, &Path::new(n.q("s0")), &tree, 1),
            Err(TraceError::InsufficientDepth { .. })
        ));
        assert!(matches!(tree.check(&g), Ok(())));
        let tree = StrategyTree::new([n.a("opp")], n.q("s0"), 1);
        assert_eq!(tree.check(&g), Err(TraceError::Undecided(1)));
    }

    #[test]
    fn tree_rejects_actions_outside_protocol() {
        let g = fixtures::hand();
        let n = Names(&g);
        let mut tree = StrategyTree::new([n.a("opp")], n.q("s1"), 1);
        tree.decide(vec![n.q("s1")], vec![n.x("swingL")]);
        assert_eq!(tree.check(&g), Err(TraceError::OutsideProtocol));
    }
}
