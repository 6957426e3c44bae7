//! Unknown-profile game structures.
//!
//! A [`GameStructure`] is a concurrent game structure in which every agent
//! secretly holds one capacity out of `Γ(a)`, and a capacity `c` restricts the
//! agent to the actions `γ(c)`. All identifiers are interned to dense indices;
//! names live in side tables and are only used for diagnostics and rendering.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use itertools::Itertools;
use thiserror::Error;

macro_rules! dense_id {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub struct $name(pub usize);

        impl $name {
            pub fn index(self) -> usize {
                self.0
            }
        }
    };
}

dense_id!(
    /// Agent index, `0..agent_count()`.
    AgentId
);
dense_id!(CapacityId);
dense_id!(StateId);
dense_id!(ActionId);
dense_id!(
    /// Atomic proposition. [`PropId::TOP`] is the reserved atom that labels
    /// every state.
    PropId
);

impl PropId {
    pub const TOP: PropId = PropId(usize::MAX);

    pub fn is_top(self) -> bool {
        self == PropId::TOP
    }
}

/// Identifiers that can never name a proposition because the formula language
/// uses them as constants.
pub const RESERVED_PROPS: [&str; 2] = ["true", "false"];

/// Capacities per agent are tracked in `u64` masks by the engine.
pub const MAX_CAPACITIES_PER_AGENT: usize = 64;

/// One action per agent, in agent-index order.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct JointAction(Vec<ActionId>);

impl JointAction {
    pub fn new(actions: Vec<ActionId>) -> Self {
        JointAction(actions)
    }

    pub fn get(&self, agent: AgentId) -> ActionId {
        self.0[agent.0]
    }

    pub fn as_slice(&self) -> &[ActionId] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl From<Vec<ActionId>> for JointAction {
    fn from(v: Vec<ActionId>) -> Self {
        JointAction(v)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("duplicate {kind} `{name}`")]
    Duplicate { kind: &'static str, name: String },
    #[error("`{0}` is reserved and cannot name a proposition")]
    ReservedName(String),
    #[error("{kind} index {index} out of range")]
    OutOfRange { kind: &'static str, index: usize },
    #[error("joint action has {found} components, expected {expected}")]
    Arity { expected: usize, found: usize },
    #[error("agent {agent} has {count} capacities, at most {MAX_CAPACITIES_PER_AGENT} are supported")]
    TooManyCapacities { agent: String, count: usize },
    #[error("action `{action}` of agent `{agent}` is not in its protocol at `{state}`")]
    NotInProtocol {
        agent: String,
        state: String,
        action: String,
    },
    #[error("no transition from `{state}` on an available joint action (structure is invalid)")]
    TransitionMissing { state: String },
}

/// An unknown-profile game structure `⟨Agt, Cap, St, Π, π, Act, Γ, γ, d, o⟩`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GameStructure {
    name: String,
    agents: Vec<String>,
    capacities: Vec<String>,
    states: Vec<String>,
    props: Vec<String>,
    actions: Vec<String>,
    labels: Vec<BTreeSet<PropId>>,
    agent_caps: Vec<BTreeSet<CapacityId>>,
    cap_actions: Vec<BTreeSet<ActionId>>,
    /// `protocol[agent][state]`
    protocol: Vec<Vec<BTreeSet<ActionId>>>,
    /// `transitions[state][joint]`
    transitions: Vec<BTreeMap<JointAction, StateId>>,
    init: Option<StateId>,
    /// `action_caps[agent][action]`: bit `j` set iff the `j`-th capacity of
    /// `Γ(agent)` (in index order) allows the action.
    action_caps: Vec<Vec<u64>>,
}

impl GameStructure {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn agent_count(&self) -> usize {
        self.agents.len()
    }

    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn capacity_count(&self) -> usize {
        self.capacities.len()
    }

    pub fn action_count(&self) -> usize {
        self.actions.len()
    }

    pub fn prop_count(&self) -> usize {
        self.props.len()
    }

    pub fn agents(&self) -> impl Iterator<Item = AgentId> + Clone {
        (0..self.agents.len()).map(AgentId)
    }

    pub fn states(&self) -> impl Iterator<Item = StateId> + Clone {
        (0..self.states.len()).map(StateId)
    }

    pub fn capacities(&self) -> impl Iterator<Item = CapacityId> + Clone {
        (0..self.capacities.len()).map(CapacityId)
    }

    pub fn actions(&self) -> impl Iterator<Item = ActionId> + Clone {
        (0..self.actions.len()).map(ActionId)
    }

    pub fn props(&self) -> impl Iterator<Item = PropId> + Clone {
        (0..self.props.len()).map(PropId)
    }

    pub fn agent_name(&self, a: AgentId) -> &str {
        &self.agents[a.0]
    }

    pub fn capacity_name(&self, c: CapacityId) -> &str {
        &self.capacities[c.0]
    }

    pub fn state_name(&self, q: StateId) -> &str {
        &self.states[q.0]
    }

    pub fn action_name(&self, x: ActionId) -> &str {
        &self.actions[x.0]
    }

    pub fn prop_name(&self, p: PropId) -> &str {
        if p.is_top() {
            "true"
        } else {
            &self.props[p.0]
        }
    }

    pub fn agent_id(&self, name: &str) -> Option<AgentId> {
        self.agents.iter().position(|n| n == name).map(AgentId)
    }

    pub fn capacity_id(&self, name: &str) -> Option<CapacityId> {
        self.capacities.iter().position(|n| n == name).map(CapacityId)
    }

    pub fn state_id(&self, name: &str) -> Option<StateId> {
        self.states.iter().position(|n| n == name).map(StateId)
    }

    pub fn action_id(&self, name: &str) -> Option<ActionId> {
        self.actions.iter().position(|n| n == name).map(ActionId)
    }

    pub fn prop_id(&self, name: &str) -> Option<PropId> {
        self.props.iter().position(|n| n == name).map(PropId)
    }

    /// `Γ(a)`
    pub fn capacities_of(&self, a: AgentId) -> &BTreeSet<CapacityId> {
        &self.agent_caps[a.0]
    }

    /// `γ(c)`
    pub fn actions_of(&self, c: CapacityId) -> &BTreeSet<ActionId> {
        &self.cap_actions[c.0]
    }

    /// `d(a, q)`
    pub fn protocol(&self, a: AgentId, q: StateId) -> &BTreeSet<ActionId> {
        &self.protocol[a.0][q.0]
    }

    /// `π(q)`, without the reserved atom.
    pub fn labels(&self, q: StateId) -> &BTreeSet<PropId> {
        &self.labels[q.0]
    }

    pub fn has_label(&self, q: StateId, p: PropId) -> bool {
        p.is_top() || self.labels[q.0].contains(&p)
    }

    pub fn init(&self) -> Option<StateId> {
        self.init
    }

    pub fn transitions(&self) -> impl Iterator<Item = (StateId, &JointAction, StateId)> {
        self.transitions
            .iter()
            .enumerate()
            .flat_map(|(q, row)| row.iter().map(move |(j, t)| (StateId(q), j, *t)))
    }

    pub fn transition(&self, q: StateId, joint: &JointAction) -> Option<StateId> {
        self.transitions.get(q.0)?.get(joint).copied()
    }

    /// Mask over the positions of `Γ(a)` whose capacity allows `x`.
    pub(crate) fn capacity_mask(&self, a: AgentId, x: ActionId) -> u64 {
        self.action_caps[a.0][x.0]
    }

    /// Mask with one bit per capacity in `Γ(a)`.
    pub(crate) fn full_capacity_mask(&self, a: AgentId) -> u64 {
        let n = self.agent_caps[a.0].len();
        if n == 64 {
            u64::MAX
        } else {
            (1u64 << n) - 1
        }
    }

    /// The capacity at bit position `bit` of agent `a`'s masks.
    pub(crate) fn capacity_at(&self, a: AgentId, bit: usize) -> CapacityId {
        *self.agent_caps[a.0]
            .iter()
            .nth(bit)
            .expect("capacity bit within Γ(a)")
    }

    /// All joint actions available at `q`: the product of `d(a, q)` over the
    /// agents, in lexicographic order of action indices.
    pub fn joint_actions(&self, q: StateId) -> Result<Vec<JointAction>, ModelError> {
        self.check_state(q)?;
        Ok(self
            .agents()
            .map(|a| self.protocol(a, q).iter().copied())
            .multi_cartesian_product()
            .map(JointAction)
            .collect())
    }

    /// `o(q, α)`. Fails with [`ModelError::NotInProtocol`] when `α` is not
    /// available at `q`, and with [`ModelError::TransitionMissing`] when it is
    /// available but the structure has no transition for it.
    pub fn successor(&self, q: StateId, joint: &JointAction) -> Result<StateId, ModelError> {
        self.check_state(q)?;
        if joint.len() != self.agent_count() {
            return Err(ModelError::Arity {
                expected: self.agent_count(),
                found: joint.len(),
            });
        }
        for a in self.agents() {
            let x = joint.get(a);
            if !self.protocol(a, q).contains(&x) {
                return Err(ModelError::NotInProtocol {
                    agent: self.agent_name(a).to_string(),
                    state: self.state_name(q).to_string(),
                    action: self
                        .actions
                        .get(x.0)
                        .cloned()
                        .unwrap_or_else(|| format!("#{}", x.0)),
                });
            }
        }
        self.transition(q, joint)
            .ok_or_else(|| ModelError::TransitionMissing {
                state: self.state_name(q).to_string(),
            })
    }

    fn check_state(&self, q: StateId) -> Result<(), ModelError> {
        if q.0 < self.states.len() {
            Ok(())
        } else {
            Err(ModelError::OutOfRange {
                kind: "state",
                index: q.0,
            })
        }
    }

    pub fn validate(&self) -> ValidationReport {
        validate_structure(self)
    }

    /// A builder pre-loaded with this structure, for derived variants.
    pub fn to_builder(&self) -> GameBuilder {
        GameBuilder {
            name: self.name.clone(),
            agents: self.agents.clone(),
            capacities: self.capacities.clone(),
            states: self.states.clone(),
            props: self.props.clone(),
            actions: self.actions.clone(),
            labels: self.labels.clone(),
            agent_caps: self.agent_caps.clone(),
            cap_actions: self.cap_actions.clone(),
            protocol: self.protocol.clone(),
            transitions: self
                .transitions()
                .map(|(q, j, t)| ((q, j.clone()), t))
                .collect(),
            init: self.init,
        }
    }

    pub fn joint_action_string(&self, joint: &JointAction) -> String {
        format!(
            "({})",
            joint.as_slice().iter().map(|x| self.action_name(*x)).join(",")
        )
    }

    /// Structural equality by names, ignoring index order.
    pub fn isomorphic(&self, other: &GameStructure) -> bool {
        fn named<T: Copy, N: Ord + Clone>(
            set: &BTreeSet<T>,
            name: impl Fn(T) -> N,
        ) -> BTreeSet<N> {
            set.iter().map(|x| name(*x)).collect()
        }
        let same_names = |a: &[String], b: &[String]| {
            a.iter().collect::<BTreeSet<_>>() == b.iter().collect::<BTreeSet<_>>()
        };
        // Agent order is semantic: it fixes the joint-action layout.
        if self.agents != other.agents
            || !same_names(&self.capacities, &other.capacities)
            || !same_names(&self.states, &other.states)
            || !same_names(&self.props, &other.props)
            || !same_names(&self.actions, &other.actions)
        {
            return false;
        }
        let init = |g: &GameStructure| g.init.map(|q| g.state_name(q).to_string());
        if init(self) != init(other) {
            return false;
        }
        for a in self.agents() {
            if named(self.capacities_of(a), |c| self.capacity_name(c).to_string())
                != named(other.capacities_of(a), |c| other.capacity_name(c).to_string())
            {
                return false;
            }
            for q in self.states() {
                let q2 = other.state_id(self.state_name(q)).expect("same states");
                if named(self.protocol(a, q), |x| self.action_name(x).to_string())
                    != named(other.protocol(a, q2), |x| other.action_name(x).to_string())
                {
                    return false;
                }
            }
        }
        for c in self.capacities() {
            let c2 = other.capacity_id(self.capacity_name(c)).expect("same capacities");
            if named(self.actions_of(c), |x| self.action_name(x).to_string())
                != named(other.actions_of(c2), |x| other.action_name(x).to_string())
            {
                return false;
            }
        }
        for q in self.states() {
            let q2 = other.state_id(self.state_name(q)).expect("same states");
            if named(self.labels(q), |p| self.prop_name(p).to_string())
                != named(other.labels(q2), |p| other.prop_name(p).to_string())
            {
                return false;
            }
        }
        let named_transitions = |g: &GameStructure| -> BTreeSet<(String, Vec<String>, String)> {
            g.transitions()
                .map(|(q, j, t)| {
                    (
                        g.state_name(q).to_string(),
                        j.as_slice()
                            .iter()
                            .map(|x| g.action_name(*x).to_string())
                            .collect(),
                        g.state_name(t).to_string(),
                    )
                })
                .collect()
        };
        named_transitions(self) == named_transitions(other)
    }
}

/// Incremental construction of a [`GameStructure`].
///
/// `build` only checks that indices and arities are well-formed; the
/// semantic invariants (progression condition, transition totality) are the
/// business of [`validate_structure`].
#[derive(Clone, Debug, Default)]
pub struct GameBuilder {
    name: String,
    agents: Vec<String>,
    capacities: Vec<String>,
    states: Vec<String>,
    props: Vec<String>,
    actions: Vec<String>,
    labels: Vec<BTreeSet<PropId>>,
    agent_caps: Vec<BTreeSet<CapacityId>>,
    cap_actions: Vec<BTreeSet<ActionId>>,
    protocol: Vec<Vec<BTreeSet<ActionId>>>,
    transitions: BTreeMap<(StateId, JointAction), StateId>,
    init: Option<StateId>,
}

fn push_unique(
    names: &mut Vec<String>,
    kind: &'static str,
    name: &str,
) -> Result<usize, ModelError> {
    if names.iter().any(|n| n == name) {
        return Err(ModelError::Duplicate {
            kind,
            name: name.to_string(),
        });
    }
    names.push(name.to_string());
    Ok(names.len() - 1)
}

impl GameBuilder {
    pub fn new(name: impl Into<String>) -> Self {
        GameBuilder {
            name: name.into(),
            ..Default::default()
        }
    }

    pub fn add_agent(&mut self, name: &str) -> Result<AgentId, ModelError> {
        let id = push_unique(&mut self.agents, "agent", name)?;
        self.agent_caps.push(BTreeSet::new());
        self.protocol.push(vec![BTreeSet::new(); self.states.len()]);
        Ok(AgentId(id))
    }

    pub fn add_capacity(&mut self, name: &str) -> Result<CapacityId, ModelError> {
        let id = push_unique(&mut self.capacities, "capacity", name)?;
        self.cap_actions.push(BTreeSet::new());
        Ok(CapacityId(id))
    }

    pub fn add_state(&mut self, name: &str) -> Result<StateId, ModelError> {
        let id = push_unique(&mut self.states, "state", name)?;
        self.labels.push(BTreeSet::new());
        for per_agent in &mut self.protocol {
            per_agent.push(BTreeSet::new());
        }
        Ok(StateId(id))
    }

    pub fn add_prop(&mut self, name: &str) -> Result<PropId, ModelError> {
        if RESERVED_PROPS.contains(&name) {
            return Err(ModelError::ReservedName(name.to_string()));
        }
        push_unique(&mut self.props, "proposition", name).map(PropId)
    }

    pub fn add_action(&mut self, name: &str) -> Result<ActionId, ModelError> {
        push_unique(&mut self.actions, "action", name).map(ActionId)
    }

    pub fn agent_id(&self, name: &str) -> Option<AgentId> {
        self.agents.iter().position(|n| n == name).map(AgentId)
    }

    pub fn capacity_id(&self, name: &str) -> Option<CapacityId> {
        self.capacities.iter().position(|n| n == name).map(CapacityId)
    }

    pub fn state_id(&self, name: &str) -> Option<StateId> {
        self.states.iter().position(|n| n == name).map(StateId)
    }

    pub fn prop_id(&self, name: &str) -> Option<PropId> {
        self.props.iter().position(|n| n == name).map(PropId)
    }

    pub fn action_id(&self, name: &str) -> Option<ActionId> {
        self.actions.iter().position(|n| n == name).map(ActionId)
    }

    /// Adds `c` to `Γ(a)`.
    pub fn grant(&mut self, a: AgentId, c: CapacityId) -> &mut Self {
        self.agent_caps[a.0].insert(c);
        self
    }

    /// Adds `x` to `γ(c)`.
    pub fn allow(&mut self, c: CapacityId, x: ActionId) -> &mut Self {
        self.cap_actions[c.0].insert(x);
        self
    }

    pub fn label(&mut self, q: StateId, p: PropId) -> &mut Self {
        self.labels[q.0].insert(p);
        self
    }

    pub fn set_protocol(
        &mut self,
        a: AgentId,
        q: StateId,
        actions: impl IntoIterator<Item = ActionId>,
    ) -> &mut Self {
        self.protocol[a.0][q.0] = actions.into_iter().collect();
        self
    }

    pub fn set_transition(&mut self, q: StateId, joint: JointAction, target: StateId) -> &mut Self {
        self.transitions.insert((q, joint), target);
        self
    }

    pub fn remove_transition(&mut self, q: StateId, joint: &JointAction) -> Option<StateId> {
        self.transitions.remove(&(q, joint.clone()))
    }

    pub fn set_init(&mut self, q: Option<StateId>) -> &mut Self {
        self.init = q;
        self
    }

    /// Transitions currently defined, in key order.
    pub fn transition_keys(&self) -> Vec<(StateId, JointAction)> {
        self.transitions.keys().cloned().collect()
    }

    pub fn protocol(&self, a: AgentId, q: StateId) -> &BTreeSet<ActionId> {
        &self.protocol[a.0][q.0]
    }

    pub fn build(self) -> Result<GameStructure, ModelError> {
        let range = |kind, index: usize, len: usize| {
            if index < len {
                Ok(())
            } else {
                Err(ModelError::OutOfRange { kind, index })
            }
        };
        for (a, caps) in self.agent_caps.iter().enumerate() {
            if caps.len() > MAX_CAPACITIES_PER_AGENT {
                return Err(ModelError::TooManyCapacities {
                    agent: self.agents[a].clone(),
                    count: caps.len(),
                });
            }
            for c in caps {
                range("capacity", c.0, self.capacities.len())?;
            }
        }
        for xs in &self.cap_actions {
            for x in xs {
                range("action", x.0, self.actions.len())?;
            }
        }
        for per_agent in &self.protocol {
            for xs in per_agent {
                for x in xs {
                    range("action", x.0, self.actions.len())?;
                }
            }
        }
        for ps in &self.labels {
            for p in ps {
                range("proposition", p.0, self.props.len())?;
            }
        }
        for ((q, joint), t) in &self.transitions {
            range("state", q.0, self.states.len())?;
            range("state", t.0, self.states.len())?;
            if joint.len() != self.agents.len() {
                return Err(ModelError::Arity {
                    expected: self.agents.len(),
                    found: joint.len(),
                });
            }
            for x in joint.as_slice() {
                range("action", x.0, self.actions.len())?;
            }
        }
        if let Some(q) = self.init {
            range("state", q.0, self.states.len())?;
        }
        let action_caps = self
            .agent_caps
            .iter()
            .map(|caps| {
                let mut table = vec![0u64; self.actions.len()];
                for (bit, c) in caps.iter().enumerate() {
                    for x in &self.cap_actions[c.0] {
                        table[x.0] |= 1 << bit;
                    }
                }
                table
            })
            .collect();
        let mut transitions = vec![BTreeMap::new(); self.states.len()];
        for ((q, joint), t) in self.transitions {
            transitions[q.0].insert(joint, t);
        }
        Ok(GameStructure {
            name: self.name,
            agents: self.agents,
            capacities: self.capacities,
            states: self.states,
            props: self.props,
            actions: self.actions,
            labels: self.labels,
            agent_caps: self.agent_caps,
            cap_actions: self.cap_actions,
            protocol: self.protocol,
            transitions,
            init: self.init,
            action_caps,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ViolationKind {
    NoCapacities,
    ProtocolOutsideCapacities,
    CapacityStarved,
    MissingTransition,
    UnavailableTransition,
}

/// A broken structural invariant, with the agent/state/capacity involved.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Violation {
    /// `Γ(a) = ∅`
    NoCapacities { agent: AgentId },
    /// `x ∈ d(a, q)` but no capacity of `a` allows `x`.
    ProtocolOutsideCapacities {
        agent: AgentId,
        state: StateId,
        action: ActionId,
    },
    /// `d(a, q) ∩ γ(c) = ∅` for some `c ∈ Γ(a)`.
    CapacityStarved {
        agent: AgentId,
        state: StateId,
        capacity: CapacityId,
    },
    /// `o` undefined for an available joint action.
    MissingTransition { state: StateId, joint: JointAction },
    /// `o` defined for a joint action that is not available.
    UnavailableTransition { state: StateId, joint: JointAction },
}

impl Violation {
    pub fn kind(&self) -> ViolationKind {
        match self {
            Violation::NoCapacities { .. } => ViolationKind::NoCapacities,
            Violation::ProtocolOutsideCapacities { .. } => ViolationKind::ProtocolOutsideCapacities,
            Violation::CapacityStarved { .. } => ViolationKind::CapacityStarved,
            Violation::MissingTransition { .. } => ViolationKind::MissingTransition,
            Violation::UnavailableTransition { .. } => ViolationKind::UnavailableTransition,
        }
    }

    pub fn describe(&self, g: &GameStructure) -> String {
        match self {
            Violation::NoCapacities { agent } => {
                format!("agent {} has no capacity", g.agent_name(*agent))
            }
            Violation::ProtocolOutsideCapacities {
                agent,
                state,
                action,
            } => format!(
                "d({}, {}) contains {}, which no capacity of {} allows",
                g.agent_name(*agent),
                g.state_name(*state),
                g.action_name(*action),
                g.agent_name(*agent)
            ),
            Violation::CapacityStarved {
                agent,
                state,
                capacity,
            } => format!(
                "d({}, {})∩γ({})=∅ at {}",
                g.agent_name(*agent),
                g.state_name(*state),
                g.capacity_name(*capacity),
                g.state_name(*state)
            ),
            Violation::MissingTransition { state, joint } => format!(
                "o undefined for available joint action {} at {}",
                g.joint_action_string(joint),
                g.state_name(*state)
            ),
            Violation::UnavailableTransition { state, joint } => format!(
                "o defined for unavailable joint action {} at {}",
                g.joint_action_string(joint),
                g.state_name(*state)
            ),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn kinds(&self) -> BTreeSet<ViolationKind> {
        self.violations.iter().map(Violation::kind).collect()
    }

    pub fn describe(&self, g: &GameStructure) -> Vec<String> {
        self.violations.iter().map(|v| v.describe(g)).collect()
    }
}

/// Checks every structural invariant of an unknown-profile game structure.
/// Violations are data: the report is empty iff the structure is valid.
pub fn validate_structure(g: &GameStructure) -> ValidationReport {
    let mut violations = Vec::new();
    for a in g.agents() {
        let caps = g.capacities_of(a);
        if caps.is_empty() {
            violations.push(Violation::NoCapacities { agent: a });
        }
        let allowed: BTreeSet<ActionId> = caps
            .iter()
            .flat_map(|c| g.actions_of(*c).iter().copied())
            .collect();
        for q in g.states() {
            let d = g.protocol(a, q);
            for x in d.difference(&allowed) {
                violations.push(Violation::ProtocolOutsideCapacities {
                    agent: a,
                    state: q,
                    action: *x,
                });
            }
            for c in caps {
                if d.is_disjoint(g.actions_of(*c)) {
                    violations.push(Violation::CapacityStarved {
                        agent: a,
                        state: q,
                        capacity: *c,
                    });
                }
            }
        }
    }

    let mut available: HashMap<StateId, BTreeSet<JointAction>> = HashMap::new();
    for q in g.states() {
        let joints: BTreeSet<JointAction> = g
            .joint_actions(q)
            .expect("state in range")
            .into_iter()
            .collect();
        for joint in &joints {
            if g.transition(q, joint).is_none() {
                violations.push(Violation::MissingTransition {
                    state: q,
                    joint: joint.clone(),
                });
            }
        }
        available.insert(q, joints);
    }
    for (q, joint, _) in g.transitions() {
        if !available[&q].contains(joint) {
            violations.push(Violation::UnavailableTransition {
                state: q,
                joint: joint.clone(),
            });
        }
    }
    ValidationReport { violations }
}

impl fmt::Display for ViolationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ViolationKind::NoCapacities => "no-capacities",
            ViolationKind::ProtocolOutsideCapacities => "protocol-outside-capacities",
            ViolationKind::CapacityStarved => "capacity-starved",
            ViolationKind::MissingTransition => "missing-transition",
            ViolationKind::UnavailableTransition => "unavailable-transition",
        };
        f.write_str(s)
    }
}
