//! Shared helpers for the integration tests: instance families, random
//! formulas and fault injection.
#![allow(dead_code)]

use std::collections::BTreeSet;

use itertools::Itertools;
use proptest::prelude::*;
use rand::seq::{IteratorRandom, SliceRandom};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use upatl::formula::{CapFormula, Coalition, PathFormula, TemporalFormula};
use upatl::model::{ActionId, AgentId, CapacityId, GameStructure, JointAction, PropId, StateId, ViolationKind};
use upatl::oracle::{generate_random_game, GeneratorParams};
use upatl::trace::{CapacityAssignment, Path};

/// The two fixtures followed by `n` generated games small enough for the
/// exhaustive cross-check.
pub fn sweep_games(n: u64) -> Vec<GameStructure> {
    let mut games = vec![upatl::fixtures::hand(), upatl::fixtures::mix()];
    games.extend((0..n).map(|seed| {
        generate_random_game(&GeneratorParams {
            seed,
            states: 3,
            agents: 2,
            capacities_per_agent: 2,
            actions_per_capacity: 1 + (seed as usize % 2),
            label_density: 0.4,
            props: 2,
            protocol_density: 0.0,
        })
    }));
    games
}

/// Generated games with parameters sampled across the whole desk-scale range.
pub fn sampled_games(range: std::ops::Range<u64>) -> Vec<GameStructure> {
    range
        .map(|seed| generate_random_game(&GeneratorParams::sampled(seed)))
        .collect()
}

pub fn complete_assignments(g: &GameStructure) -> Vec<CapacityAssignment> {
    g.agents()
        .map(|a| g.capacities_of(a).iter().copied().collect::<Vec<_>>())
        .multi_cartesian_product()
        .map(CapacityAssignment::complete)
        .collect()
}

/// All paths from `q` with exactly `steps` joint actions.
pub fn paths_from(g: &GameStructure, q: StateId, steps: usize) -> Vec<Path> {
    let mut paths = vec![Path::new(q)];
    for _ in 0..steps {
        paths = paths
            .iter()
            .flat_map(|p| {
                g.joint_actions(p.last())
                    .unwrap()
                    .into_iter()
                    .map(move |j| {
                        let t = g.transition(p.last(), &j).unwrap();
                        p.extended(j, t)
                    })
            })
            .collect();
    }
    paths
}

/// A random walk with `steps` joint actions from `q`.
pub fn random_walk(g: &GameStructure, q: StateId, steps: usize, rng: &mut ChaCha8Rng) -> Path {
    let mut p = Path::new(q);
    for _ in 0..steps {
        let options = g.joint_actions(p.last()).unwrap();
        let j = options.choose(rng).unwrap().clone();
        let t = g.transition(p.last(), &j).unwrap();
        p.push(j, t);
    }
    p
}

// Random formulas over a game's vocabulary.

pub fn arb_cap_formula(agents: usize, caps: usize) -> impl Strategy<Value = CapFormula> {
    let leaf = (0..agents, 0..caps).prop_map(|(a, c)| CapFormula::has(AgentId(a), CapacityId(c)));
    leaf.prop_recursive(2, 8, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(CapFormula::not),
            (inner.clone(), inner).prop_map(|(l, r)| CapFormula::and(l, r)),
        ]
    })
}

fn arb_coalition(agents: usize) -> impl Strategy<Value = Coalition> {
    proptest::collection::btree_set(0..agents, 0..=agents)
        .prop_map(|s| Coalition::new(s.into_iter().map(AgentId)))
}

/// Path formulas of depth at most `depth` (counted as
/// [`PathFormula::depth`]).
pub fn arb_formula(g: &GameStructure, depth: u32) -> BoxedStrategy<PathFormula> {
    let props = g.prop_count();
    let agents = g.agent_count();
    let caps = g.capacity_count();
    let atom = prop_oneof![
        4 => (0..props).prop_map(|p| PathFormula::atom(PropId(p))),
        1 => Just(PathFormula::truth()),
    ];
    let know = (0..agents, arb_cap_formula(agents, caps)).prop_map(|(a, c)| PathFormula::know(AgentId(a), c));
    let leaf = prop_oneof![3 => atom, 1 => know].boxed();
    if depth <= 1 {
        return leaf;
    }
    let inner = arb_formula(g, depth - 1);
    prop_oneof![
        1 => leaf,
        1 => inner.clone().prop_map(PathFormula::not),
        1 => (inner.clone(), inner.clone()).prop_map(|(l, r)| PathFormula::and(l, r)),
        1 => (arb_coalition(agents), inner.clone())
            .prop_map(|(y, f)| PathFormula::strat(y, TemporalFormula::Next(f))),
        1 => (arb_coalition(agents), inner.clone(), inner.clone())
            .prop_map(|(y, l, r)| PathFormula::strat(y, TemporalFormula::Until(l, r))),
        1 => (arb_coalition(agents), inner.clone(), inner)
            .prop_map(|(y, l, r)| PathFormula::strat(y, TemporalFormula::Release(l, r))),
    ]
    .boxed()
}

// Fault injection.

pub const FAULTS: [ViolationKind; 3] = [
    ViolationKind::MissingTransition,
    ViolationKind::ProtocolOutsideCapacities,
    ViolationKind::CapacityStarved,
];

fn joint_actions_of(g: &GameStructure, b: &upatl::model::GameBuilder, q: StateId) -> BTreeSet<JointAction> {
    g.agents()
        .map(|a| b.protocol(a, q).iter().copied().collect::<Vec<_>>())
        .multi_cartesian_product()
        .map(JointAction::new)
        .collect()
}

/// Makes the transitions at `q` match the builder's protocols exactly: new
/// joint actions get a random target, unavailable ones are dropped.
fn repair_transitions(g: &GameStructure, b: &mut upatl::model::GameBuilder, q: StateId, rng: &mut ChaCha8Rng) {
    let available = joint_actions_of(g, b, q);
    let defined: BTreeSet<JointAction> = b
        .transition_keys()
        .into_iter()
        .filter(|(s, _)| *s == q)
        .map(|(_, j)| j)
        .collect();
    for j in defined.difference(&available) {
        b.remove_transition(q, j);
    }
    for j in available.difference(&defined) {
        let t = StateId(rng.gen_range(0..g.state_count()));
        b.set_transition(q, j.clone(), t);
    }
}

/// One mutant of `g` carrying a single fault of class `fault`, or `None` if
/// `g` offers no site for it.
pub fn mutant(g: &GameStructure, fault: ViolationKind, rng: &mut ChaCha8Rng) -> Option<GameStructure> {
    let mut b = g.to_builder();
    match fault {
        ViolationKind::MissingTransition => {
            let (q, j) = b.transition_keys().into_iter().choose(rng)?;
            b.remove_transition(q, &j);
        }
        ViolationKind::ProtocolOutsideCapacities => {
            let a = g.agents().choose(rng)?;
            let q = g.states().choose(rng)?;
            let allowed: BTreeSet<ActionId> = g
                .capacities_of(a)
                .iter()
                .flat_map(|c| g.actions_of(*c).iter().copied())
                .collect();
            let outside: Vec<ActionId> = g.actions().filter(|x| !allowed.contains(x)).collect();
            let x = match outside.choose(rng) {
                Some(x) if rng.gen_bool(0.7) => *x,
                _ => b.add_action("rogue").ok()?,
            };
            let mut d = b.protocol(a, q).clone();
            d.insert(x);
            b.set_protocol(a, q, d);
            repair_transitions(g, &mut b, q, rng);
        }
        ViolationKind::CapacityStarved => {
            let sites: Vec<(AgentId, StateId, CapacityId)> = g
                .agents()
                .flat_map(|a| g.states().map(move |q| (a, q)))
                .flat_map(|(a, q)| g.capacities_of(a).iter().map(move |c| (a, q, *c)))
                .filter(|(a, q, c)| g.protocol(*a, *q).difference(g.actions_of(*c)).next().is_some())
                .collect();
            let (a, q, c) = *sites.choose(rng)?;
            let d: Vec<ActionId> = g.protocol(a, q).difference(g.actions_of(c)).copied().collect();
            b.set_protocol(a, q, d);
            repair_transitions(g, &mut b, q, rng);
        }
        _ => return None,
    }
    Some(b.build().expect("indices stay in range"))
}
