use itertools::Itertools;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::model::{ActionId, GameBuilder, GameStructure, JointAction};

/// Shape of a random game. Counts are exact; the bounds keep instances small
/// enough for exhaustive enumeration.
#[derive(Clone, Debug, PartialEq)]
pub struct GeneratorParams {
    pub seed: u64,
    /// 1 to 5
    pub states: usize,
    /// 1 to 3
    pub agents: usize,
    /// 1 to 2; 1 gives a structure without hidden capacities
    pub capacities_per_agent: usize,
    /// 1 to 2
    pub actions_per_capacity: usize,
    /// Chance of each (state, proposition) label.
    pub label_density: f64,
    /// Number of propositions, 1 to 3.
    pub props: usize,
    /// Chance of each extra protocol action beyond the one per capacity that
    /// the progression condition requires.
    pub protocol_density: f64,
}

impl Default for GeneratorParams {
    fn default() -> Self {
        GeneratorParams {
            seed: 0,
            states: 3,
            agents: 2,
            capacities_per_agent: 2,
            actions_per_capacity: 2,
            label_density: 0.4,
            props: 2,
            protocol_density: 0.3,
        }
    }
}

impl GeneratorParams {
    /// Parameters drawn at random within the bounds, reproducible from `seed`.
    pub fn sampled(seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
        GeneratorParams {
            seed,
            states: rng.gen_range(1..=5),
            agents: rng.gen_range(1..=3),
            capacities_per_agent: rng.gen_range(1..=2),
            actions_per_capacity: rng.gen_range(1..=2),
            label_density: rng.gen_range(0.2..0.7),
            props: rng.gen_range(1..=3),
            protocol_density: rng.gen_range(0.0..0.6),
        }
    }

    fn clamped(&self) -> Self {
        GeneratorParams {
            states: self.states.clamp(1, 5),
            agents: self.agents.clamp(1, 3),
            capacities_per_agent: self.capacities_per_agent.clamp(1, 2),
            actions_per_capacity: self.actions_per_capacity.clamp(1, 2),
            label_density: self.label_density.clamp(0.0, 1.0),
            props: self.props.clamp(1, 3),
            protocol_density: self.protocol_density.clamp(0.0, 1.0),
            ..*self
        }
    }
}

/// A random valid game. Names: agents `ag0…`, capacities `c<agent>_<n>`,
/// actions `x<agent>_<n>`, states `q0…`, propositions `p0…`; `q0` is the
/// initial state. Out-of-range counts are clamped.
pub fn generate_random_game(params: &GeneratorParams) -> GameStructure {
    let p = params.clamped();
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let mut b = GameBuilder::new(format!("random{}", p.seed));

    let states: Vec<_> = (0..p.states)
        .map(|i| b.add_state(&format!("q{i}")).expect("fresh"))
        .collect();
    let props: Vec<_> = (0..p.props)
        .map(|i| b.add_prop(&format!("p{i}")).expect("fresh"))
        .collect();
    for &q in &states {
        for &pr in &props {
            if rng.gen_bool(p.label_density) {
                b.label(q, pr);
            }
        }
    }

    let pool = p.capacities_per_agent * p.actions_per_capacity;
    let mut agents = Vec::new();
    // Per agent: the actions of each capacity.
    let mut repertoires: Vec<Vec<Vec<ActionId>>> = Vec::new();
    for i in 0..p.agents {
        let a = b.add_agent(&format!("ag{i}")).expect("fresh");
        agents.push(a);
        let picks: Vec<Vec<usize>> = (0..p.capacities_per_agent)
            .map(|_| {
                let mut idx: Vec<usize> = (0..pool).collect();
                idx.shuffle(&mut rng);
                let mut chosen = idx[..p.actions_per_capacity].to_vec();
                chosen.sort_unstable();
                chosen
            })
            .collect();
        let used: Vec<usize> = picks.iter().flatten().copied().sorted().dedup().collect();
        let ids: Vec<ActionId> = used
            .iter()
            .map(|n| b.add_action(&format!("x{i}_{n}")).expect("fresh"))
            .collect();
        let id_of = |n: usize| ids[used.iter().position(|u| *u == n).expect("used")];
        let mut caps = Vec::new();
        for (j, chosen) in picks.iter().enumerate() {
            let c = b.add_capacity(&format!("c{i}_{j}")).expect("fresh");
            b.grant(a, c);
            let xs: Vec<ActionId> = chosen.iter().map(|n| id_of(*n)).collect();
            for x in &xs {
                b.allow(c, *x);
            }
            caps.push(xs);
        }
        repertoires.push(caps);
    }

    // Protocol: one action from every capacity, then extras.
    for &q in &states {
        for (i, &a) in agents.iter().enumerate() {
            let caps = &repertoires[i];
            let mut d: Vec<ActionId> = caps
                .iter()
                .map(|xs| *xs.choose(&mut rng).expect("nonempty capacity"))
                .collect();
            let all: Vec<ActionId> = caps.iter().flatten().copied().sorted().dedup().collect();
            for x in all {
                if !d.contains(&x) && rng.gen_bool(p.protocol_density) {
                    d.push(x);
                }
            }
            b.set_protocol(a, q, d);
        }
    }

    for &q in &states {
        let options: Vec<Vec<ActionId>> = agents
            .iter()
            .map(|a| b.protocol(*a, q).iter().copied().collect())
            .collect();
        for joint in options.into_iter().multi_cartesian_product() {
            let t = states[rng.gen_range(0..states.len())];
            b.set_transition(q, JointAction::new(joint), t);
        }
    }
    b.set_init(Some(states[0]));
    b.build().expect("generated structure is well formed")
}
