mod support;

use std::collections::BTreeSet;

use proptest::prelude::*;
use rand::seq::{IteratorRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use support::*;
use upatl::checker::{eval_knowledge, eval_path_formula, eval_temporal, EvalContext, Verdict};
use upatl::formula::{parse_formula, render_formula, PathFormula, TemporalFormula};
use upatl::model::{AgentId, GameStructure};
use upatl::oracle::{brute_force_eval, generate_random_game, GeneratorParams};
use upatl::trace::{compatible_assignments, indistinguishability_class, indistinguishable, Path};

fn game(seed: u64) -> GameStructure {
    generate_random_game(&GeneratorParams::sampled(seed))
}

/// A sampled game together with a random formula over it.
fn game_and_formula(depth: u32) -> impl Strategy<Value = (GameStructure, PathFormula, u64)> {
    (0u64..300).prop_flat_map(move |seed| {
        let g = game(seed);
        (Just(g.clone()), arb_formula(&g, depth), any::<u64>())
    })
}

/// A random walk through `g` and a position in it.
fn walk(g: &GameStructure, rng: &mut ChaCha8Rng, max_steps: usize) -> (Path, usize) {
    let q = g.states().choose(rng).unwrap();
    let steps = rng.gen_range(0..=max_steps);
    let p = random_walk(g, q, steps, rng);
    let i = rng.gen_range(1..=p.len());
    (p, i)
}

fn temporal_parts(f: &PathFormula) -> Option<(&PathFormula, &PathFormula)> {
    match f {
        PathFormula::Strat(_, t) => match t.as_ref() {
            TemporalFormula::Until(l, r) | TemporalFormula::Release(l, r) => Some((l, r)),
            TemporalFormula::Next(_) => None,
        },
        _ => None,
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 1000, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn formulas_round_trip((g, f, _) in game_and_formula(5)) {
        let text = render_formula(&f, &g);
        prop_assert_eq!(parse_formula(&text, &g).unwrap(), f, "{}", text);
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 300, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn compatible_sets_shrink_along_a_path(seed in 0u64..300, walk_seed: u64) {
        let g = game(seed);
        let mut rng = ChaCha8Rng::seed_from_u64(walk_seed);
        let (p, _) = walk(&g, &mut rng, 4);
        for n in 1..p.len() {
            let shorter = compatible_assignments(&g, &p.prefix(n));
            let longer = compatible_assignments(&g, &p.prefix(n + 1));
            prop_assert!(longer.is_subset(&shorter));
        }
    }

    #[test]
    fn extension_filters_by_the_last_joint_action(seed in 0u64..300, walk_seed: u64) {
        let g = game(seed);
        let mut rng = ChaCha8Rng::seed_from_u64(walk_seed);
        let (p, _) = walk(&g, &mut rng, 3);
        for j in g.joint_actions(p.last()).unwrap() {
            let next = p.extended(j.clone(), g.transition(p.last(), &j).unwrap());
            let expected: BTreeSet<_> = compatible_assignments(&g, &p)
                .into_iter()
                .filter(|l| g.agents().all(|a| g.actions_of(l.get(a).unwrap()).contains(&j.get(a))))
                .collect();
            prop_assert_eq!(compatible_assignments(&g, &next), expected);
        }
    }

    #[test]
    fn indistinguishability_is_an_equivalence(seed in 0u64..300, walk_seed: u64) {
        let g = game(seed);
        let mut rng = ChaCha8Rng::seed_from_u64(walk_seed);
        let (p, _) = walk(&g, &mut rng, 3);
        let a = g.agents().choose(&mut rng).unwrap();
        let class = indistinguishability_class(&g, &p, a);
        let pick = |rng: &mut ChaCha8Rng| class.iter().choose(rng).unwrap().clone();
        let (x, y) = (pick(&mut rng), pick(&mut rng));
        prop_assert!(indistinguishable(&p, &p, a).unwrap());
        prop_assert!(indistinguishable(&x, &p, a).unwrap());
        prop_assert!(indistinguishable(&x, &y, a).unwrap());
        let other = random_walk(&g, p.first(), p.steps(), &mut rng);
        prop_assert_eq!(indistinguishable(&p, &other, a).unwrap(), class.contains(&other));
        prop_assert_eq!(
            indistinguishable(&p, &other, a).unwrap(),
            indistinguishable(&other, &p, a).unwrap()
        );
    }

    #[test]
    fn knowledge_reads_only_the_prefix((g, phi, walk_seed) in (0u64..300).prop_flat_map(|seed| {
        let g = game(seed);
        let caps = arb_cap_formula(g.agent_count(), g.capacity_count());
        (Just(g), caps, any::<u64>())
    })) {
        let mut rng = ChaCha8Rng::seed_from_u64(walk_seed);
        let (p, i) = walk(&g, &mut rng, 3);
        let a = AgentId(rng.gen_range(0..g.agent_count()));
        let here = eval_knowledge(&g, &p, i, a, &phi).unwrap();
        prop_assert_eq!(here, eval_knowledge(&g, &p.prefix(i), i, a, &phi).unwrap());
        // Literal reading: every assignment compatible with an indistinguishable prefix.
        let literal = indistinguishability_class(&g, &p.prefix(i), a).iter().all(|o| {
            compatible_assignments(&g, o)
                .iter()
                .all(|l| upatl::checker::eval_cap_formula(l, &phi))
        });
        prop_assert_eq!(here, literal);
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 200, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn verdicts_ignore_the_ambient_assignment((g, f, walk_seed) in game_and_formula(3), k in 0usize..3) {
        let mut rng = ChaCha8Rng::seed_from_u64(walk_seed);
        let (p, i) = walk(&g, &mut rng, 2);
        let verdicts: BTreeSet<Verdict> = complete_assignments(&g)
            .into_iter()
            .map(|l| eval_path_formula(&EvalContext::new(&g, p.clone(), i, l, k).unwrap(), &f).unwrap())
            .collect();
        prop_assert_eq!(verdicts.len(), 1);
    }

    // Only without hidden capacities: otherwise a coalition can prune its own
    // losing branches one step later (see `self_pruning_breaks_monotonicity`).
    #[test]
    fn conclusive_verdicts_are_stable((g, f, walk_seed) in (0u64..300).prop_flat_map(|seed| {
        let g = generate_random_game(&GeneratorParams { capacities_per_agent: 1, ..GeneratorParams::sampled(seed) });
        (Just(g.clone()), arb_formula(&g, 3), any::<u64>())
    })) {
        let mut rng = ChaCha8Rng::seed_from_u64(walk_seed);
        let (p, i) = walk(&g, &mut rng, 2);
        let l = complete_assignments(&g).swap_remove(0);
        let verdicts: Vec<Verdict> = (0..4)
            .map(|k| eval_path_formula(&EvalContext::new(&g, p.clone(), i, l.clone(), k).unwrap(), &f).unwrap())
            .collect();
        for w in verdicts.windows(2) {
            prop_assert!(!w[0].is_conclusive() || w[0] == w[1], "{:?}", verdicts);
        }
    }

    #[test]
    fn release_is_dual_to_until((g, f, walk_seed) in game_and_formula(2), k in 0usize..4) {
        let Some((l, r)) = temporal_parts(&f) else { return Ok(()) };
        let mut rng = ChaCha8Rng::seed_from_u64(walk_seed);
        let (p, i) = walk(&g, &mut rng, 2);
        let lambda = complete_assignments(&g).swap_remove(0);
        let ctx = EvalContext::new(&g, p.clone(), i, lambda, k).unwrap();
        let tail = random_walk(&g, p.prefix(i).last(), k, &mut rng);
        let mut outcome = p.prefix(i);
        for (j, q) in tail.actions().iter().zip(&tail.states()[1..]) {
            outcome.push(j.clone(), *q);
        }
        let release = TemporalFormula::Release(l.clone(), r.clone());
        let until = TemporalFormula::Until(PathFormula::not(l.clone()), PathFormula::not(r.clone()));
        prop_assert_eq!(
            eval_temporal(&ctx, &release, &outcome).unwrap(),
            !eval_temporal(&ctx, &until, &outcome).unwrap()
        );
    }

    #[test]
    fn checker_matches_oracle_inside_paths((g, f, walk_seed) in game_and_formula(2), k in 0usize..3) {
        let mut rng = ChaCha8Rng::seed_from_u64(walk_seed);
        let (p, i) = walk(&g, &mut rng, 2);
        let lambda = complete_assignments(&g).choose(&mut rng).unwrap().clone();
        let ours = eval_path_formula(&EvalContext::new(&g, p.clone(), i, lambda.clone(), k).unwrap(), &f).unwrap();
        let theirs = brute_force_eval(&g, &p, i, &lambda, &f, k).unwrap();
        prop_assert_eq!(ours, theirs, "{} at {} i={}", render_formula(&f, &g), p.display(&g), i);
    }
}

#[test]
fn self_pruning_breaks_monotonicity() {
    let g = generate_random_game(&GeneratorParams::sampled(2006));
    let f = parse_formula("<<ag0, ag1>> N p0", &g).unwrap();
    let q1 = g.state_id("q1").unwrap();
    let lambda = complete_assignments(&g).swap_remove(0);
    let at = |k| upatl::checker::check_state(&g, q1, &f, k);
    assert_eq!(at(1), Verdict::False);
    assert_eq!(at(2), Verdict::True);
    for k in 1..=2 {
        assert_eq!(brute_force_eval(&g, &Path::new(q1), 1, &lambda, &f, k).unwrap(), at(k));
    }
}
