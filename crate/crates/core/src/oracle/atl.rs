//! Classical ATL model checking by fixed points, for structures in which
//! every agent has a single capacity.

use std::collections::BTreeSet;

use super::OracleError;
use crate::formula::{PathFormula, TemporalFormula};
use crate::model::{ActionId, AgentId, GameStructure, JointAction, StateId};

type States = BTreeSet<StateId>;

/// States where `agents` have a joint choice such that every completion by
/// the other agents leads into `target`.
fn pre(g: &GameStructure, agents: &[AgentId], target: &States) -> States {
    g.states()
        .filter(|&q| {
            let profiles: Vec<Vec<ActionId>> = g
                .agents()
                .map(|a| g.protocol(a, q).iter().copied().collect())
                .collect();
            let mut joints: Vec<Vec<ActionId>> = vec![Vec::new()];
            for options in &profiles {
                joints = joints
                    .iter()
                    .flat_map(|p| {
                        options.iter().map(move |x| {
                            let mut v = p.clone();
                            v.push(*x);
                            v
                        })
                    })
                    .collect();
            }
            let own = |xs: &Vec<ActionId>| -> Vec<ActionId> {
                agents.iter().map(|a| xs[a.index()]).collect()
            };
            let choices: BTreeSet<Vec<ActionId>> = joints.iter().map(own).collect();
            choices.iter().any(|c| {
                joints.iter().filter(|xs| own(xs) == *c).all(|xs| {
                    g.transition(q, &JointAction::new(xs.clone()))
                        .is_some_and(|t| target.contains(&t))
                })
            })
        })
        .collect()
}

fn sat(g: &GameStructure, f: &PathFormula) -> Result<States, OracleError> {
    let all: States = g.states().collect();
    Ok(match f {
        PathFormula::Atom(p) => all.into_iter().filter(|q| g.has_label(*q, *p)).collect(),
        PathFormula::Know(..) => return Err(OracleError::Fragment("knowledge operator")),
        PathFormula::Not(x) => all.difference(&sat(g, x)?).copied().collect(),
        PathFormula::And(l, r) => sat(g, l)?.intersection(&sat(g, r)?).copied().collect(),
        PathFormula::Strat(y, t) => {
            let y = y.agents();
            match t.as_ref() {
                TemporalFormula::Next(x) => pre(g, y, &sat(g, x)?),
                TemporalFormula::Until(l, r) => {
                    let (l, r) = (sat(g, l)?, sat(g, r)?);
                    let mut z = States::new();
                    loop {
                        let p = pre(g, y, &z);
                        let next: States = r.union(&l.intersection(&p).copied().collect()).copied().collect();
                        if next == z {
                            break z;
                        }
                        z = next;
                    }
                }
                TemporalFormula::Release(l, r) => {
                    let (l, r) = (sat(g, l)?, sat(g, r)?);
                    let mut z = all;
                    loop {
                        let p = pre(g, y, &z);
                        let next: States = r.intersection(&l.union(&p).copied().collect()).copied().collect();
                        if next == z {
                            break z;
                        }
                        z = next;
                    }
                }
            }
        }
    })
}

/// The states satisfying `phi` under ordinary ATL semantics.
pub fn atl_fixed_point(g: &GameStructure, phi: &PathFormula) -> Result<BTreeSet<StateId>, OracleError> {
    if let Some(a) = g.agents().find(|a| g.capacities_of(*a).len() != 1) {
        return Err(OracleError::NotCapacityFree(g.agent_name(a).to_string()));
    }
    sat(g, phi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse_formula;
    use crate::gamespec::load_game;

    const CYCLE: &str = "game cycle
agents: one
capacities:
  one: only
actions:
  only: stay, go
states: A, B
props: p
labels:
  A:
  B: p
protocol:
  one @ A: stay, go
  one @ B: stay
transitions:
  A (stay) -> A
  A (go) -> B
  B (stay) -> B
";

    #[test]
    fn two_state_cycle() {
        let g = load_game(CYCLE).unwrap();
        let f = |t: &str| atl_fixed_point(&g, &parse_formula(t, &g).unwrap()).unwrap();
        let a = g.state_id("A").unwrap();
        let b = g.state_id("B").unwrap();
        assert_eq!(f("<<one>> F p"), States::from([a, b]));
        assert_eq!(f("<<>> F p"), States::from([b]));
        assert_eq!(f("<<>> N p"), States::from([b]));
        assert_eq!(f("<<one>> N p"), States::from([a, b]));
        assert_eq!(f("<<one>> G !p"), States::from([a]));
        assert_eq!(f("<<>> G p"), States::from([b]));
    }

    #[test]
    fn rejects_capacities_and_knowledge() {
        let hand = crate::fixtures::hand();
        let f = parse_formula("start", &hand).unwrap();
        assert!(matches!(atl_fixed_point(&hand, &f), Err(OracleError::NotCapacityFree(_))));
        let g = load_game(CYCLE).unwrap();
        let k = parse_formula("K[one](one=only)", &g).unwrap();
        assert!(matches!(atl_fixed_point(&g, &k), Err(OracleError::Fragment(_))));
    }
}
