//! Machine-readable output. Strategy trees are written as nested decision
//! maps keyed by state name, starting at the pivot:
//!
//! ```json
//! {"coalition": ["opp"], "pivot": "s0", "depth": 2,
//!  "decisions": {"s0": {"actions": {"opp": "swingL"},
//!                       "next": {"s1": {"actions": {"opp": "serve"}, "next": {}}}}}}
//! ```
//!
//! The same document is accepted by `outcomes --strategy`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use upatl::checker::{CheckResult, Witness};
use upatl::model::{ActionId, GameStructure, StateId};
use upatl::trace::StrategyTree;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub verdict: String,
    pub horizon: usize,
    pub state: String,
    pub formula: String,
    pub witness: Option<WitnessRecord>,
    pub elapsed_ms: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum WitnessRecord {
    Winning {
        strategy: TreeRecord,
    },
    Falsifying {
        strategy: TreeRecord,
        /// `None` when the strategy has no outcome at all.
        outcome: Option<String>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TreeRecord {
    pub coalition: Vec<String>,
    pub pivot: String,
    pub depth: usize,
    pub decisions: BTreeMap<String, Node>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Node {
    pub actions: BTreeMap<String, String>,
    #[serde(default)]
    pub next: BTreeMap<String, Node>,
}

impl CheckRecord {
    pub fn new(g: &GameStructure, state: StateId, formula: String, k: usize, r: &CheckResult, elapsed_ms: f64) -> Self {
        CheckRecord {
            verdict: r.verdict.to_string(),
            horizon: k,
            state: g.state_name(state).to_string(),
            formula,
            witness: r.witness.as_ref().map(|w| WitnessRecord::new(g, w)),
            elapsed_ms,
        }
    }
}

impl WitnessRecord {
    fn new(g: &GameStructure, w: &Witness) -> Self {
        match w {
            Witness::Winning(t) => WitnessRecord::Winning {
                strategy: TreeRecord::new(g, t),
            },
            Witness::Falsifying { strategy, outcome } => WitnessRecord::Falsifying {
                strategy: TreeRecord::new(g, strategy),
                outcome: outcome.as_ref().map(|p| p.display(g).to_string()),
            },
        }
    }
}

impl TreeRecord {
    pub fn new(g: &GameStructure, t: &StrategyTree) -> Self {
        let mut decisions = BTreeMap::new();
        if let Some(node) = node_at(g, t, &[t.pivot()]) {
            decisions.insert(g.state_name(t.pivot()).to_string(), node);
        }
        TreeRecord {
            coalition: t.coalition().iter().map(|a| g.agent_name(*a).to_string()).collect(),
            pivot: g.state_name(t.pivot()).to_string(),
            depth: t.depth(),
            decisions,
        }
    }

    /// Resolves names against `g`.
    pub fn to_tree(&self, g: &GameStructure) -> Result<StrategyTree, String> {
        let agents = self
            .coalition
            .iter()
            .map(|a| g.agent_id(a).ok_or(format!("unknown agent `{a}`")))
            .collect::<Result<Vec<_>, _>>()?;
        let pivot = g
            .state_id(&self.pivot)
            .ok_or(format!("unknown state `{}`", self.pivot))?;
        let mut tree = StrategyTree::new(agents.iter().copied(), pivot, self.depth);
        let mut pending: Vec<(Vec<StateId>, &Node)> = Vec::new();
        for (name, node) in &self.decisions {
            let q = g.state_id(name).ok_or(format!("unknown state `{name}`"))?;
            if q != pivot {
                return Err(format!("the decision map must start at the pivot `{}`", self.pivot));
            }
            pending.push((vec![q], node));
        }
        while let Some((history, node)) = pending.pop() {
            let mut actions = Vec::new();
            for a in tree.coalition() {
                let name = g.agent_name(*a);
                let x = node
                    .actions
                    .get(name)
                    .ok_or(format!("no action for `{name}` after {}", names(g, &history)))?;
                let x: ActionId = g.action_id(x).ok_or(format!("unknown action `{x}`"))?;
                actions.push(x);
            }
            if node.actions.len() != actions.len() {
                return Err(format!("actions for agents outside the coalition after {}", names(g, &history)));
            }
            for (name, child) in &node.next {
                let q = g.state_id(name).ok_or(format!("unknown state `{name}`"))?;
                let mut h = history.clone();
                h.push(q);
                pending.push((h, child));
            }
            tree.decide(history, actions);
        }
        Ok(tree)
    }
}

fn names(g: &GameStructure, h: &[StateId]) -> String {
    h.iter().map(|q| g.state_name(*q)).collect::<Vec<_>>().join(" ")
}

fn node_at(g: &GameStructure, t: &StrategyTree, history: &[StateId]) -> Option<Node> {
    let actions = t.decisions().get(history)?;
    let next = t
        .decisions()
        .keys()
        .filter(|h| h.len() == history.len() + 1 && h.starts_with(history))
        .filter_map(|h| {
            let q = *h.last().expect("nonempty");
            node_at(g, t, h).map(|n| (g.state_name(q).to_string(), n))
        })
        .collect();
    Some(Node {
        actions: t
            .coalition()
            .iter()
            .zip(actions)
            .map(|(a, x)| (g.agent_name(*a).to_string(), g.action_name(*x).to_string()))
            .collect(),
        next,
    })
}

/// Indented text form, one line per decision.
pub fn describe_tree(g: &GameStructure, t: &StrategyTree) -> String {
    let mut out = String::new();
    for (h, xs) in t.decisions() {
        let moves: Vec<String> = t
            .coalition()
            .iter()
            .zip(xs)
            .map(|(a, x)| format!("{}={}", g.agent_name(*a), g.action_name(*x)))
            .collect();
        out.push_str(&format!("  {}{}: {}\n", "  ".repeat(h.len() - 1), names(g, h), moves.join(", ")));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use upatl::checker::check;
    use upatl::formula::parse_formula;

    #[test]
    fn records_round_trip() {
        let g = upatl::fixtures::hand();
        let s0 = g.state_id("s0").unwrap();
        for (text, k) in [("<<opp>> F rightHit", 3), ("<<opp>> N (leftHit & rightHit)", 1), ("<<>> G start", 2)] {
            let r = check(&g, s0, &parse_formula(text, &g).unwrap(), k).unwrap();
            let rec = CheckRecord::new(&g, s0, text.into(), k, &r, 1.5);
            let back: CheckRecord = serde_json::from_str(&serde_json::to_string(&rec).unwrap()).unwrap();
            assert_eq!(back, rec);
            let tree = match &r.witness {
                Some(Witness::Winning(t)) | Some(Witness::Falsifying { strategy: t, .. }) => t,
                None => panic!("{text} has a witness"),
            };
            assert_eq!(&TreeRecord::new(&g, tree).to_tree(&g).unwrap(), tree);
        }
    }

    #[test]
    fn rejects_foreign_names() {
        let g = upatl::fixtures::hand();
        let rec: TreeRecord = serde_json::from_str(
            r#"{"coalition": ["opp"], "pivot": "s0", "depth": 1,
                "decisions": {"s0": {"actions": {"opp": "jump"}}}}"#,
        )
        .unwrap();
        assert!(rec.to_tree(&g).unwrap_err().contains("jump"));
    }
}
