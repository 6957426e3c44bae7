use std::collections::{BTreeSet, VecDeque};

use itertools::Itertools;

use crate::formula::Coalition;
use crate::model::{ActionId, AgentId, GameStructure, JointAction, StateId};
use crate::trace::StrategyTree;

/// The coalition's joint choices at `q`, lexicographic by action index with
/// the first agent most significant. The empty coalition has one (empty)
/// choice.
pub(crate) fn coalition_choices(g: &GameStructure, q: StateId, agents: &[AgentId]) -> Vec<Vec<ActionId>> {
    if agents.is_empty() {
        return vec![Vec::new()];
    }
    agents
        .iter()
        .map(|a| g.protocol(*a, q).iter().copied())
        .multi_cartesian_product()
        .collect()
}

pub(crate) fn agrees(agents: &[AgentId], choice: &[ActionId], joint: &JointAction) -> bool {
    agents.iter().zip(choice).all(|(a, x)| joint.get(*a) == *x)
}

/// States reachable from `q` in one step when the coalition plays `choice`.
pub(crate) fn successors(
    g: &GameStructure,
    q: StateId,
    agents: &[AgentId],
    choice: &[ActionId],
) -> BTreeSet<StateId> {
    g.joint_actions(q)
        .expect("valid state")
        .iter()
        .filter(|j| agrees(agents, choice, j))
        .filter_map(|j| g.transition(q, j))
        .collect()
}

struct Node {
    history: Vec<StateId>,
    options: Vec<Vec<ActionId>>,
    choice: usize,
}

/// Lazy stream of the strategy trees of a coalition from a pivot, see
/// [`enumerate_strategy_trees`].
pub struct StrategyTrees<'g> {
    g: &'g GameStructure,
    pivot: StateId,
    agents: Vec<AgentId>,
    depth: usize,
    nodes: Vec<Node>,
    started: bool,
    done: bool,
}

/// Every strategy tree of `coalition` over the histories of length at most
/// `k` reachable from `pivot`. A tree only holds decisions at histories its
/// own earlier decisions can reach, so trees that differ only elsewhere are
/// produced once.
///
/// Order: decisions are listed breadth-first by history (shorter first, then
/// lexicographic by state index) and trees come out in lexicographic order of
/// that decision vector.
pub fn enumerate_strategy_trees<'g>(
    g: &'g GameStructure,
    pivot: StateId,
    coalition: &Coalition,
    k: usize,
) -> StrategyTrees<'g> {
    StrategyTrees {
        g,
        pivot,
        agents: coalition.agents().to_vec(),
        depth: k,
        nodes: Vec::new(),
        started: false,
        done: false,
    }
}

impl StrategyTrees<'_> {
    /// Rebuilds the node list keeping the given leading choices and
    /// defaulting every later node to its first option.
    fn layout(&mut self, fixed: &[usize]) {
        self.nodes.clear();
        if self.depth == 0 {
            return;
        }
        let mut queue = VecDeque::from([vec![self.pivot]]);
        while let Some(history) = queue.pop_front() {
            let q = *history.last().expect("nonempty");
            let options = coalition_choices(self.g, q, &self.agents);
            let choice = fixed.get(self.nodes.len()).copied().unwrap_or(0);
            if history.len() < self.depth {
                for t in successors(self.g, q, &self.agents, &options[choice]) {
                    let mut h = history.clone();
                    h.push(t);
                    queue.push_back(h);
                }
            }
            self.nodes.push(Node {
                history,
                options,
                choice,
            });
        }
    }

    fn tree(&self) -> StrategyTree {
        let mut tree = StrategyTree::new(self.agents.iter().copied(), self.pivot, self.depth);
        if !self.agents.is_empty() {
            for n in &self.nodes {
                tree.decide(n.history.clone(), n.options[n.choice].clone());
            }
        }
        tree
    }
}

impl Iterator for StrategyTrees<'_> {
    type Item = StrategyTree;

    fn next(&mut self) -> Option<StrategyTree> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            self.layout(&[]);
            return Some(self.tree());
        }
        let Some(p) = self
            .nodes
            .iter()
            .rposition(|n| n.choice + 1 < n.options.len())
        else {
            self.done = true;
            return None;
        };
        let mut fixed: Vec<usize> = self.nodes[..p].iter().map(|n| n.choice).collect();
        fixed.push(self.nodes[p].choice + 1);
        self.layout(&fixed);
        Some(self.tree())
    }
}
