//! Direct transcription of the satisfaction relation. Every set the
//! definitions mention is built explicitly: the paths an agent cannot tell
//! apart, all complete assignments, all strategy trees and all of their
//! outcomes.

use std::collections::{BTreeMap, HashMap};
use std::rc::Rc;

use super::OracleError;
use crate::checker::Verdict;
use crate::formula::{CapFormula, PathFormula, TemporalFormula};
use crate::model::{ActionId, AgentId, CapacityId, GameStructure, JointAction, StateId};
use crate::trace::{CapacityAssignment, Path};

/// Work units (paths, trees, outcomes, assignments visited) before giving up.
pub const DEFAULT_BUDGET: u64 = 200_000_000;

type Tree = BTreeMap<Vec<StateId>, Vec<ActionId>>;

struct Oracle<'g> {
    g: &'g GameStructure,
    k: usize,
    budget: u64,
    memo: HashMap<(usize, Vec<usize>), Verdict>,
    consistent: HashMap<Path, bool>,
    joints: HashMap<StateId, Rc<[JointAction]>>,
    forests: HashMap<(StateId, Vec<AgentId>), Rc<Vec<Tree>>>,
}

fn and(a: Verdict, b: Verdict) -> Verdict {
    match (a, b) {
        (Verdict::False, _) | (_, Verdict::False) => Verdict::False,
        (Verdict::True, Verdict::True) => Verdict::True,
        _ => Verdict::Unknown,
    }
}

fn or(a: Verdict, b: Verdict) -> Verdict {
    match (a, b) {
        (Verdict::True, _) | (_, Verdict::True) => Verdict::True,
        (Verdict::False, Verdict::False) => Verdict::False,
        _ => Verdict::Unknown,
    }
}

fn neg(a: Verdict) -> Verdict {
    match a {
        Verdict::True => Verdict::False,
        Verdict::False => Verdict::True,
        Verdict::Unknown => Verdict::Unknown,
    }
}

/// The first `i` states of `rho` and the actions between them, flattened.
fn memo_key(f: &PathFormula, rho: &Path, i: usize) -> (usize, Vec<usize>) {
    let mut key: Vec<usize> = rho.states()[..i].iter().map(|q| q.index()).collect();
    for joint in &rho.actions()[..i - 1] {
        key.extend(joint.as_slice().iter().map(|x| x.index()));
    }
    (f as *const PathFormula as usize, key)
}

fn cap_holds(lambda: &[CapacityId], f: &CapFormula) -> bool {
    match f {
        CapFormula::HasCap(a, c) => lambda[a.index()] == *c,
        CapFormula::Not(x) => !cap_holds(lambda, x),
        CapFormula::And(l, r) => cap_holds(lambda, l) && cap_holds(lambda, r),
    }
}

impl Oracle<'_> {
    fn spend(&mut self, units: u64) -> Result<(), OracleError> {
        if self.budget < units {
            return Err(OracleError::Budget);
        }
        self.budget -= units;
        Ok(())
    }

    fn all_joint_actions(&mut self, q: StateId) -> Rc<[JointAction]> {
        if let Some(v) = self.joints.get(&q) {
            return Rc::clone(v);
        }
        let mut out = vec![Vec::new()];
        for a in self.g.agents() {
            let mut next = Vec::new();
            for prefix in &out {
                for x in self.g.protocol(a, q) {
                    let mut v = prefix.clone();
                    v.push(*x);
                    next.push(v);
                }
            }
            out = next;
        }
        let out: Rc<[JointAction]> = out.into_iter().map(JointAction::new).collect();
        self.joints.insert(q, Rc::clone(&out));
        out
    }

    fn all_assignments(&self) -> Vec<Vec<CapacityId>> {
        let mut out = vec![Vec::new()];
        for a in self.g.agents() {
            let mut next = Vec::new();
            for prefix in &out {
                for c in self.g.capacities_of(a) {
                    let mut v = prefix.clone();
                    v.push(*c);
                    next.push(v);
                }
            }
            out = next;
        }
        out
    }

    /// `F(ρ)`, by filtering every complete assignment.
    fn compatible(&mut self, rho: &Path) -> Result<Vec<Vec<CapacityId>>, OracleError> {
        let all = self.all_assignments();
        self.spend(all.len() as u64)?;
        Ok(all
            .into_iter()
            .filter(|lambda| {
                rho.actions().iter().all(|joint| {
                    self.g
                        .agents()
                        .all(|a| self.g.actions_of(lambda[a.index()]).contains(&joint.get(a)))
                })
            })
            .collect())
    }

    /// Paths `ρ'` with `ρ' ∼_a ρ`: the same states, and the same action of
    /// `a` at every step.
    fn similar(&mut self, rho: &Path, a: AgentId) -> Result<Vec<Path>, OracleError> {
        let mut paths = vec![Path::new(rho.first())];
        for (n, own) in rho.actions().iter().enumerate() {
            let target = rho.states()[n + 1];
            let mut next = Vec::new();
            for p in &paths {
                for joint in self.all_joint_actions(p.last()).iter() {
                    if joint.get(a) == own.get(a) && self.g.transition(p.last(), joint) == Some(target) {
                        next.push(p.extended(joint.clone(), target));
                    }
                }
            }
            self.spend(next.len() as u64)?;
            paths = next;
        }
        Ok(paths)
    }

    fn knows(&mut self, rho: &Path, a: AgentId, phi: &CapFormula) -> Result<bool, OracleError> {
        for other in self.similar(rho, a)? {
            for lambda in self.compatible(&other)? {
                if !cap_holds(&lambda, phi) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    fn eval(&mut self, rho: &Path, i: usize, f: &PathFormula) -> Result<Verdict, OracleError> {
        let state = rho.states()[i - 1];
        Ok(match f {
            PathFormula::Atom(p) => {
                if p.is_top() || self.g.labels(state).contains(p) {
                    Verdict::True
                } else {
                    Verdict::False
                }
            }
            PathFormula::Not(x) => neg(self.eval(rho, i, x)?),
            PathFormula::And(l, r) => and(self.eval(rho, i, l)?, self.eval(rho, i, r)?),
            PathFormula::Know(a, phi) => {
                let key = memo_key(f, rho, i);
                if let Some(v) = self.memo.get(&key) {
                    return Ok(*v);
                }
                let v = if self.knows(&rho.prefix(i), *a, phi)? {
                    Verdict::True
                } else {
                    Verdict::False
                };
                self.memo.insert(key, v);
                v
            }
            PathFormula::Strat(y, t) => {
                let key = memo_key(f, rho, i);
                if let Some(v) = self.memo.get(&key) {
                    return Ok(*v);
                }
                let v = self.strategic(&rho.prefix(i), y.agents(), t)?;
                self.memo.insert(key, v);
                v
            }
        })
    }

    /// All strategy trees: one coalition choice per history reachable under
    /// the tree's own earlier choices, up to `k` states.
    fn trees(&mut self, pivot: StateId, agents: &[AgentId]) -> Result<Rc<Vec<Tree>>, OracleError> {
        let key = (pivot, agents.to_vec());
        if let Some(trees) = self.forests.get(&key) {
            return Ok(Rc::clone(trees));
        }
        let trees = Rc::new(self.build_trees(pivot, agents)?);
        self.forests.insert(key, Rc::clone(&trees));
        Ok(trees)
    }

    fn build_trees(&mut self, pivot: StateId, agents: &[AgentId]) -> Result<Vec<Tree>, OracleError> {
        let mut done = Vec::new();
        if self.k == 0 {
            done.push(Tree::new());
            return Ok(done);
        }
        let mut stack = vec![(Tree::new(), vec![vec![pivot]])];
        while let Some((tree, mut pending)) = stack.pop() {
            self.spend(1)?;
            let Some(h) = pending.pop() else {
                done.push(tree);
                continue;
            };
            let q = *h.last().unwrap();
            let mut options = vec![Vec::new()];
            for a in agents {
                let mut next = Vec::new();
                for prefix in &options {
                    for x in self.g.protocol(*a, q) {
                        let mut v: Vec<ActionId> = prefix.clone();
                        v.push(*x);
                        next.push(v);
                    }
                }
                options = next;
            }
            for choice in options {
                let mut tree = tree.clone();
                let mut pending = pending.clone();
                if h.len() < self.k {
                    let mut targets: Vec<StateId> = Vec::new();
                    for joint in self.all_joint_actions(q).iter() {
                        if agents.iter().zip(&choice).any(|(a, x)| joint.get(*a) != *x) {
                            continue;
                        }
                        if let Some(t) = self.g.transition(q, joint) {
                            if !targets.contains(&t) {
                                targets.push(t);
                            }
                        }
                    }
                    for t in targets {
                        let mut h2 = h.clone();
                        h2.push(t);
                        pending.push(h2);
                    }
                }
                tree.insert(h.clone(), choice);
                stack.push((tree, pending));
            }
        }
        Ok(done)
    }

    /// Whether some complete assignment is compatible with `p`.
    fn alive(&mut self, p: &Path) -> Result<bool, OracleError> {
        if let Some(ok) = self.consistent.get(p) {
            return Ok(*ok);
        }
        let ok = !self.compatible(p)?.is_empty();
        self.consistent.insert(p.clone(), ok);
        Ok(ok)
    }

    /// Extensions are dropped as soon as a prefix loses every compatible
    /// assignment, which is the same as filtering complete outcomes on all
    /// of their prefixes.
    fn outcomes(&mut self, rho: &Path, agents: &[AgentId], tree: &Tree) -> Result<Vec<Path>, OracleError> {
        for n in 1..=rho.len() {
            if !self.alive(&rho.prefix(n))? {
                return Ok(Vec::new());
            }
        }
        let mut out = Vec::new();
        let mut path = rho.clone();
        self.extend_outcomes(&mut path, rho.len(), agents, tree, &mut out)?;
        Ok(out)
    }

    fn extend_outcomes(
        &mut self,
        path: &mut Path,
        start: usize,
        agents: &[AgentId],
        tree: &Tree,
        out: &mut Vec<Path>,
    ) -> Result<(), OracleError> {
        self.spend(1)?;
        if path.len() == start + self.k {
            out.push(path.clone());
            return Ok(());
        }
        let q = path.last();
        let choice = &tree[&path.states()[start - 1..]];
        for joint in self.all_joint_actions(q).iter() {
            if agents.iter().zip(choice).any(|(a, x)| joint.get(*a) != *x) {
                continue;
            }
            if let Some(t) = self.g.transition(q, joint) {
                path.push(joint.clone(), t);
                if self.alive(path)? {
                    self.extend_outcomes(path, start, agents, tree, out)?;
                }
                path.pop();
            }
        }
        Ok(())
    }

    /// Bounded value along an outcome whose positions `i..=last` are
    /// observed; past the end everything is unknown.
    fn temporal(&mut self, outcome: &Path, i: usize, t: &TemporalFormula) -> Result<Verdict, OracleError> {
        let last = outcome.len();
        match t {
            TemporalFormula::Next(f) => {
                if i < last {
                    self.eval(outcome, i + 1, f)
                } else {
                    Ok(Verdict::Unknown)
                }
            }
            TemporalFormula::Until(l, r) => {
                let (lv, rv) = self.values(outcome, i, l, r)?;
                // ∃ j1 ≥ i: φ2 at j1 and φ1 at every i ≤ j2 < j1.
                let mut any = Verdict::False;
                for j1 in 0..lv.len() {
                    let mut term = rv[j1];
                    for v in &lv[..j1] {
                        term = and(term, *v);
                    }
                    any = or(any, term);
                }
                let beyond = lv.iter().fold(Verdict::Unknown, |acc, v| and(acc, *v));
                Ok(or(any, beyond))
            }
            TemporalFormula::Release(l, r) => {
                let (lv, rv) = self.values(outcome, i, l, r)?;
                // ∀ j ≥ i: φ2 at j, or φ1 at some i ≤ j' < j.
                let mut all = Verdict::True;
                for j in 0..lv.len() {
                    let mut term = rv[j];
                    for v in &lv[..j] {
                        term = or(term, *v);
                    }
                    all = and(all, term);
                }
                let beyond = lv.iter().fold(Verdict::Unknown, |acc, v| or(acc, *v));
                Ok(and(all, beyond))
            }
        }
    }

    /// Operand values at positions `i..=len` of `outcome`.
    fn values(
        &mut self,
        outcome: &Path,
        i: usize,
        l: &PathFormula,
        r: &PathFormula,
    ) -> Result<(Vec<Verdict>, Vec<Verdict>), OracleError> {
        let mut lv = Vec::new();
        let mut rv = Vec::new();
        for j in i..=outcome.len() {
            lv.push(self.eval(outcome, j, l)?);
            rv.push(self.eval(outcome, j, r)?);
        }
        Ok((lv, rv))
    }

    fn strategic(&mut self, rho: &Path, agents: &[AgentId], t: &TemporalFormula) -> Result<Verdict, OracleError> {
        let mut all_fail = true;
        for tree in self.trees(rho.last(), agents)?.iter() {
            let outcomes = self.outcomes(rho, agents, tree)?;
            if outcomes.is_empty() {
                continue;
            }
            let mut worst = Verdict::True;
            for o in &outcomes {
                match self.temporal(o, rho.len(), t)? {
                    Verdict::False => {
                        worst = Verdict::False;
                        break;
                    }
                    Verdict::Unknown => worst = Verdict::Unknown,
                    Verdict::True => {}
                }
            }
            match worst {
                Verdict::True => return Ok(Verdict::True),
                Verdict::Unknown => all_fail = false,
                Verdict::False => {}
            }
        }
        Ok(if all_fail {
            Verdict::False
        } else {
            Verdict::Unknown
        })
    }
}

/// Verdict of `phi` at position `i` (1-based) of `rho` under `lambda` with
/// horizon `k`, computed straight from the definitions.
pub fn brute_force_eval(
    g: &GameStructure,
    rho: &Path,
    i: usize,
    lambda: &CapacityAssignment,
    phi: &PathFormula,
    k: usize,
) -> Result<Verdict, OracleError> {
    brute_force_eval_with_budget(g, rho, i, lambda, phi, k, DEFAULT_BUDGET)
}

pub fn brute_force_eval_with_budget(
    g: &GameStructure,
    rho: &Path,
    i: usize,
    lambda: &CapacityAssignment,
    phi: &PathFormula,
    k: usize,
    budget: u64,
) -> Result<Verdict, OracleError> {
    if i == 0 || i > rho.len() {
        return Err(OracleError::Position);
    }
    if !lambda.is_complete() {
        return Err(OracleError::Assignment);
    }
    // The ambient assignment would only be read by a bare capacity atom,
    // which the grammar confines to knowledge operators.
    let mut o = Oracle {
        g,
        k,
        budget,
        memo: HashMap::new(),
        consistent: HashMap::new(),
        joints: HashMap::new(),
        forests: HashMap::new(),
    };
    o.eval(rho, i, phi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::formula::parse_formula;

    fn at_s0(g: &GameStructure, text: &str, k: usize) -> Verdict {
        let lambda = CapacityAssignment::canonical(g).unwrap();
        let f = parse_formula(text, g).unwrap();
        brute_force_eval(g, &Path::new(StateId(0)), 1, &lambda, &f, k).unwrap()
    }

    #[test]
    fn hand_examples() {
        let g = fixtures::hand();
        assert_eq!(at_s0(&g, "start", 0), Verdict::True);
        assert_eq!(at_s0(&g, "<<opp>> N leftHit", 1), Verdict::True);
        assert_eq!(at_s0(&g, "<<opp>> N leftHit", 0), Verdict::Unknown);
        assert_eq!(at_s0(&g, "<<opp>> N (leftHit & rightHit)", 1), Verdict::False);
        for k in 0..=6 {
            assert_eq!(
                at_s0(&g, "<<obs>> F (K[obs](opp=lefty) | K[obs](opp=righty))", k),
                Verdict::Unknown
            );
        }
    }

    #[test]
    fn budget_guard() {
        let g = fixtures::mix();
        let lambda = CapacityAssignment::canonical(&g).unwrap();
        let f = parse_formula("<<opp>> G <<opp>> F leftHit", &g).unwrap();
        let r = brute_force_eval_with_budget(&g, &Path::new(StateId(0)), 1, &lambda, &f, 4, 1000);
        assert_eq!(r, Err(OracleError::Budget));
    }
}
