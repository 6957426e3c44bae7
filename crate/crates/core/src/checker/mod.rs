//! Bounded three-valued model checking.
//!
//! Knowledge is decided exactly. Strategic formulas look `k` steps ahead of
//! the point where they are evaluated: `TRUE` and `FALSE` are conclusive,
//! `UNKNOWN` means the horizon was too short. A strategic formula nested in
//! the operand of another gets the full horizon again from its own
//! evaluation point.

mod search;
mod trees;

use std::fmt;
use std::ops::{BitAnd, BitOr, Not};

use thiserror::Error;

use crate::formula::{CapFormula, Coalition, PathFormula, TemporalFormula};
use crate::model::{AgentId, GameStructure, StateId};
use crate::trace::{outcomes_bounded, CapacityAssignment, Path, StrategyTree, TraceError};
use search::Evaluator;

pub use trees::{enumerate_strategy_trees, StrategyTrees};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Verdict {
    True,
    False,
    Unknown,
}

impl Verdict {
    pub fn is_conclusive(self) -> bool {
        self != Verdict::Unknown
    }
}

impl From<bool> for Verdict {
    fn from(b: bool) -> Self {
        if b {
            Verdict::True
        } else {
            Verdict::False
        }
    }
}

impl Not for Verdict {
    type Output = Verdict;

    fn not(self) -> Verdict {
        match self {
            Verdict::True => Verdict::False,
            Verdict::False => Verdict::True,
            Verdict::Unknown => Verdict::Unknown,
        }
    }
}

impl BitAnd for Verdict {
    type Output = Verdict;

    fn bitand(self, rhs: Verdict) -> Verdict {
        match (self, rhs) {
            (Verdict::False, _) | (_, Verdict::False) => Verdict::False,
            (Verdict::True, Verdict::True) => Verdict::True,
            _ => Verdict::Unknown,
        }
    }
}

impl BitOr for Verdict {
    type Output = Verdict;

    fn bitor(self, rhs: Verdict) -> Verdict {
        !(!self & !rhs)
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::True => "TRUE",
            Verdict::False => "FALSE",
            Verdict::Unknown => "UNKNOWN",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CheckError {
    #[error("position {position} is outside a path with {len} states")]
    Position { position: usize, len: usize },
    #[error("the ambient capacity assignment must be complete and respect Γ")]
    Assignment,
    #[error("the formula refers to an unknown {0}")]
    Unresolved(&'static str),
    #[error("the outcome does not extend the evaluation prefix by exactly {0} steps")]
    NotAnExtension(usize),
    #[error("invalid path")]
    InvalidPath,
    #[error(transparent)]
    Trace(#[from] TraceError),
}

/// Where a formula is evaluated: position `position` (1-based, counting
/// states) of `path`, under the ambient assignment `lambda`, with horizon
/// `horizon` for strategic operators.
#[derive(Clone, Debug)]
pub struct EvalContext<'g> {
    pub g: &'g GameStructure,
    pub path: Path,
    pub position: usize,
    pub lambda: CapacityAssignment,
    pub horizon: usize,
}

impl<'g> EvalContext<'g> {
    pub fn new(
        g: &'g GameStructure,
        path: Path,
        position: usize,
        lambda: CapacityAssignment,
        horizon: usize,
    ) -> Result<Self, CheckError> {
        if position == 0 || position > path.len() {
            return Err(CheckError::Position {
                position,
                len: path.len(),
            });
        }
        if !lambda.is_complete() || !lambda.respects(g) {
            return Err(CheckError::Assignment);
        }
        if !crate::trace::validate_path(g, &path) {
            return Err(CheckError::InvalidPath);
        }
        Ok(EvalContext {
            g,
            path,
            position,
            lambda,
            horizon,
        })
    }

    /// The path `(q)` at position 1 with the canonical assignment.
    pub fn at_state(g: &'g GameStructure, q: StateId, horizon: usize) -> Self {
        EvalContext {
            g,
            path: Path::new(q),
            position: 1,
            lambda: canonical_assignment(g),
            horizon,
        }
    }

    /// The prefix up to the current position; nothing after it is consulted.
    pub fn current(&self) -> Path {
        self.path.prefix(self.position)
    }
}

fn canonical_assignment(g: &GameStructure) -> CapacityAssignment {
    CapacityAssignment::canonical(g).unwrap_or_else(|| CapacityAssignment::empty(g.agent_count()))
}

fn resolve_cap(g: &GameStructure, f: &CapFormula) -> Result<(), CheckError> {
    match f {
        CapFormula::HasCap(a, c) => {
            if a.index() >= g.agent_count() {
                return Err(CheckError::Unresolved("agent"));
            }
            if c.index() >= g.capacity_count() {
                return Err(CheckError::Unresolved("capacity"));
            }
            Ok(())
        }
        CapFormula::Not(x) => resolve_cap(g, x),
        CapFormula::And(l, r) => resolve_cap(g, l).and(resolve_cap(g, r)),
    }
}

fn resolve(g: &GameStructure, f: &PathFormula) -> Result<(), CheckError> {
    match f {
        PathFormula::Atom(p) => {
            if p.is_top() || p.index() < g.prop_count() {
                Ok(())
            } else {
                Err(CheckError::Unresolved("proposition"))
            }
        }
        PathFormula::Know(a, c) => {
            if a.index() >= g.agent_count() {
                return Err(CheckError::Unresolved("agent"));
            }
            resolve_cap(g, c)
        }
        PathFormula::Not(x) => resolve(g, x),
        PathFormula::And(l, r) => resolve(g, l).and(resolve(g, r)),
        PathFormula::Strat(y, t) => {
            if y.agents().iter().any(|a| a.index() >= g.agent_count()) {
                return Err(CheckError::Unresolved("agent"));
            }
            resolve_temporal(g, t)
        }
    }
}

fn resolve_temporal(g: &GameStructure, t: &TemporalFormula) -> Result<(), CheckError> {
    match t {
        TemporalFormula::Next(f) => resolve(g, f),
        TemporalFormula::Until(l, r) | TemporalFormula::Release(l, r) => {
            resolve(g, l).and(resolve(g, r))
        }
    }
}

pub fn eval_cap_formula(lambda: &CapacityAssignment, phi: &CapFormula) -> bool {
    match phi {
        CapFormula::HasCap(a, c) => lambda.get(*a) == Some(*c),
        CapFormula::Not(x) => !eval_cap_formula(lambda, x),
        CapFormula::And(l, r) => eval_cap_formula(lambda, l) && eval_cap_formula(lambda, r),
    }
}

/// Whether `a` knows `phi` at position `i` of `rho`: `phi` holds for every
/// assignment compatible with any path `a` cannot tell apart from the first
/// `i` states of `rho`.
pub fn eval_knowledge(
    g: &GameStructure,
    rho: &Path,
    i: usize,
    a: AgentId,
    phi: &CapFormula,
) -> Result<bool, CheckError> {
    if i == 0 || i > rho.len() {
        return Err(CheckError::Position {
            position: i,
            len: rho.len(),
        });
    }
    if a.index() >= g.agent_count() {
        return Err(CheckError::Unresolved("agent"));
    }
    resolve_cap(g, phi)?;
    Ok(Evaluator::new(g, 0).knows(&rho.prefix(i), a, phi))
}

pub fn eval_path_formula(ctx: &EvalContext<'_>, phi: &PathFormula) -> Result<Verdict, CheckError> {
    resolve(ctx.g, phi)?;
    Ok(Evaluator::new(ctx.g, ctx.horizon).eval(phi, &ctx.current()))
}

/// Bounded value of `psi` along `outcome`, which must extend the context's
/// current prefix by exactly `horizon` steps.
pub fn eval_temporal(
    ctx: &EvalContext<'_>,
    psi: &TemporalFormula,
    outcome: &Path,
) -> Result<Verdict, CheckError> {
    resolve_temporal(ctx.g, psi)?;
    let start = ctx.current();
    if outcome.len() != start.len() + ctx.horizon || outcome.prefix(start.len()) != start {
        return Err(CheckError::NotAnExtension(ctx.horizon));
    }
    Ok(Evaluator::new(ctx.g, ctx.horizon).temporal(psi, outcome, start.len()))
}

pub fn eval_strategic(
    ctx: &EvalContext<'_>,
    y: &Coalition,
    psi: &TemporalFormula,
) -> Result<Verdict, CheckError> {
    let f = PathFormula::Strat(y.clone(), Box::new(psi.clone()));
    eval_path_formula(ctx, &f)
}

/// Verdict of `phi` at the one-state path `(q)`.
///
/// # Panics
///
/// If `q` or a name in `phi` does not belong to `g`.
pub fn check_state(g: &GameStructure, q: StateId, phi: &PathFormula, k: usize) -> Verdict {
    assert!(q.index() < g.state_count(), "state out of range");
    eval_path_formula(&EvalContext::at_state(g, q, k), phi).expect("formula bound to this game")
}

/// Evidence for the verdict of a strategic formula.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Witness {
    /// A strategy whose bounded outcomes exist and all satisfy the goal.
    Winning(StrategyTree),
    /// The first strategy in enumeration order and one of its outcomes that
    /// falsifies the goal; `None` when the strategy has no outcomes at all.
    Falsifying {
        strategy: StrategyTree,
        outcome: Option<Path>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckResult {
    pub verdict: Verdict,
    pub witness: Option<Witness>,
}

/// [`check_state`] plus a witness when `phi` is a strategic formula, possibly
/// under negations, whose own verdict is conclusive.
pub fn check(g: &GameStructure, q: StateId, phi: &PathFormula, k: usize) -> Result<CheckResult, CheckError> {
    if q.index() >= g.state_count() {
        return Err(CheckError::InvalidPath);
    }
    resolve(g, phi)?;
    let ctx = EvalContext::at_state(g, q, k);
    let mut ev = Evaluator::new(g, k);
    let root = ctx.current();
    let verdict = ev.eval(phi, &root);

    let mut core = phi;
    let mut negated = false;
    while let PathFormula::Not(x) = core {
        core = x;
        negated = !negated;
    }
    let PathFormula::Strat(y, t) = core else {
        return Ok(CheckResult {
            verdict,
            witness: None,
        });
    };
    let own = if negated { !verdict } else { verdict };
    let witness = match own {
        Verdict::True => ev.winning_tree(y, t, &root).map(Witness::Winning),
        Verdict::False => {
            let strategy = enumerate_strategy_trees(g, q, y, k)
                .next()
                .expect("at least one tree");
            let mut outcome = None;
            for o in outcomes_bounded(g, &root, &strategy, k)? {
                if ev.temporal(t, &o, root.len()) == Verdict::False {
                    outcome = Some(o);
                    break;
                }
            }
            Some(Witness::Falsifying { strategy, outcome })
        }
        Verdict::Unknown => None,
    };
    Ok(CheckResult { verdict, witness })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::formula::parse_formula;
    use crate::gamespec::parse_path;

    fn lambda(g: &GameStructure, opp: &str) -> CapacityAssignment {
        CapacityAssignment::complete(vec![
            g.capacity_id("normal").unwrap(),
            g.capacity_id(opp).unwrap(),
        ])
    }

    fn has(g: &GameStructure, a: &str, c: &str) -> CapFormula {
        CapFormula::has(g.agent_id(a).unwrap(), g.capacity_id(c).unwrap())
    }

    #[test]
    fn kleene_tables() {
        use Verdict::*;
        assert_eq!(!Unknown, Unknown);
        assert_eq!(True & Unknown, Unknown);
        assert_eq!(False & Unknown, False);
        assert_eq!(True | Unknown, True);
        assert_eq!(False | Unknown, Unknown);
        assert_eq!(Verdict::from(true), True);
        assert_eq!(Unknown.to_string(), "UNKNOWN");
    }

    #[test]
    fn capacity_formulas() {
        let g = fixtures::hand();
        let l = lambda(&g, "lefty");
        assert!(eval_cap_formula(&l, &has(&g, "opp", "lefty")));
        assert!(eval_cap_formula(&l, &CapFormula::not(has(&g, "opp", "righty"))));
        let phi = has(&g, "obs", "normal");
        assert!(!eval_cap_formula(&l, &CapFormula::and(phi.clone(), CapFormula::not(phi))));
    }

    #[test]
    fn knowledge_examples() {
        let g = fixtures::hand();
        let obs = g.agent_id("obs").unwrap();
        let swing = parse_path("s0 (watch,swingL) s1", &g).unwrap();
        assert!(eval_knowledge(&g, &swing, 2, obs, &has(&g, "opp", "lefty")).unwrap());
        let serve = parse_path("s0 (watch,serve) s0", &g).unwrap();
        assert!(!eval_knowledge(&g, &serve, 2, obs, &has(&g, "opp", "lefty")).unwrap());
        let either = CapFormula::or(has(&g, "opp", "lefty"), has(&g, "opp", "righty"));
        assert!(eval_knowledge(&g, &Path::new(StateId(0)), 1, obs, &either).unwrap());
        // Only the prefix up to i counts.
        assert!(!eval_knowledge(&g, &swing, 1, obs, &has(&g, "opp", "lefty")).unwrap());
        assert!(eval_knowledge(&g, &swing, 3, obs, &either).is_err());
    }

    #[test]
    fn path_formula_examples() {
        let g = fixtures::hand();
        let s0 = Path::new(StateId(0));
        let f = |t: &str| parse_formula(t, &g).unwrap();
        let ctx = EvalContext::new(&g, s0.clone(), 1, lambda(&g, "lefty"), 0).unwrap();
        assert_eq!(eval_path_formula(&ctx, &f("start")).unwrap(), Verdict::True);
        for opp in ["lefty", "righty"] {
            let ctx = EvalContext::new(&g, s0.clone(), 1, lambda(&g, opp), 1).unwrap();
            assert_eq!(eval_path_formula(&ctx, &f("<<opp>> N leftHit")).unwrap(), Verdict::True);
        }
    }

    #[test]
    fn temporal_examples() {
        let g = fixtures::hand();
        let f = |t: &str| parse_formula(t, &g).unwrap();
        let ctx = EvalContext::at_state(&g, StateId(0), 1);
        let until = match f("<<>> (true) U leftHit") {
            PathFormula::Strat(_, t) => *t,
            _ => unreachable!(),
        };
        let release = match f("<<>> (false) R start") {
            PathFormula::Strat(_, t) => *t,
            _ => unreachable!(),
        };
        let to_s1 = parse_path("s0 (watch,swingL) s1", &g).unwrap();
        let stay = parse_path("s0 (watch,serve) s0", &g).unwrap();
        assert_eq!(eval_temporal(&ctx, &until, &to_s1).unwrap(), Verdict::True);
        assert_eq!(eval_temporal(&ctx, &until, &stay).unwrap(), Verdict::Unknown);
        assert_eq!(eval_temporal(&ctx, &release, &stay).unwrap(), Verdict::Unknown);
        assert_eq!(eval_temporal(&ctx, &release, &to_s1).unwrap(), Verdict::False);
        assert!(eval_temporal(&ctx, &until, &Path::new(StateId(0))).is_err());
    }

    #[test]
    fn strategic_examples() {
        let g = fixtures::hand();
        let opp = Coalition::new([g.agent_id("opp").unwrap()]);
        let obs = Coalition::new([g.agent_id("obs").unwrap()]);
        let atom = |p: &str| PathFormula::atom(g.prop_id(p).unwrap());
        let ctx = EvalContext::at_state(&g, StateId(0), 1);
        let next_left = TemporalFormula::Next(atom("leftHit"));
        assert_eq!(eval_strategic(&ctx, &opp, &next_left).unwrap(), Verdict::True);
        let both = TemporalFormula::Next(PathFormula::and(atom("leftHit"), atom("rightHit")));
        assert_eq!(eval_strategic(&ctx, &opp, &both).unwrap(), Verdict::False);
        let obs_id = g.agent_id("obs").unwrap();
        let learns = TemporalFormula::eventually(PathFormula::or(
            PathFormula::know(obs_id, has(&g, "opp", "lefty")),
            PathFormula::know(obs_id, has(&g, "opp", "righty")),
        ));
        for k in 0..=6 {
            let ctx = EvalContext::at_state(&g, StateId(0), k);
            assert_eq!(eval_strategic(&ctx, &obs, &learns).unwrap(), Verdict::Unknown, "k={k}");
        }
    }

    #[test]
    fn state_examples() {
        let g = fixtures::hand();
        let f = |t: &str| parse_formula(t, &g).unwrap();
        for k in 0..3 {
            assert_eq!(check_state(&g, StateId(0), &f("start"), k), Verdict::True);
            assert_eq!(check_state(&g, StateId(1), &f("K[obs](opp=lefty)"), k), Verdict::False);
        }
        assert_eq!(check_state(&g, StateId(0), &f("<<opp>> N leftHit"), 1), Verdict::True);
        assert_eq!(check_state(&g, StateId(0), &f("<<opp>> N leftHit"), 0), Verdict::Unknown);
    }

    #[test]
    fn mixed_swings_lose_every_outcome() {
        let g = fixtures::mix();
        let f = parse_formula("<<opp>> N rightHit", &g).unwrap();
        assert_eq!(check_state(&g, StateId(1), &f, 1), Verdict::True);
        // After a left swing the right swing leaves no compatible capacity.
        let left = parse_path("s0 (watch,swingL) s1", &g).unwrap();
        let ctx = EvalContext::new(&g, left, 2, lambda(&g, "lefty"), 1).unwrap();
        assert_eq!(eval_path_formula(&ctx, &f).unwrap(), Verdict::False);
    }

    #[test]
    fn witnesses() {
        let g = fixtures::hand();
        let f = parse_formula("<<opp>> N leftHit", &g).unwrap();
        let r = check(&g, StateId(0), &f, 1).unwrap();
        assert_eq!(r.verdict, Verdict::True);
        let Some(Witness::Winning(tree)) = r.witness else {
            panic!("expected a winning tree")
        };
        assert_eq!(
            tree.decision(&[StateId(0)]),
            Some(&[g.action_id("swingL").unwrap()][..])
        );

        let f = parse_formula("<<opp>> N (leftHit & rightHit)", &g).unwrap();
        let r = check(&g, StateId(0), &f, 1).unwrap();
        assert_eq!(r.verdict, Verdict::False);
        let Some(Witness::Falsifying { outcome, .. }) = r.witness else {
            panic!("expected a falsifying pair")
        };
        assert_eq!(outcome.unwrap().display(&g).to_string(), "s0 (watch,serve) s0");

        let f = parse_formula("!<<opp>> N leftHit", &g).unwrap();
        let r = check(&g, StateId(0), &f, 1).unwrap();
        assert_eq!(r.verdict, Verdict::False);
        assert!(matches!(r.witness, Some(Witness::Winning(_))));
        let f = parse_formula("start", &g).unwrap();
        assert_eq!(check(&g, StateId(0), &f, 1).unwrap().witness, None);
    }

    #[test]
    fn winning_tree_is_first_winner_in_enumeration() {
        let g = fixtures::hand();
        for text in ["<<opp>> F leftHit", "<<opp>> G !rightHit", "<<opp>> (start) U rightHit"] {
            let f = parse_formula(text, &g).unwrap();
            let PathFormula::Strat(y, t) = &f else { unreachable!() };
            for k in 1..4 {
                let r = check(&g, StateId(0), &f, k).unwrap();
                let root = Path::new(StateId(0));
                let ctx = EvalContext::at_state(&g, StateId(0), k);
                let first = enumerate_strategy_trees(&g, StateId(0), y, k).find(|tree| {
                    let outs = outcomes_bounded(&g, &root, tree, k).unwrap();
                    !outs.is_empty()
                        && outs
                            .iter()
                            .all(|o| eval_temporal(&ctx, t, o).unwrap() == Verdict::True)
                });
                match r.witness {
                    Some(Witness::Winning(tree)) => assert_eq!(Some(tree), first, "{text} k={k}"),
                    _ => assert_eq!(first, None, "{text} k={k}"),
                }
            }
        }
    }
}
