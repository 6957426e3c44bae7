use itertools::Itertools;

use super::ast::{CapFormula, PathFormula, TemporalFormula};
use crate::model::GameStructure;

const IMP: u8 = 1;
const OR: u8 = 2;
const AND: u8 = 3;
const UNARY: u8 = 4;

fn as_or(f: &PathFormula) -> Option<(&PathFormula, &PathFormula)> {
    match f {
        PathFormula::Not(inner) => match inner.as_ref() {
            PathFormula::And(l, r) => match (l.as_ref(), r.as_ref()) {
                (PathFormula::Not(a), PathFormula::Not(b)) => Some((a, b)),
                _ => None,
            },
            _ => None,
        },
        _ => None,
    }
}

fn as_implication(f: &PathFormula) -> Option<(&PathFormula, &PathFormula)> {
    match f {
        PathFormula::Not(inner) => match inner.as_ref() {
            PathFormula::And(l, r) => match r.as_ref() {
                PathFormula::Not(b) => Some((l, b)),
                _ => None,
            },
            _ => None,
        },
        _ => None,
    }
}

fn wrap((s, prec): (String, u8), min: u8) -> String {
    if prec >= min {
        s
    } else {
        format!("({s})")
    }
}

fn path(f: &PathFormula, g: &GameStructure) -> (String, u8) {
    if f.is_falsity() {
        return ("false".into(), UNARY);
    }
    if let Some((a, b)) = as_or(f) {
        let s = format!("{} | {}", wrap(path(a, g), OR), wrap(path(b, g), AND));
        return (s, OR);
    }
    if let Some((a, b)) = as_implication(f) {
        let s = format!("{} -> {}", wrap(path(a, g), OR), wrap(path(b, g), IMP));
        return (s, IMP);
    }
    match f {
        PathFormula::Atom(p) => (g.prop_name(*p).to_string(), UNARY),
        PathFormula::Know(a, c) => (
            format!("K[{}]({})", g.agent_name(*a), render_cap_formula(c, g)),
            UNARY,
        ),
        PathFormula::Not(x) => (format!("!{}", wrap(path(x, g), UNARY)), UNARY),
        PathFormula::And(l, r) => (
            format!("{} & {}", wrap(path(l, g), AND), wrap(path(r, g), UNARY)),
            AND,
        ),
        PathFormula::Strat(y, t) => {
            let agents = y.agents().iter().map(|a| g.agent_name(*a)).join(", ");
            (format!("<<{agents}>> {}", temporal(t, g)), UNARY)
        }
    }
}

fn temporal(t: &TemporalFormula, g: &GameStructure) -> String {
    match t {
        TemporalFormula::Next(f) => format!("N {}", wrap(path(f, g), UNARY)),
        TemporalFormula::Until(l, r) if l.is_truth() => format!("F {}", wrap(path(r, g), UNARY)),
        TemporalFormula::Release(l, r) if l.is_falsity() => {
            format!("G {}", wrap(path(r, g), UNARY))
        }
        TemporalFormula::Until(l, r) => {
            format!("({}) U {}", path(l, g).0, wrap(path(r, g), UNARY))
        }
        TemporalFormula::Release(l, r) => {
            format!("({}) R {}", path(l, g).0, wrap(path(r, g), UNARY))
        }
    }
}

/// Canonical concrete syntax. Sugar patterns left by the parser's
/// desugaring are printed back as sugar, so rendering then parsing yields
/// the same tree.
pub fn render_formula(f: &PathFormula, g: &GameStructure) -> String {
    path(f, g).0
}

const CAP_OR: u8 = 1;
const CAP_AND: u8 = 2;
const CAP_UNARY: u8 = 3;

fn cap(f: &CapFormula, g: &GameStructure) -> (String, u8) {
    if let CapFormula::Not(inner) = f {
        if let CapFormula::And(l, r) = inner.as_ref() {
            if let (CapFormula::Not(a), CapFormula::Not(b)) = (l.as_ref(), r.as_ref()) {
                let s = format!("{} | {}", wrap(cap(a, g), CAP_OR), wrap(cap(b, g), CAP_AND));
                return (s, CAP_OR);
            }
        }
    }
    match f {
        CapFormula::HasCap(a, c) => (
            format!("{}={}", g.agent_name(*a), g.capacity_name(*c)),
            CAP_UNARY,
        ),
        CapFormula::Not(x) => (format!("!{}", wrap(cap(x, g), CAP_UNARY)), CAP_UNARY),
        CapFormula::And(l, r) => (
            format!("{} & {}", wrap(cap(l, g), CAP_AND), wrap(cap(r, g), CAP_UNARY)),
            CAP_AND,
        ),
    }
}

pub fn render_cap_formula(f: &CapFormula, g: &GameStructure) -> String {
    cap(f, g).0
}
