//! A line-oriented text format for game structures.
//!
//! ```text
//! # comment
//! game hand
//! agents: obs, opp
//! capacities:
//!   opp: lefty, righty
//! actions:
//!   lefty: serve, swingL
//! states: s0, s1
//! init: s0
//! props: start
//! labels:
//!   s0: start
//! protocol:
//!   opp @ s0: serve, swingL
//! transitions:
//!   s0 (watch, serve) -> s0
//! ```
//!
//! Section headers start in column 1; their entries are indented. `agents`,
//! `states` and `props` take a comma-separated list on the header line (which
//! may continue on indented lines). `init` and `props` are optional; when
//! `props` is absent the propositions are collected from `labels`.

mod bind;
mod parse;
mod render;

use std::fmt;

use thiserror::Error;

pub use bind::{bind_game, load_game, parse_path};
pub use parse::{parse_game, GameDocument, Line, TransitionLine};
pub use render::render_game;

/// 1-based line and column.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Span {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Spanned<T> {
    pub value: T,
    pub span: Span,
}

impl<T> Spanned<T> {
    pub fn new(value: T, span: Span) -> Self {
        Spanned { value, span }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SpecErrorKind {
    Syntax(String),
    Unknown { kind: &'static str, name: String },
    Duplicate { kind: &'static str, name: String },
    MissingSection(&'static str),
    Invalid(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("{span}: {}", describe(.kind))]
pub struct SpecError {
    pub span: Span,
    pub kind: SpecErrorKind,
}

fn describe(kind: &SpecErrorKind) -> String {
    match kind {
        SpecErrorKind::Syntax(m) => format!("syntax error: {m}"),
        SpecErrorKind::Unknown { kind, name } => format!("unknown {kind} `{name}`"),
        SpecErrorKind::Duplicate { kind, name } => format!("duplicate {kind} `{name}`"),
        SpecErrorKind::MissingSection(s) => format!("missing section `{s}`"),
        SpecErrorKind::Invalid(m) => format!("invalid structure: {m}"),
    }
}

impl SpecError {
    pub(crate) fn new(span: Span, kind: SpecErrorKind) -> Self {
        SpecError { span, kind }
    }

    pub(crate) fn syntax(span: Span, msg: impl Into<String>) -> Self {
        SpecError::new(span, SpecErrorKind::Syntax(msg.into()))
    }
}

/// All errors found while binding a document.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub struct SpecErrors(pub Vec<SpecError>);

impl fmt::Display for SpecErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

impl From<SpecError> for SpecErrors {
    fn from(e: SpecError) -> Self {
        SpecErrors(vec![e])
    }
}
