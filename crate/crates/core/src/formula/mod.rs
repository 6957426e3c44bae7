//! Path, temporal and capacity formulas: syntax trees, a parser for the
//! concrete syntax and a canonical renderer.
//!
//! Only negation and conjunction are core connectives. Disjunction,
//! implication, `true`/`false`, `F` and `G` are sugar and are normalized away
//! at parse time:
//!
//! | sugar      | core                 |
//! |------------|----------------------|
//! | `p \| q`   | `!(!p & !q)`         |
//! | `p -> q`   | `!(p & !q)`          |
//! | `true`     | reserved atom        |
//! | `false`    | `!true`              |
//! | `F p`      | `(true) U (p)`       |
//! | `G p`      | `(false) R (p)`      |

mod ast;
mod parse;
mod render;

pub use ast::{CapFormula, Coalition, PathFormula, TemporalFormula};
pub use parse::{parse_cap_formula, parse_formula, FormulaError};
pub use render::{render_cap_formula, render_formula};
