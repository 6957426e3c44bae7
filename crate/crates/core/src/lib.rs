//! Explicit-state model checking of capacity ATL over unknown-profile game
//! structures.
//!
//! * [`model`]: game structures and their validation
//! * [`trace`]: paths, compatible capacity assignments, indistinguishability,
//!   strategy trees and bounded outcomes
//! * [`formula`]: formula syntax trees, parser and renderer
//! * [`gamespec`]: the game file format
//! * [`checker`]: the bounded three-valued evaluator
//! * [`oracle`]: independent brute-force and fixed-point checkers plus a
//!   random game generator, for cross-validation

pub mod checker;
pub mod fixtures;
pub mod formula;
pub mod gamespec;
pub mod model;
pub mod oracle;
pub mod trace;

pub use checker::{check_state, Verdict};
pub use formula::{parse_formula, render_formula, PathFormula};
pub use gamespec::{load_game, render_game};
pub use model::GameStructure;
