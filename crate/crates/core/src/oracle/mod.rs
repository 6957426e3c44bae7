//! Reference implementations used to cross-check the checker: a brute-force
//! evaluator written straight from the definitions, a fixed-point checker for
//! structures without hidden capacities, and a random game generator.

mod atl;
mod brute;
mod generate;
mod templates;

use thiserror::Error;

pub use atl::atl_fixed_point;
pub use brute::{brute_force_eval, brute_force_eval_with_budget, DEFAULT_BUDGET};
pub use generate::{generate_random_game, GeneratorParams};
pub use templates::{formula_templates, knowledge_free_templates};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("work budget exhausted")]
    Budget,
    #[error("position outside the path")]
    Position,
    #[error("the ambient capacity assignment must be complete")]
    Assignment,
    #[error("agent `{0}` has more than one capacity")]
    NotCapacityFree(String),
    #[error("{0} outside the fragment")]
    Fragment(&'static str),
}
