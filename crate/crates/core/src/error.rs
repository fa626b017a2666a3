//! Error type shared across the engine.

use thiserror::Error;

/// Errors surfaced by the public operations.
///
/// Internal invariant breaches (a non-cocycle obstruction, an unsolvable
/// system that the theory guarantees solvable) are panics, not variants:
/// they indicate a sign error in the engine, never a property of the input.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("coalgebra kind mismatch: expected {expected}, got {got}")]
    KindMismatch { expected: &'static str, got: &'static str },

    #[error("weight cap mismatch: {0} vs {1}")]
    CapMismatch(usize, usize),

    #[error("parity error: {0}")]
    Parity(String),

    #[error("weight {weight} out of range 1..={cap}")]
    WeightOutOfRange { weight: usize, cap: usize },

    #[error("index {0} out of range")]
    BadIndex(usize),

    #[error("not a codifferential: bracket [d,d] has a nonzero component in weight {weight}")]
    NotCodifferential { weight: usize },

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("resource cap exceeded: {words} words needed, limit {limit} (set CODIFF_MAX_WORDS to raise)")]
    ResourceLimit { words: usize, limit: usize },

    #[error("deformation does not factor through the miniversal deformation at order {order}: {msg}")]
    DoesNotFactor { order: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;
