//! Crate-wide error type.
//!
//! Constructors and verifiers validate their inputs eagerly and return one
//! of these variants instead of panicking; panics are reserved for broken
//! internal invariants.

use thiserror::Error;

/// Errors shared by constructors, verifiers, converters, and solvers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// A vector or matrix dimension does not match the expected one.
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    /// A square matrix was required.
    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    /// Symmetry check failed at the reported entry pair.
    #[error("matrix is not symmetric at ({i},{j})")]
    NotSymmetric { i: usize, j: usize },

    /// A strictly positive simplex scale was required.
    #[error("simplex scale must be strictly positive")]
    NonPositiveScale,

    /// A tolerance outside the operation's admissible range.
    #[error("invalid tolerance: {0}")]
    InvalidTolerance(String),

    /// The supplied point violates the feasible set of the instance.
    #[error("infeasible point: {0}")]
    Infeasible(String),

    /// A game payoff entry outside the unit interval.
    #[error("payoff entry out of [0,1] at ({i},{j})")]
    PayoffOutOfRange { i: usize, j: usize },

    /// A vector that should be a probability distribution is not one.
    #[error("not a probability vector: {0}")]
    NotAProbability(String),

    /// A documented hypothesis of the operation fails for the input.
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    /// Invalid solver or generator parameters.
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    /// Failure to parse a number or payload.
    #[error("parse error: {0}")]
    Parse(String),

    /// An internal consistency check failed; indicates a bug or a broken
    /// caller-side contract rather than bad data.
    #[error("postcondition failed: {0}")]
    Postcondition(String),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
