//! Error type shared by all solver modules.

/// Errors reported by ensemble construction, solvers and metrics.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("length {0} is not a power of two")]
    NotPowerOfTwo(usize),

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("line search stagnated after {halvings} halvings")]
    LineSearchStagnation { halvings: usize },

    #[error("gradient is zero; no descent direction")]
    ZeroGradient,
}

pub type Result<T> = std::result::Result<T, Error>;
