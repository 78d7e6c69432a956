use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("width mismatch: expected {expected}, found {found}")]
    WidthMismatch { expected: usize, found: usize },

    #[error("dimension {dim} exceeds the cap of {cap}")]
    DimensionCap { dim: usize, cap: usize },

    #[error("input vectors are linearly dependent")]
    Dependent,

    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("invalid expression: {0}")]
    Invalid(String),

    #[error("quadratic extension needs a nonzero square class")]
    ZeroClass,

    #[error("{0}")]
    OutOfRange(String),

    /// A model-level invariant that the theory guarantees did not hold.
    #[error("internal invariant violated: {0}")]
    Internal(String),
}
