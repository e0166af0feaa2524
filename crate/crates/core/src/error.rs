use thiserror::Error;

/// Errors raised by model construction, state calculus and the experiment drivers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("term ({x:?}, {y:?}, flavors {alpha},{beta}) rejected: {reason}")]
    InvalidTerm {
        x: Vec<usize>,
        y: Vec<usize>,
        alpha: usize,
        beta: usize,
        reason: String,
    },

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("convention violation: {0}")]
    Convention(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("degenerate ground state: many-body gap {gap:e} below tolerance {tol:e}")]
    Degenerate { gap: f64, tol: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}
