use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A parameter falls outside the region where a barrier or solver is valid.
    #[error("constraint violation: {0}")]
    ConstraintViolation(String),

    /// A barrier was evaluated where it is zero or undefined.
    #[error("domain error: {0}")]
    DomainError(String),

    #[error("tridiagonal solve failed: zero pivot at row {row}")]
    LinearSolveFailure { row: usize },

    /// A Picard iterate fell below half the data minimum.
    #[error("iterate {k} fell to {value:.6e} at r = {r}, t = {t} (lower bound {bound:.6e})")]
    IterateBelowFloor {
        k: usize,
        value: f64,
        bound: f64,
        r: f64,
        t: f64,
    },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn constraint(msg: impl Into<String>) -> Error {
    Error::ConstraintViolation(msg.into())
}
