use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("{op} rejects {class:?} input: {msg}")]
    DecayClass {
        op: &'static str,
        class: crate::polar::DecayClass,
        msg: String,
    },

    #[error("solvability violated for mode n=1: moment defect {defect:e} exceeds {tol:e}")]
    Solvability { defect: f64, tol: f64 },

    #[error("linear solve failed: {0}")]
    SolverFailure(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("internal consistency check failed: {0}")]
    Consistency(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Serde(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
