use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A parameter or argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("location index {index} out of range for {count} locations")]
    LocationOutOfRange { index: usize, count: usize },

    #[error("path enumeration needs {count} paths, above the limit of {limit}")]
    TooManyPaths { count: u128, limit: u128 },

    #[error("solver did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("table validation failed: {}", .offenders.join("; "))]
    Validation { offenders: Vec<String> },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
