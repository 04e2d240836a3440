use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),

    #[error("shape mismatch: expected length {expected}, got {got}")]
    Shape { expected: usize, got: usize },

    #[error("invalid grid spacing h = {0}: 1/h must be an integer >= 2")]
    InvalidSpacing(f64),

    #[error("invalid domain: {0}")]
    Domain(String),

    #[error("interior of the domain is disconnected ({components} components)")]
    Disconnected { components: usize },

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("matrix is singular (zero pivot in column {0})")]
    Singular(usize),

    #[error("shifted system is singular or indefinite at shift {lambda}")]
    ShiftCollision { lambda: f64 },

    #[error("shift {lambda} is not above the principal eigenvalue")]
    ShiftTooSmall { lambda: f64 },

    #[error("positivity violated at component {index} (value {value:e})")]
    Positivity { index: usize, value: f64 },

    #[error("factorization was built for a different operator or shift")]
    TargetMismatch,

    #[error("stopping criterion {criterion} is not supported by {algorithm}")]
    UnsupportedCriterion {
        criterion: &'static str,
        algorithm: &'static str,
    },

    #[error("inconsistent iteration state: {0}")]
    State(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("no convergence after {0} iterations")]
    NoConvergence(usize),

    #[error("invalid configuration: {0}")]
    Config(String),
}
