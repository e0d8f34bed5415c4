use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid vector: {0}")]
    InvalidVector(String),

    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("point {point} is not in the domain {domain}")]
    NotInDomain { point: String, domain: String },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("target {target} is unreachable on the ray (supremum along the ray {sup})")]
    UnreachableOnRay { target: f64, sup: f64 },

    #[error("validity error: {0}")]
    Validity(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("argument out of range: {0}")]
    Range(String),

    #[error("no convergence: best value {best}, last improvement {gap}")]
    NoConvergence { best: f64, gap: f64 },

    #[error("internal consistency error: {0}")]
    Consistency(String),

    #[error("empty boundary: every ray was unreachable")]
    EmptyBoundary,

    #[error("i/o error: {0}")]
    Io(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}
