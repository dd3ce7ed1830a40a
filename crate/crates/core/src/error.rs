use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("derivative has a pole at t = 0 for exponent q = {q}")]
    Pole { q: f64 },
    #[error("unsupported operation: {0}")]
    Unsupported(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("set is empty")]
    EmptySet,
    #[error("sampler exhausted after {attempts} attempts with {found} of {wanted} points")]
    SamplerExhausted {
        attempts: usize,
        found: usize,
        wanted: usize,
    },
    #[error("premise violated: {0}")]
    PremiseViolated(String),
    #[error("schema error at {path}: {msg}")]
    Schema { path: String, msg: String },
    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
