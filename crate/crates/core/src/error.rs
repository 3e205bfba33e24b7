use thiserror::Error;

/// Errors produced while building or analyzing a network.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("service profile is empty")]
    EmptyProfile,
    /// 1-based index of the offending entry.
    #[error("invalid service time at server {0}: must be positive and finite")]
    InvalidServiceTime(usize),
    #[error("index {index} out of range 1..={len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("decomposition needs at least two servers")]
    DegenerateDecomposition,
    #[error("flow-equivalent curve covers {available} populations, {requested} requested")]
    CurveTooShort { available: usize, requested: usize },
    #[error("warmup {warmup} must be nonnegative and shorter than horizon {horizon}")]
    InvalidHorizon { horizon: f64, warmup: f64 },
    #[error("parse error at line {line}: {message}")]
    ParseError { line: usize, message: String },
    #[error("missing field `{0}`")]
    MissingField(&'static str),
    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
