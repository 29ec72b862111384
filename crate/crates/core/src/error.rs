use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("argument out of domain: {0}")]
    Domain(String),
    #[error("operation requires regime {expected}, got {actual}")]
    WrongRegime {
        expected: &'static str,
        actual: &'static str,
    },
    #[error("no sign change found while bracketing up to {limit:e}")]
    BracketNotFound { limit: f64 },
    #[error("invalid shape: {0}")]
    InvalidShape(String),
    #[error("K is not contained in Omega (violation at angle {angle:.6})")]
    ContainmentViolation { angle: f64 },
    #[error("Omega is not star-shaped about the center of K (ray at angle {angle:.6})")]
    NotStarShapedAboutCenter { angle: f64 },
    #[error("mesh error: {0}")]
    Mesh(String),
    #[error("size mismatch: expected {expected}, got {actual}")]
    SizeMismatch { expected: usize, actual: usize },
    #[error("solver produced a non-finite value at iteration {iteration}")]
    NonFinite { iteration: usize },
    #[error("random pair sampling exhausted {0} retries")]
    SamplingExhausted(usize),
    #[error("config error: {0}")]
    Config(String),
    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
