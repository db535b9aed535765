use thiserror::Error;

/// Errors raised by the numerical routines in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("profile is not even: value mismatch {mismatch:e} at t = {t}")]
    EvennessViolation { t: f64, mismatch: f64 },
    #[error("invalid dimension d = {0}")]
    InvalidDimension(usize),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("insufficient resolution: {0}")]
    Resolution(String),
    #[error("parameters outside the hypothesis region: {0}")]
    OutOfHypothesis(String),
    #[error("covering construction failed: {0}")]
    Covering(String),
    #[error("field is not radial: {0}")]
    SymmetryViolation(String),
    #[error("decomposition failed: {0}")]
    Decomposition(String),
    #[error("quadrature did not converge: {0}")]
    Quadrature(String),
    #[error("undefined fit: {0}")]
    UndefinedFit(String),
    #[error("divergent quantity: {0}")]
    Divergence(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
