use quasiecho_numerics::NumericsError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CoreError {
    #[error(transparent)]
    Numerics(#[from] NumericsError),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch: operator acts on {expected} states, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("fit window {start}..={end} is invalid: {reason}")]
    BadWindow { start: usize, end: usize, reason: String },

    #[error("fidelity is not positive at t={t}")]
    NonPositiveFidelity { t: usize },

    #[error("fitted {model} parameter is not physical: {detail}")]
    NonPhysicalFit { model: &'static str, detail: String },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("eigensystem cache file is malformed: {0}")]
    CacheFormat(String),
}

pub type Result<T, E = CoreError> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> CoreError {
    CoreError::InvalidParameter(msg.into())
}
