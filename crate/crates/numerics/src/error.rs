use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumericsError {
    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("non-finite entry in {0}")]
    NonFinite(&'static str),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not Hermitian (max deviation {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("matrix is not unitary (max deviation of U^dagger U from I is {deviation:e})")]
    NotUnitary { deviation: f64 },

    #[error("eigensolver failed to converge after {iterations} iterations")]
    NoConvergence { iterations: usize },

    #[error("least squares needs at least {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },

    #[error("abscissas are degenerate (all equal)")]
    DegenerateAbscissas,
}
