//! Self-contained numerical kernels for the echo simulations.
//!
//! Everything here is a pure function of its inputs: dense complex vectors and
//! matrices, unitary-normalized discrete Fourier transforms of arbitrary
//! length, Hermitian and unitary eigensolvers, and ordinary least squares.

pub mod dft;
mod error;
pub mod hermitian;
pub mod linalg;
pub mod lsq;
pub mod unitary;

pub use dft::{dft, DftPlan, Direction};
pub use error::NumericsError;
pub use hermitian::{eig_hermitian, eig_hermitian_with, symmetric_tridiagonal_eig, EigOptions};
pub use linalg::{ComplexMatrix, ComplexVector, EigenSystem, RealMatrix};
pub use lsq::{linear_least_squares, LinearFit};
pub use num_complex::Complex64 as C64;
pub use unitary::{eig_unitary, eig_unitary_with};

/// Default tolerances. All of them can be overridden through [`EigOptions`].
pub mod tolerances {
    /// Maximum entrywise deviation from Hermiticity accepted by `eig_hermitian`.
    pub const HERMITIAN: f64 = 1e-12;
    /// Maximum entrywise deviation of `U†U` from the identity accepted by `eig_unitary`.
    pub const UNITARY: f64 = 1e-10;
    /// QR sweeps allowed per eigenvalue before giving up.
    pub const MAX_SWEEPS_PER_EIGENVALUE: usize = 30;
}
