use num_complex::Complex64 as C64;
use quasiecho_numerics::linalg::{inner, norm};

use crate::error::{invalid, CoreError, Result};

/// Unit-norm amplitude vector in a finite Hilbert space.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState {
    amplitudes: Vec<C64>,
}

impl QuantumState {
    /// Normalizes the given amplitudes.
    pub fn from_amplitudes(mut amplitudes: Vec<C64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(invalid("state must have at least one amplitude"));
        }
        if amplitudes.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(invalid("state amplitudes must be finite"));
        }
        let n = norm(&amplitudes);
        if n == 0.0 {
            return Err(invalid("state must not be the zero vector"));
        }
        for z in &mut amplitudes {
            *z /= n;
        }
        Ok(Self { amplitudes })
    }

    pub fn basis(dim: usize, index: usize) -> Self {
        let mut a = vec![C64::new(0.0, 0.0); dim];
        a[index] = C64::new(1.0, 0.0);
        Self { amplitudes: a }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amplitudes
    }

    /// `⟨self|other⟩`.
    pub fn overlap(&self, other: &Self) -> Result<C64> {
        if self.dim() != other.dim() {
            return Err(CoreError::DimensionMismatch { expected: self.dim(), actual: other.dim() });
        }
        Ok(inner(&self.amplitudes, &other.amplitudes))
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|z| z.norm_sqr()).collect()
    }

    /// Multiplies every amplitude by `e^{iα}`.
    pub fn with_global_phase(&self, alpha: f64) -> Self {
        let w = C64::from_polar(1.0, alpha);
        Self { amplitudes: self.amplitudes.iter().map(|z| z * w).collect() }
    }
}
