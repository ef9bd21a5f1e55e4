//! Angular-momentum algebra in the `J_z` eigenbasis, ordered `m = −J..J`.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use quasiecho_numerics::linalg::{inner, norm};
use quasiecho_numerics::{symmetric_tridiagonal_eig, ComplexMatrix, RealMatrix};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, CoreError, Result};
use crate::state::QuantumState;

/// Spin quantum number, stored as the integer `2J` so that half-integers are exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct SpinParameters {
    twice_j: u32,
}

impl SpinParameters {
    pub fn from_twice_j(twice_j: u32) -> Result<Self> {
        if twice_j == 0 {
            return Err(invalid("J must be positive"));
        }
        Ok(Self { twice_j })
    }

    /// Accepts any positive integer or half-integer `J`.
    pub fn new(j: f64) -> Result<Self> {
        let twice = 2.0 * j;
        if !twice.is_finite() || twice <= 0.0 || twice.fract() != 0.0 || twice > u32::MAX as f64 {
            return Err(invalid(format!("J must be a positive integer or half-integer, got {j}")));
        }
        Self::from_twice_j(twice as u32)
    }

    pub fn twice_j(&self) -> u32 {
        self.twice_j
    }

    pub fn j(&self) -> f64 {
        f64::from(self.twice_j) / 2.0
    }

    /// Hilbert-space dimension `2J + 1`.
    pub fn dim(&self) -> usize {
        self.twice_j as usize + 1
    }

    /// Magnetic quantum number of basis index `k`.
    pub fn m(&self, k: usize) -> f64 {
        k as f64 - self.j()
    }

    /// Diagonal of `J_z`.
    pub fn jz_diagonal(&self) -> Vec<f64> {
        (0..self.dim()).map(|k| self.m(k)).collect()
    }

    /// `⟨m+1|J₊|m⟩` for `m` at basis index `k`.
    fn raising(&self, k: usize) -> f64 {
        let (j, m) = (self.j(), self.m(k));
        (j * (j + 1.0) - m * (m + 1.0)).max(0.0).sqrt()
    }
}

impl TryFrom<f64> for SpinParameters {
    type Error = CoreError;
    fn try_from(j: f64) -> Result<Self> {
        Self::new(j)
    }
}

impl From<SpinParameters> for f64 {
    fn from(p: SpinParameters) -> f64 {
        p.j()
    }
}

/// Point on the unit sphere; `theta ∈ [0, π]`, `phi ∈ [−π, π)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SphereCoordinate {
    pub theta: f64,
    pub phi: f64,
}

impl SphereCoordinate {
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !(0.0..=PI).contains(&theta) {
            return Err(invalid(format!("theta must lie in [0, π], got {theta}")));
        }
        if !(-PI..PI).contains(&phi) {
            return Err(invalid(format!("phi must lie in [−π, π), got {phi}")));
        }
        Ok(Self { theta, phi })
    }

    /// Wraps `phi` into `[−π, π)`; `theta` must still be in range.
    pub fn wrapped(theta: f64, phi: f64) -> Result<Self> {
        let mut p = (phi + PI).rem_euclid(2.0 * PI) - PI;
        if p >= PI {
            p = -PI;
        }
        Self::new(theta, p)
    }

    pub fn unit_vector(&self) -> [f64; 3] {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        [st * cp, st * sp, ct]
    }
}

/// Index into the 10×10 grid of coherent-state centers, 1..=100.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct GridIndex(u32);

impl GridIndex {
    pub fn new(index: u32) -> Result<Self> {
        if !(1..=100).contains(&index) {
            return Err(invalid(format!("grid index must be in 1..=100, got {index}")));
        }
        Ok(Self(index))
    }

    pub fn get(&self) -> u32 {
        self.0
    }

    pub fn location(&self) -> SphereCoordinate {
        grid_state_location(*self)
    }
}

impl TryFrom<u32> for GridIndex {
    type Error = CoreError;
    fn try_from(v: u32) -> Result<Self> {
        Self::new(v)
    }
}

impl From<GridIndex> for u32 {
    fn from(g: GridIndex) -> u32 {
        g.0
    }
}

/// Row `r = ⌈i/10⌉` sets `θ = rπ/10`; column `c` sets `φ = −π/2 + (c−1)π/10`.
pub fn grid_state_location(g: GridIndex) -> SphereCoordinate {
    let i = g.0;
    let r = i.div_ceil(10);
    let c = i - 10 * (r - 1);
    SphereCoordinate { theta: f64::from(r) * PI / 10.0, phi: -PI / 2.0 + f64::from(c - 1) * PI / 10.0 }
}

#[derive(Debug, Clone)]
pub struct AngularMomentum {
    pub jx: ComplexMatrix,
    pub jy: ComplexMatrix,
    pub jz: ComplexMatrix,
}

pub fn angular_momentum_operators(p: SpinParameters) -> AngularMomentum {
    let n = p.dim();
    let mut jx = ComplexMatrix::zeros(n, n);
    let mut jy = ComplexMatrix::zeros(n, n);
    for k in 0..n - 1 {
        let b = p.raising(k);
        // J₊ has b at (k+1, k); Jx = (J₊+J₋)/2, Jy = (J₊−J₋)/2i.
        jx[(k + 1, k)] = C64::new(b / 2.0, 0.0);
        jx[(k, k + 1)] = C64::new(b / 2.0, 0.0);
        jy[(k + 1, k)] = C64::new(0.0, -b / 2.0);
        jy[(k, k + 1)] = C64::new(0.0, b / 2.0);
    }
    let jz = ComplexMatrix::from_diagonal(&p.jz_diagonal().iter().map(|&m| C64::new(m, 0.0)).collect::<Vec<_>>());
    AngularMomentum { jx, jy, jz }
}

/// `exp(−iπJ_y/2)`, which is real in this basis.
///
/// `J_y = D S D†` with `D = diag(i^k)` and `S` real symmetric tridiagonal,
/// so the exponential follows from the eigenvectors of `S` and its exactly
/// known spectrum `{−J, …, J}`.
pub fn rotation_pi2_about_y_real(p: SpinParameters) -> Result<RealMatrix> {
    let n = p.dim();
    let off: Vec<f64> = (0..n - 1).map(|k| -p.raising(k) / 2.0).collect();
    let (lambda, z) = symmetric_tridiagonal_eig(&vec![0.0; n], &off)?;
    let j = p.j();
    let mut cos = Vec::with_capacity(n);
    let mut sin = Vec::with_capacity(n);
    for &l in &lambda {
        let snapped = -j + (l + j).round();
        if (snapped - l).abs() > 1e-6 {
            return Err(CoreError::InvalidParameter(format!("J_y eigenvalue {l} is not a spin projection")));
        }
        let a = PI * snapped / 2.0;
        cos.push(a.cos());
        sin.push(a.sin());
    }
    // Entry (a, b) is i^{a−b} Σ_j Z_aj Z_bj e^{−iπλ_j/2}; only the real part survives.
    let mut out = RealMatrix::zeros(n, n);
    for a in 0..n {
        let za = z.row(a);
        for b in 0..n {
            let zb = z.row(b);
            let (w, sign) = match (a + 4 * n - b) % 4 {
                0 => (&cos, 1.0),
                1 => (&sin, 1.0),
                2 => (&cos, -1.0),
                _ => (&sin, -1.0),
            };
            let mut s = 0.0;
            for ((x, y), wj) in za.iter().zip(zb).zip(w) {
                s += x * y * wj;
            }
            out[(a, b)] = sign * s;
        }
    }
    Ok(out)
}

pub fn rotation_pi2_about_y(p: SpinParameters) -> Result<ComplexMatrix> {
    Ok(rotation_pi2_about_y_real(p)?.to_complex())
}

/// Coherent state whose Bloch vector points along `(θ, φ)`.
///
/// `c_m = √C(2J, J+m) cos(θ/2)^{J+m} sin(θ/2)^{J−m} e^{−imφ}`, evaluated in log space.
pub fn spin_coherent_state(p: SpinParameters, c: SphereCoordinate) -> QuantumState {
    let n = p.dim();
    let twice = n - 1;
    let (s, co) = (c.theta / 2.0).sin_cos();
    let (ls, lc) = (s.abs().ln(), co.abs().ln());
    let mut log_binom = 0.0;
    let mut logs = Vec::with_capacity(n);
    for k in 0..n {
        if k > 0 {
            log_binom += ((twice - k + 1) as f64 / k as f64).ln();
        }
        // 0·ln 0 = 0 at the poles.
        let up = if k == 0 { 0.0 } else { k as f64 * lc };
        let down = if k == twice { 0.0 } else { (twice - k) as f64 * ls };
        logs.push(0.5 * log_binom + up + down);
    }
    let top = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let amps: Vec<C64> = logs.iter().enumerate().map(|(k, &l)| C64::from_polar((l - top).exp(), -p.m(k) * c.phi)).collect();
    QuantumState::from_amplitudes(amps).expect("coherent state amplitudes are finite and nonzero")
}

/// `√(⟨ψ|A²|ψ⟩ − |⟨ψ|A|ψ⟩|²)` for Hermitian `A`.
pub fn extent(state: &QuantumState, op: &ComplexMatrix) -> Result<f64> {
    let psi = state.amplitudes();
    if op.rows() != psi.len() || op.cols() != psi.len() {
        return Err(CoreError::DimensionMismatch { expected: op.rows(), actual: psi.len() });
    }
    let a_psi = op.matvec(psi);
    let n2 = norm(psi).powi(2);
    let mean = inner(psi, &a_psi) / n2;
    let second = norm(&a_psi).powi(2) / n2;
    Ok((second - mean.norm_sqr()).max(0.0).sqrt())
}

/// [`extent`] for an operator given by its (real) diagonal.
pub fn extent_diagonal(amplitudes: &[C64], diag: &[f64]) -> Result<f64> {
    if diag.len() != amplitudes.len() {
        return Err(CoreError::DimensionMismatch { expected: diag.len(), actual: amplitudes.len() });
    }
    let (mut w, mut m1, mut m2) = (0.0, 0.0, 0.0);
    for (z, &d) in amplitudes.iter().zip(diag) {
        let p = z.norm_sqr();
        w += p;
        m1 += p * d;
        m2 += p * d * d;
    }
    if w == 0.0 {
        return Err(invalid("extent of the zero vector"));
    }
    let (m1, m2) = (m1 / w, m2 / w);
    Ok((m2 - m1 * m1).max(0.0).sqrt())
}

/// `(⟨Jx⟩, ⟨Jy⟩, ⟨Jz⟩)` without forming the operators.
pub fn bloch_vector(p: SpinParameters, state: &QuantumState) -> Result<[f64; 3]> {
    let a = state.amplitudes();
    if a.len() != p.dim() {
        return Err(CoreError::DimensionMismatch { expected: p.dim(), actual: a.len() });
    }
    // ⟨J₊⟩ = Σ b_k conj(a_{k+1}) a_k.
    let mut plus = C64::new(0.0, 0.0);
    for k in 0..a.len() - 1 {
        plus += a[k + 1].conj() * a[k] * p.raising(k);
    }
    let jz: f64 = a.iter().enumerate().map(|(k, z)| z.norm_sqr() * p.m(k)).sum();
    Ok([plus.re, plus.im, jz])
}

#[cfg(test)]
mod tests {
    use super::*;
    use quasiecho_numerics::eig_hermitian;

    fn spin(j: f64) -> SpinParameters {
        SpinParameters::new(j).unwrap()
    }

    fn expect(op: &ComplexMatrix, s: &QuantumState) -> C64 {
        inner(s.amplitudes(), &op.matvec(s.amplitudes()))
    }

    #[test]
    fn parameters_validate() {
        assert_eq!(spin(0.5).dim(), 2);
        assert_eq!(spin(500.0).dim(), 1001);
        assert!(SpinParameters::new(0.0).is_err());
        assert!(SpinParameters::new(0.3).is_err());
        assert!(SpinParameters::new(-1.0).is_err());
    }

    #[test]
    fn spin_half_operators() {
        let ops = angular_momentum_operators(spin(0.5));
        let h = C64::new(0.5, 0.0);
        assert_eq!(ops.jz.diagonal(), vec![-h, h]);
        assert_eq!(ops.jx[(0, 1)], h);
        assert_eq!(ops.jx[(1, 0)], h);
        // Jy in ascending order: ⟨+½|Jy|−½⟩ = −i/2.
        assert_eq!(ops.jy[(1, 0)], C64::new(0.0, -0.5));
        assert_eq!(ops.jy[(0, 1)], C64::new(0.0, 0.5));
    }

    #[test]
    fn commutator_and_casimir() {
        for j in [0.5, 1.0, 1.5, 3.0, 7.5, 20.0] {
            let p = spin(j);
            let o = angular_momentum_operators(p);
            let comm = o.jx.matmul(&o.jy).sub(&o.jy.matmul(&o.jx));
            let target = o.jz.scale(C64::new(0.0, 1.0));
            assert!(comm.max_abs_diff(&target) < 1e-12, "J={j}");
            let cas = o.jx.matmul(&o.jx).add(&o.jy.matmul(&o.jy)).add(&o.jz.matmul(&o.jz));
            let id = ComplexMatrix::identity(p.dim()).scale(C64::new(j * (j + 1.0), 0.0));
            assert!(cas.max_abs_diff(&id) < 1e-10, "J={j}");
        }
    }

    #[test]
    fn jy_spectrum_is_integer_ladder() {
        let o = angular_momentum_operators(spin(5.0));
        let es = eig_hermitian(&o.jy).unwrap();
        for (k, l) in es.eigenvalues.iter().enumerate() {
            assert!((l.re - (k as f64 - 5.0)).abs() < 1e-10);
        }
    }

    #[test]
    fn spin_half_rotation_closed_form() {
        let r = rotation_pi2_about_y(spin(0.5)).unwrap();
        let c = (PI / 4.0).cos();
        // Ascending order (−½, +½): d_{−½,+½} = +sin, d_{+½,−½} = −sin.
        let want = [[c, c], [-c, c]];
        for a in 0..2 {
            for b in 0..2 {
                assert!((r[(a, b)] - C64::new(want[a][b], 0.0)).norm() < 1e-15);
            }
        }
    }

    /// `exp(−iπA/2)` through a general Hermitian eigensolver.
    fn spectral_exp(a: &ComplexMatrix, scale: f64) -> ComplexMatrix {
        let es = eig_hermitian(a).unwrap();
        let n = a.rows();
        let v = &es.eigenvectors;
        let phase: Vec<C64> = es.eigenvalues.iter().map(|l| C64::from_polar(1.0, -scale * l.re)).collect();
        ComplexMatrix::from_fn(n, n, |r, c| (0..n).map(|j| v[(r, j)] * phase[j] * v[(c, j)].conj()).sum())
    }

    #[test]
    fn rotation_matches_spectral_exponential() {
        for j in [1.0, 2.5, 5.0, 12.0] {
            let p = spin(j);
            let r = rotation_pi2_about_y(p).unwrap();
            let oracle = spectral_exp(&angular_momentum_operators(p).jy, PI / 2.0);
            assert!(r.max_abs_diff(&oracle) < 1e-10, "J={j} diff={:e}", r.max_abs_diff(&oracle));
        }
    }

    #[test]
    fn rotation_fourth_power_is_plus_minus_identity() {
        for (j, sign) in [(1.0, 1.0), (2.5, -1.0), (10.0, 1.0), (7.5, -1.0)] {
            let r = rotation_pi2_about_y(spin(j)).unwrap();
            let r4 = r.matmul(&r).matmul(&r).matmul(&r);
            let id = ComplexMatrix::identity(r.rows()).scale(C64::new(sign, 0.0));
            assert!(r4.max_abs_diff(&id) < 1e-10, "J={j}");
        }
    }

    #[test]
    fn rotation_unitary_at_large_j() {
        let r = rotation_pi2_about_y_real(spin(500.0)).unwrap();
        assert!(r.to_complex().unitary_deviation() < 1e-12);
    }

    #[test]
    fn coherent_state_bloch_vector() {
        for j in [0.5, 1.0, 5.0, 20.0, 500.0] {
            let p = spin(j);
            for (theta, phi) in [(0.0, 0.3), (PI, -1.0), (PI / 2.0, -PI / 2.0), (1.1, 2.9), (2.7, -3.0), (0.2, 0.0)] {
                let c = SphereCoordinate::new(theta, phi).unwrap();
                let s = spin_coherent_state(p, c);
                assert!((norm(s.amplitudes()) - 1.0).abs() < 1e-12);
                let b = bloch_vector(p, &s).unwrap();
                let u = c.unit_vector();
                for i in 0..3 {
                    assert!((b[i] / j - u[i]).abs() < 1e-8, "J={j} θ={theta} φ={phi} axis {i}");
                }
            }
        }
    }

    #[test]
    fn pole_state_is_top_eigenstate() {
        let p = spin(7.0);
        let s = spin_coherent_state(p, SphereCoordinate::new(0.0, 1.0).unwrap());
        assert!((s.amplitudes()[p.dim() - 1].norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn coherent_state_has_minimal_transverse_variance() {
        let j = 20.0;
        let p = spin(j);
        let o = angular_momentum_operators(p);
        let c = SphereCoordinate::new(1.0, 0.7).unwrap();
        let s = spin_coherent_state(p, c);
        // Two unit vectors orthogonal to the Bloch direction.
        let e1 = [c.theta.cos() * c.phi.cos(), c.theta.cos() * c.phi.sin(), -c.theta.sin()];
        let e2 = [-c.phi.sin(), c.phi.cos(), 0.0];
        for e in [e1, e2] {
            let op = o.jx.scale(C64::new(e[0], 0.0)).add(&o.jy.scale(C64::new(e[1], 0.0))).add(&o.jz.scale(C64::new(e[2], 0.0)));
            let var = extent(&s, &op).unwrap().powi(2);
            assert!((var - j / 2.0).abs() < 1e-9, "var={var}");
        }
    }

    #[test]
    fn coherent_overlap_law() {
        for j in [1.0, 5.0, 20.0] {
            let p = spin(j);
            let a = SphereCoordinate::new(0.8, -1.2).unwrap();
            let b = SphereCoordinate::new(2.1, 0.4).unwrap();
            let (ua, ub) = (a.unit_vector(), b.unit_vector());
            let gamma = (ua[0] * ub[0] + ua[1] * ub[1] + ua[2] * ub[2]).clamp(-1.0, 1.0).acos();
            let ov = spin_coherent_state(p, a).overlap(&spin_coherent_state(p, b)).unwrap().norm_sqr();
            assert!((ov - (gamma / 2.0).cos().powf(4.0 * j)).abs() < 1e-8, "J={j}");
        }
    }

    #[test]
    fn large_j_state_on_minus_y() {
        let p = spin(500.0);
        let s = spin_coherent_state(p, SphereCoordinate::new(PI / 2.0, -PI / 2.0).unwrap());
        let b = bloch_vector(p, &s).unwrap();
        assert!((b[1] / 500.0 + 1.0).abs() < 1e-8);
    }

    #[test]
    fn extent_examples() {
        let p = spin(3.0);
        let jz = angular_momentum_operators(p).jz;
        for k in 0..p.dim() {
            assert_eq!(extent(&QuantumState::basis(p.dim(), k), &jz).unwrap(), 0.0);
        }
        let mut a = vec![C64::new(0.0, 0.0); p.dim()];
        a[1] = C64::new(1.0, 0.0);
        a[5] = C64::new(0.0, 1.0);
        let s = QuantumState::from_amplitudes(a).unwrap();
        assert!((extent(&s, &jz).unwrap() - 2.0).abs() < 1e-14);
        assert!((extent_diagonal(s.amplitudes(), &p.jz_diagonal()).unwrap() - 2.0).abs() < 1e-14);
        assert!(extent(&QuantumState::basis(3, 0), &jz).is_err());
    }

    #[test]
    fn extent_phase_invariant() {
        let p = spin(4.0);
        let o = angular_momentum_operators(p);
        let s = spin_coherent_state(p, SphereCoordinate::new(1.3, 0.4).unwrap());
        // Quarter-turn phases are exact in floating point; generic ones agree to rounding.
        let i = QuantumState::from_amplitudes(s.amplitudes().iter().map(|z| z * C64::i()).collect()).unwrap();
        let t = s.with_global_phase(0.77);
        for op in [&o.jx, &o.jy, &o.jz] {
            assert_eq!(extent(&s, op).unwrap(), extent(&i, op).unwrap());
            assert!((extent(&s, op).unwrap() - extent(&t, op).unwrap()).abs() < 1e-14);
        }
        assert!((expect(&o.jz, &s).im).abs() < 1e-14);
    }

    #[test]
    fn grid_locations() {
        let loc = |i| GridIndex::new(i).unwrap().location();
        let close = |c: SphereCoordinate, th: f64, ph: f64| (c.theta - th).abs() < 1e-15 && (c.phi - ph).abs() < 1e-15;
        assert!(close(loc(1), PI / 10.0, -PI / 2.0));
        assert!(close(loc(41), PI / 2.0, -PI / 2.0));
        assert!(close(loc(46), PI / 2.0, 0.0));
        assert!(close(loc(100), PI, 2.0 * PI / 5.0));
        assert!(close(loc(52), 3.0 * PI / 5.0, -2.0 * PI / 5.0));
        assert!(GridIndex::new(0).is_err());
        assert!(GridIndex::new(101).is_err());
    }

    #[test]
    fn sphere_coordinate_ranges() {
        assert!(SphereCoordinate::new(-0.1, 0.0).is_err());
        assert!(SphereCoordinate::new(0.0, PI).is_err());
        let w = SphereCoordinate::wrapped(1.0, PI).unwrap();
        assert_eq!(w.phi, -PI);
    }
}
