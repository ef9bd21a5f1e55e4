//! One-period quantum propagators stored in factored form.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64 as C64;
use quasiecho_numerics::{ComplexMatrix, DftPlan, Direction, RealMatrix};

use crate::error::{invalid, CoreError, Result};
use crate::spin::{rotation_pi2_about_y_real, SpinParameters};
use crate::state::QuantumState;

/// `U = exp(−iπJ_y/2) · exp(−i k J_z²/2J)`.
#[derive(Debug, Clone)]
pub struct KickedTop {
    spin: SpinParameters,
    k: f64,
    rotation: Arc<RealMatrix>,
    kick: Vec<C64>,
}

/// `U = exp(−iπN p²) · exp(−i k cos(2πq) N/π)` on the `N`-point torus grid
/// `q_n = n/N − 1/2`, `p_m = m/N − 1/2`.
#[derive(Debug, Clone)]
pub struct KickedRotor {
    n: usize,
    k: f64,
    kick: Vec<C64>,
    kinetic: Vec<C64>,
    plan: Arc<DftPlan>,
}

#[derive(Debug, Clone)]
pub enum FloquetOperator {
    Top(KickedTop),
    Rotor(KickedRotor),
}

/// Scratch buffers reused across applications.
#[derive(Debug, Default)]
pub struct Workspace {
    a: Vec<C64>,
    b: Vec<C64>,
    fft: Vec<C64>,
}

fn check_kick(k: f64) -> Result<()> {
    if !k.is_finite() {
        return Err(invalid(format!("kick strength must be finite, got {k}")));
    }
    Ok(())
}

pub fn qkt_floquet(spin: SpinParameters, k: f64) -> Result<FloquetOperator> {
    check_kick(k)?;
    let rotation = Arc::new(rotation_pi2_about_y_real(spin)?);
    Ok(FloquetOperator::Top(KickedTop { spin, k, kick: top_kick(spin, k), rotation }))
}

fn top_kick(spin: SpinParameters, k: f64) -> Vec<C64> {
    let scale = k / (2.0 * spin.j());
    (0..spin.dim()).map(|i| C64::from_polar(1.0, -scale * spin.m(i).powi(2))).collect()
}

pub fn qkr_floquet(n: usize, k: f64) -> Result<FloquetOperator> {
    check_kick(k)?;
    if n < 2 {
        return Err(invalid(format!("rotor dimension must be at least 2, got {n}")));
    }
    let kinetic = (0..n)
        .map(|m| {
            let p = rotor_momentum(n, m);
            C64::from_polar(1.0, -PI * n as f64 * p * p)
        })
        .collect();
    Ok(FloquetOperator::Rotor(KickedRotor { n, k, kick: rotor_kick(n, k), kinetic, plan: Arc::new(DftPlan::new(n)) }))
}

fn rotor_kick(n: usize, k: f64) -> Vec<C64> {
    (0..n)
        .map(|i| {
            let q = rotor_position(n, i);
            C64::from_polar(1.0, -k * (2.0 * PI * q).cos() * n as f64 / PI)
        })
        .collect()
}

pub fn rotor_position(n: usize, i: usize) -> f64 {
    i as f64 / n as f64 - 0.5
}

pub fn rotor_momentum(n: usize, m: usize) -> f64 {
    m as f64 / n as f64 - 0.5
}

fn alternate_signs(v: &mut [C64]) {
    for z in v.iter_mut().skip(1).step_by(2) {
        *z = -*z;
    }
}

/// Position amplitudes to momentum amplitudes, with `⟨q|p⟩ ∝ e^{−2πiNpq}`
/// and the constant phase dropped.
pub fn rotor_to_momentum(plan: &DftPlan, psi: &mut [C64], scratch: &mut Vec<C64>) {
    alternate_signs(psi);
    plan.process_with_scratch(psi, scratch, Direction::Inverse);
    alternate_signs(psi);
}

/// Inverse of [`rotor_to_momentum`].
pub fn rotor_to_position(plan: &DftPlan, phi: &mut [C64], scratch: &mut Vec<C64>) {
    alternate_signs(phi);
    plan.process_with_scratch(phi, scratch, Direction::Forward);
    alternate_signs(phi);
}

impl KickedTop {
    pub fn spin(&self) -> SpinParameters {
        self.spin
    }

    fn apply(&self, psi: &mut [C64], out: &mut [C64]) {
        for (z, w) in psi.iter_mut().zip(&self.kick) {
            *z *= w;
        }
        self.rotation.matvec_into(psi, out);
    }
}

impl KickedRotor {
    pub fn n(&self) -> usize {
        self.n
    }

    fn apply(&self, psi: &mut [C64], fft: &mut Vec<C64>) {
        for (z, w) in psi.iter_mut().zip(&self.kick) {
            *z *= w;
        }
        rotor_to_momentum(&self.plan, psi, fft);
        for (z, w) in psi.iter_mut().zip(&self.kinetic) {
            *z *= w;
        }
        rotor_to_position(&self.plan, psi, fft);
    }
}

impl FloquetOperator {
    pub fn dim(&self) -> usize {
        match self {
            Self::Top(t) => t.spin.dim(),
            Self::Rotor(r) => r.n,
        }
    }

    pub fn kick_strength(&self) -> f64 {
        match self {
            Self::Top(t) => t.k,
            Self::Rotor(r) => r.k,
        }
    }

    /// Same system at a different kick strength, sharing the kick-independent factor.
    pub fn with_kick(&self, k: f64) -> Result<Self> {
        check_kick(k)?;
        Ok(match self {
            Self::Top(t) => Self::Top(KickedTop { k, kick: top_kick(t.spin, k), ..t.clone() }),
            Self::Rotor(r) => Self::Rotor(KickedRotor { k, kick: rotor_kick(r.n, k), ..r.clone() }),
        })
    }

    fn check_dim(&self, len: usize) -> Result<()> {
        if len != self.dim() {
            return Err(CoreError::DimensionMismatch { expected: self.dim(), actual: len });
        }
        Ok(())
    }

    /// `ψ ← Uψ`.
    pub fn apply_in_place(&self, psi: &mut Vec<C64>, ws: &mut Workspace) -> Result<()> {
        self.check_dim(psi.len())?;
        match self {
            Self::Top(t) => {
                ws.a.resize(psi.len(), C64::new(0.0, 0.0));
                t.apply(psi, &mut ws.a);
                std::mem::swap(psi, &mut ws.a);
            }
            Self::Rotor(r) => r.apply(psi, &mut ws.fft),
        }
        Ok(())
    }

    pub fn apply(&self, state: &QuantumState) -> Result<QuantumState> {
        let mut v = state.amplitudes().to_vec();
        self.apply_in_place(&mut v, &mut Workspace::default())?;
        QuantumState::from_amplitudes(v)
    }

    /// `(ψ, χ) ← (Uψ, Vχ)`, streaming a shared rotation matrix only once.
    pub fn apply_pair(u: &Self, v: &Self, psi: &mut Vec<C64>, chi: &mut Vec<C64>, ws: &mut Workspace) -> Result<()> {
        if let (Self::Top(a), Self::Top(b)) = (u, v) {
            if Arc::ptr_eq(&a.rotation, &b.rotation) {
                u.check_dim(psi.len())?;
                v.check_dim(chi.len())?;
                for (z, w) in psi.iter_mut().zip(&a.kick) {
                    *z *= w;
                }
                for (z, w) in chi.iter_mut().zip(&b.kick) {
                    *z *= w;
                }
                ws.a.resize(psi.len(), C64::new(0.0, 0.0));
                ws.b.resize(chi.len(), C64::new(0.0, 0.0));
                a.rotation.matvec_pair_into(psi, chi, &mut ws.a, &mut ws.b);
                std::mem::swap(psi, &mut ws.a);
                std::mem::swap(chi, &mut ws.b);
                return Ok(());
            }
        }
        u.apply_in_place(psi, ws)?;
        v.apply_in_place(chi, ws)
    }

    /// Dense unitary matrix in the position (rotor) or `J_z` (top) basis.
    pub fn materialize(&self) -> ComplexMatrix {
        match self {
            Self::Top(t) => {
                let n = t.spin.dim();
                ComplexMatrix::from_fn(n, n, |r, c| t.kick[c] * t.rotation[(r, c)])
            }
            Self::Rotor(r) => {
                let mut ws = Workspace::default();
                let columns: Vec<Vec<C64>> = (0..r.n)
                    .map(|j| {
                        let mut e = vec![C64::new(0.0, 0.0); r.n];
                        e[j] = C64::new(1.0, 0.0);
                        r.apply(&mut e, &mut ws.fft);
                        e
                    })
                    .collect();
                ComplexMatrix::from_columns(&columns)
            }
        }
    }
}

/// Minimum-uncertainty state on the `N`-point torus centered at `(q0, p0)`.
///
/// Periodized Gaussian of variance `1/(4πN)` in `q` times the plane wave
/// `e^{−2πiN p0 q}`, which is centered at `p0` in the momentum convention of
/// [`rotor_to_momentum`].
pub fn torus_coherent_state(n: usize, q0: f64, p0: f64) -> Result<QuantumState> {
    if n < 2 {
        return Err(invalid(format!("rotor dimension must be at least 2, got {n}")));
    }
    if !(-0.5..0.5).contains(&q0) || !(-0.5..0.5).contains(&p0) {
        return Err(invalid(format!("torus center ({q0}, {p0}) must lie in [−1/2, 1/2)²")));
    }
    let nf = n as f64;
    // Lattice translates with exp(−πN d²) < 1e−16 are dropped.
    let reach = (16.0 * std::f64::consts::LN_10 / (PI * nf)).sqrt().ceil() as i64 + 1;
    let amps = (0..n)
        .map(|i| {
            let q = rotor_position(n, i);
            let mut g = 0.0;
            for shift in -reach..=reach {
                let d = q - q0 + shift as f64;
                let e = -PI * nf * d * d;
                if e > -16.0 * std::f64::consts::LN_10 {
                    g += e.exp();
                }
            }
            C64::from_polar(g, -2.0 * PI * nf * p0 * q)
        })
        .collect();
    QuantumState::from_amplitudes(amps)
}

/// Momentum amplitudes of a rotor state.
pub fn rotor_momentum_amplitudes(state: &QuantumState) -> Vec<C64> {
    let mut v = state.amplitudes().to_vec();
    rotor_to_momentum(&DftPlan::new(v.len()), &mut v, &mut Vec::new());
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spin::angular_momentum_operators;
    use quasiecho_numerics::eig_hermitian;
    use quasiecho_numerics::linalg::norm;
    use rand::{Rng, SeedableRng};

    fn random_state(n: usize, seed: u64) -> QuantumState {
        let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
        QuantumState::from_amplitudes((0..n).map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect())
            .unwrap()
    }

    fn spectral_exp(a: &ComplexMatrix, scale: f64) -> ComplexMatrix {
        let es = eig_hermitian(a).unwrap();
        let n = a.rows();
        let v = &es.eigenvectors;
        let ph: Vec<C64> = es.eigenvalues.iter().map(|l| C64::from_polar(1.0, -scale * l.re)).collect();
        ComplexMatrix::from_fn(n, n, |r, c| (0..n).map(|j| v[(r, j)] * ph[j] * v[(c, j)].conj()).sum())
    }

    fn max_diff(a: &[C64], b: &[C64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
    }

    #[test]
    fn top_without_kick_is_rotation() {
        let spin = SpinParameters::new(3.0).unwrap();
        let u = qkt_floquet(spin, 0.0).unwrap().materialize();
        let r = crate::spin::rotation_pi2_about_y(spin).unwrap();
        assert!(u.max_abs_diff(&r) < 1e-15);
    }

    #[test]
    fn top_matches_brute_force_exponentials() {
        for j in [2.0, 3.5] {
            let spin = SpinParameters::new(j).unwrap();
            let k = 1.1;
            let o = angular_momentum_operators(spin);
            let jz2 = o.jz.matmul(&o.jz);
            let oracle = spectral_exp(&o.jy, PI / 2.0).matmul(&spectral_exp(&jz2, k / (2.0 * j)));
            let u = qkt_floquet(spin, k).unwrap().materialize();
            assert!(u.max_abs_diff(&oracle) < 1e-10, "J={j}");
        }
    }

    #[test]
    fn top_apply_matches_materialized() {
        let spin = SpinParameters::new(100.0).unwrap();
        let u = qkt_floquet(spin, 1.1).unwrap();
        let s = random_state(spin.dim(), 3);
        let dense = u.materialize().matvec(s.amplitudes());
        let mut v = s.amplitudes().to_vec();
        u.apply_in_place(&mut v, &mut Workspace::default()).unwrap();
        assert!(max_diff(&v, &dense) < 1e-12);
        assert!(u.materialize().unitary_deviation() < 1e-10);
    }

    #[test]
    fn pair_application_matches_separate() {
        let spin = SpinParameters::new(20.0).unwrap();
        let u = qkt_floquet(spin, 1.1).unwrap();
        let up = u.with_kick(1.101).unwrap();
        let s = random_state(spin.dim(), 9);
        let (mut a, mut b) = (s.amplitudes().to_vec(), s.amplitudes().to_vec());
        let mut ws = Workspace::default();
        FloquetOperator::apply_pair(&u, &up, &mut a, &mut b, &mut ws).unwrap();
        let (mut c, mut d) = (s.amplitudes().to_vec(), s.amplitudes().to_vec());
        u.apply_in_place(&mut c, &mut ws).unwrap();
        up.apply_in_place(&mut d, &mut ws).unwrap();
        assert_eq!(a, c);
        assert_eq!(b, d);
    }

    #[test]
    fn rotor_free_evolution_is_diagonal_in_momentum() {
        let n = 12;
        let u = qkr_floquet(n, 0.0).unwrap().materialize();
        let plan = DftPlan::new(n);
        for m in 0..n {
            // Momentum eigenstate |p_m⟩ in position space.
            let mut e = vec![C64::new(0.0, 0.0); n];
            e[m] = C64::new(1.0, 0.0);
            rotor_to_position(&plan, &mut e, &mut Vec::new());
            let ue = u.matvec(&e);
            let p = rotor_momentum(n, m);
            let phase = C64::from_polar(1.0, -PI * n as f64 * p * p);
            let want: Vec<C64> = e.iter().map(|z| z * phase).collect();
            assert!(max_diff(&ue, &want) < 1e-12, "m={m}");
        }
    }

    /// Dense rotor oracle from explicit `⟨q_n|p_m⟩ = e^{−2πiN p_m q_n}/√N`.
    fn dense_rotor(n: usize, k: f64) -> ComplexMatrix {
        let nf = n as f64;
        let f = ComplexMatrix::from_fn(n, n, |i, m| {
            C64::from_polar(1.0 / nf.sqrt(), -2.0 * PI * nf * rotor_momentum(n, m) * rotor_position(n, i))
        });
        let kin = ComplexMatrix::from_diagonal(
            &(0..n).map(|m| C64::from_polar(1.0, -PI * nf * rotor_momentum(n, m).powi(2))).collect::<Vec<_>>(),
        );
        let kick = ComplexMatrix::from_diagonal(
            &(0..n).map(|i| C64::from_polar(1.0, -k * (2.0 * PI * rotor_position(n, i)).cos() * nf / PI)).collect::<Vec<_>>(),
        );
        f.matmul(&kin).matmul(&f.adjoint()).matmul(&kick)
    }

    #[test]
    fn rotor_split_operator_matches_dense_oracle() {
        for n in [2, 7, 8, 16] {
            let op = qkr_floquet(n, 0.3).unwrap();
            let oracle = dense_rotor(n, 0.3);
            assert!(op.materialize().max_abs_diff(&oracle) < 1e-10, "N={n}");
        }
    }

    #[test]
    fn rotor_unitarity() {
        let op = qkr_floquet(500, 0.3).unwrap();
        let mut v = random_state(500, 5).into_amplitudes();
        let mut ws = Workspace::default();
        for _ in 0..10 {
            op.apply_in_place(&mut v, &mut ws).unwrap();
            assert!((norm(&v) - 1.0).abs() < 1e-12);
        }
        assert!(qkr_floquet(101, 0.3).unwrap().materialize().unitary_deviation() < 1e-10);
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let op = qkr_floquet(8, 0.3).unwrap();
        assert!(op.apply(&QuantumState::basis(9, 0)).is_err());
        assert!(qkr_floquet(1, 0.3).is_err());
    }

    fn circular_mean(probs: &[f64], coord: impl Fn(usize) -> f64) -> f64 {
        let (mut c, mut s) = (0.0, 0.0);
        for (i, p) in probs.iter().enumerate() {
            let a = 2.0 * PI * coord(i);
            c += p * a.cos();
            s += p * a.sin();
        }
        s.atan2(c) / (2.0 * PI)
    }

    #[test]
    fn torus_state_is_localized() {
        let n = 500;
        for (q0, p0) in [(-0.4, 0.1), (-0.1, -0.4), (0.25, 0.33)] {
            let s = torus_coherent_state(n, q0, p0).unwrap();
            assert!((norm(s.amplitudes()) - 1.0).abs() < 1e-12);
            let qm = circular_mean(&s.probabilities(), |i| rotor_position(n, i));
            assert!((qm - q0).abs() < 1e-6, "q mean {qm}");
            let mom: Vec<f64> = rotor_momentum_amplitudes(&s).iter().map(|z| z.norm_sqr()).collect();
            let pm = circular_mean(&mom, |m| rotor_momentum(n, m));
            assert!((pm - p0).abs() < 1e-6, "p mean {pm}");
        }
        assert!(torus_coherent_state(n, 0.5, 0.0).is_err());
    }
}
