//! Independent dense oracles shared by the integration tests.
#![allow(dead_code)]

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use quasiecho_core::kicked::floquet::{rotor_momentum, rotor_position};
use quasiecho_core::spin::{angular_momentum_operators, SpinParameters};
use quasiecho_core::QuantumState;
use quasiecho_numerics::{eig_hermitian, ComplexMatrix};

/// `exp(−i s H)` for Hermitian `H` via its eigensystem.
pub fn expm_hermitian(h: &ComplexMatrix, s: f64) -> ComplexMatrix {
    let es = eig_hermitian(h).unwrap();
    let d: Vec<C64> = es.eigenvalues.iter().map(|l| C64::from_polar(1.0, -s * l.re)).collect();
    es.eigenvectors.matmul(&ComplexMatrix::from_diagonal(&d)).matmul(&es.eigenvectors.adjoint())
}

/// Kicked-top Floquet matrix `exp(−iπJy/2) exp(−ik Jz²/2J)` from dense generators.
pub fn dense_top(j: f64, k: f64) -> ComplexMatrix {
    let o = angular_momentum_operators(SpinParameters::new(j).unwrap());
    let jz2 = o.jz.matmul(&o.jz);
    expm_hermitian(&o.jy, PI / 2.0).matmul(&expm_hermitian(&jz2, k / (2.0 * j)))
}

/// Kicked-rotor Floquet matrix from explicit `⟨q_n|p_m⟩ = e^{−2πiN p_m q_n}/√N`.
pub fn dense_rotor(n: usize, k: f64) -> ComplexMatrix {
    let nf = n as f64;
    let f = ComplexMatrix::from_fn(n, n, |i, m| {
        C64::from_polar(1.0 / nf.sqrt(), -2.0 * PI * nf * rotor_momentum(n, m) * rotor_position(n, i))
    });
    let kin: Vec<C64> = (0..n).map(|m| C64::from_polar(1.0, -PI * nf * rotor_momentum(n, m).powi(2))).collect();
    let kick: Vec<C64> = (0..n).map(|i| C64::from_polar(1.0, -k * (2.0 * PI * rotor_position(n, i)).cos() * nf / PI)).collect();
    f.matmul(&ComplexMatrix::from_diagonal(&kin)).matmul(&f.adjoint()).matmul(&ComplexMatrix::from_diagonal(&kick))
}

/// `|⟨ψ|U^{−t} U_p^t|ψ⟩|²` with explicit matrix powers.
pub fn direct_fidelity(u: &ComplexMatrix, up: &ComplexMatrix, psi: &QuantumState, horizon: usize) -> Vec<f64> {
    let n = u.rows();
    let mut ut = ComplexMatrix::identity(n);
    let mut upt = ComplexMatrix::identity(n);
    let mut out = Vec::with_capacity(horizon + 1);
    for t in 0..=horizon {
        if t > 0 {
            ut = u.matmul(&ut);
            upt = up.matmul(&upt);
        }
        let echo = ut.adjoint().matmul(&upt);
        let v = echo.matvec(psi.amplitudes());
        let amp: C64 = psi.amplitudes().iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
        out.push(amp.norm_sqr());
    }
    out
}

pub fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}
