//! Hermitian eigensolver: Householder reduction to a real symmetric
//! tridiagonal matrix followed by implicit QL iterations.

use num_complex::Complex64 as C64;

use crate::linalg::{inner, norm};
use crate::{tolerances, ComplexMatrix, EigenSystem, NumericsError, RealMatrix};

/// Tolerances and iteration limits shared by the eigensolvers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigOptions {
    pub hermitian_tol: f64,
    pub unitary_tol: f64,
    pub max_sweeps_per_eigenvalue: usize,
}

impl Default for EigOptions {
    fn default() -> Self {
        Self {
            hermitian_tol: tolerances::HERMITIAN,
            unitary_tol: tolerances::UNITARY,
            max_sweeps_per_eigenvalue: tolerances::MAX_SWEEPS_PER_EIGENVALUE,
        }
    }
}

pub fn eig_hermitian(a: &ComplexMatrix) -> Result<EigenSystem, NumericsError> {
    eig_hermitian_with(a, &EigOptions::default())
}

/// Eigenvalues come back real (stored as complex with zero imaginary part)
/// and ascending; eigenvectors are the matching orthonormal columns.
pub fn eig_hermitian_with(a: &ComplexMatrix, opts: &EigOptions) -> Result<EigenSystem, NumericsError> {
    if !a.is_square() {
        return Err(NumericsError::NotSquare { rows: a.rows(), cols: a.cols() });
    }
    let n = a.rows();
    if n == 0 {
        return Err(NumericsError::Empty("matrix"));
    }
    let deviation = a.hermitian_deviation();
    if deviation > opts.hermitian_tol * a.max_abs().max(1.0) {
        return Err(NumericsError::NotHermitian { deviation });
    }

    let (diag, off, q) = tridiagonalize(a);
    let (values, z) = symmetric_tridiagonal_eig_with(&diag, &off, opts)?;

    // eigenvectors = Q · Z, with Q already carrying the phase rotation.
    let mut vecs = ComplexMatrix::zeros(n, n);
    for r in 0..n {
        let qrow = q.row(r);
        let out = vecs.row_mut(r);
        for (k, &qk) in qrow.iter().enumerate() {
            if qk.re == 0.0 && qk.im == 0.0 {
                continue;
            }
            for (o, zkj) in out.iter_mut().zip(z.row(k)) {
                *o += qk * zkj;
            }
        }
    }
    let eigenvalues: Vec<C64> = values.iter().map(|&x| C64::new(x, 0.0)).collect();
    let residual_norm = EigenSystem::max_residual(a, &eigenvalues, &vecs);
    Ok(EigenSystem { eigenvalues, eigenvectors: vecs, residual_norm })
}

/// Reduces a Hermitian matrix to real tridiagonal form `A = Q T Q†`.
/// Returns the diagonal, the off-diagonal and `Q`.
fn tridiagonalize(a: &ComplexMatrix) -> (Vec<f64>, Vec<f64>, ComplexMatrix) {
    let n = a.rows();
    let mut h = a.clone();
    let mut q = ComplexMatrix::identity(n);
    let zero = C64::new(0.0, 0.0);

    for k in 0..n.saturating_sub(2) {
        let x: Vec<C64> = (k + 1..n).map(|i| h[(i, k)]).collect();
        let xnorm = norm(&x);
        if xnorm == 0.0 {
            continue;
        }
        let phase = if x[0].norm() > 0.0 { x[0] / x[0].norm() } else { C64::new(1.0, 0.0) };
        let alpha = -phase * xnorm;
        let mut v = x;
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        let tau = 2.0 / vnorm2;
        let m = n - k - 1;

        // p = tau · A22 v
        let mut p = vec![zero; m];
        for (i, pi) in p.iter_mut().enumerate() {
            let row = &h.row(k + 1 + i)[k + 1..];
            let mut acc = zero;
            for (aij, vj) in row.iter().zip(&v) {
                acc += aij * vj;
            }
            *pi = acc * tau;
        }
        let kk = inner(&v, &p) * (tau / 2.0);
        let w: Vec<C64> = p.iter().zip(&v).map(|(pi, vi)| pi - kk * vi).collect();
        for i in 0..m {
            let (vi, wi) = (v[i], w[i]);
            let row = &mut h.row_mut(k + 1 + i)[k + 1..];
            for ((aij, vj), wj) in row.iter_mut().zip(&v).zip(&w) {
                *aij -= vi * wj.conj() + wi * vj.conj();
            }
        }
        h[(k + 1, k)] = alpha;
        h[(k, k + 1)] = alpha.conj();
        for i in k + 2..n {
            h[(i, k)] = zero;
            h[(k, i)] = zero;
        }

        // Q ← Q (I − tau v v†)
        for r in 0..n {
            let row = &mut q.row_mut(r)[k + 1..];
            let mut s = zero;
            for (qrj, vj) in row.iter().zip(&v) {
                s += qrj * vj;
            }
            s *= tau;
            for (qrj, vj) in row.iter_mut().zip(&v) {
                *qrj -= s * vj.conj();
            }
        }
    }

    // Rotate away the phases of the complex off-diagonal.
    let diag: Vec<f64> = (0..n).map(|i| h[(i, i)].re).collect();
    let mut off = Vec::with_capacity(n.saturating_sub(1));
    let mut delta = C64::new(1.0, 0.0);
    let mut phases = vec![delta; n];
    for i in 0..n.saturating_sub(1) {
        let e = h[(i + 1, i)];
        let mag = e.norm();
        if mag > 0.0 {
            delta *= e / mag;
        }
        phases[i + 1] = delta;
        off.push(mag);
    }
    for r in 0..n {
        for (c, z) in q.row_mut(r).iter_mut().enumerate() {
            *z *= phases[c];
        }
    }
    (diag, off, q)
}

/// Eigen-decomposition of a real symmetric tridiagonal matrix given by its
/// diagonal and off-diagonal. Eigenvalues ascend; eigenvectors are the
/// columns of the returned matrix.
pub fn symmetric_tridiagonal_eig(diag: &[f64], off: &[f64]) -> Result<(Vec<f64>, RealMatrix), NumericsError> {
    symmetric_tridiagonal_eig_with(diag, off, &EigOptions::default())
}

fn symmetric_tridiagonal_eig_with(diag: &[f64], off: &[f64], opts: &EigOptions) -> Result<(Vec<f64>, RealMatrix), NumericsError> {
    let n = diag.len();
    if n == 0 {
        return Err(NumericsError::Empty("tridiagonal matrix"));
    }
    if off.len() + 1 != n {
        return Err(NumericsError::DimensionMismatch { expected: n - 1, actual: off.len() });
    }
    let mut d = diag.to_vec();
    let mut e = vec![0.0; n];
    e[..n - 1].copy_from_slice(off);
    // vt[i] is the i-th eigenvector (column i of V), kept contiguous for the
    // plane rotations.
    let mut vt = vec![0.0; n * n];
    for i in 0..n {
        vt[i * n + i] = 1.0;
    }
    ql_implicit(&mut d, &mut e, &mut vt, n, opts.max_sweeps_per_eigenvalue)?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].total_cmp(&d[b]));
    let values: Vec<f64> = order.iter().map(|&i| d[i]).collect();
    let mut v = RealMatrix::zeros(n, n);
    for (col, &src) in order.iter().enumerate() {
        for r in 0..n {
            v[(r, col)] = vt[src * n + r];
        }
    }
    Ok((values, v))
}

/// Implicit QL with Wilkinson-type shifts (the classic tql2 scheme).
/// `e[i]` couples `d[i]` and `d[i+1]`; `e[n-1]` must be zero.
fn ql_implicit(d: &mut [f64], e: &mut [f64], vt: &mut [f64], n: usize, max_sweeps: usize) -> Result<(), NumericsError> {
    let eps = f64::EPSILON;
    let mut f = 0.0;
    let mut tst1: f64 = 0.0;
    let mut total = 0usize;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                total += 1;
                if iter > max_sweeps {
                    return Err(NumericsError::NoConvergence { iterations: total });
                }
                let g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let h = g - d[l];
                for di in d.iter_mut().skip(l + 2) {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    let g = c * e[i];
                    let h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    let (lo, hi) = vt.split_at_mut((i + 1) * n);
                    let vi = &mut lo[i * n..];
                    let vi1 = &mut hi[..n];
                    for (a, b) in vi.iter_mut().zip(vi1.iter_mut()) {
                        let hh = *b;
                        *b = s * *a + c * hh;
                        *a = c * *a - s * hh;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn diagonal_matrix() {
        let a = ComplexMatrix::from_diagonal(&[c(3.0), c(1.0), c(2.0)]);
        let es = eig_hermitian(&a).unwrap();
        let vals: Vec<f64> = es.eigenvalues.iter().map(|z| z.re).collect();
        assert_eq!(vals, vec![1.0, 2.0, 3.0]);
        for (j, idx) in [1usize, 2, 0].iter().enumerate() {
            let v = es.vector(j);
            assert!((v[*idx].norm() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn pauli_x() {
        let a = ComplexMatrix::from_row_major(2, 2, vec![c(0.0), c(1.0), c(1.0), c(0.0)]).unwrap();
        let es = eig_hermitian(&a).unwrap();
        assert!((es.eigenvalues[0].re + 1.0).abs() < 1e-15);
        assert!((es.eigenvalues[1].re - 1.0).abs() < 1e-15);
        assert!(es.residual_norm < 1e-14);
    }

    #[test]
    fn rejects_non_hermitian() {
        let a = ComplexMatrix::from_row_major(2, 2, vec![c(0.0), c(1.0), c(2.0), c(0.0)]).unwrap();
        assert!(matches!(eig_hermitian(&a), Err(NumericsError::NotHermitian { .. })));
    }

    #[test]
    fn random_hermitian_reconstruction() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(11);
        for n in [1, 2, 3, 10, 57, 200] {
            let mut a = ComplexMatrix::zeros(n, n);
            for r in 0..n {
                a[(r, r)] = c(rng.gen_range(-1.0..1.0));
                for col in r + 1..n {
                    let z = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                    a[(r, col)] = z;
                    a[(col, r)] = z.conj();
                }
            }
            let es = eig_hermitian(&a).unwrap();
            let v = &es.eigenvectors;
            let lam = ComplexMatrix::from_diagonal(&es.eigenvalues);
            let rebuilt = v.matmul(&lam).matmul(&v.adjoint());
            let scale = a.frobenius_norm();
            assert!(rebuilt.sub(&a).frobenius_norm() <= 1e-8 * scale, "n={n}");
            assert!(es.orthonormality_error() < 1e-10);
            assert!(es.residual_norm <= 1e-9 * scale);
            assert!(es.eigenvalues.windows(2).all(|w| w[0].re <= w[1].re));
        }
    }

    #[test]
    fn tridiagonal_with_known_spectrum() {
        // Path graph Laplacian-like matrix: eigenvalues 2 - 2cos(kπ/(n+1)).
        let n = 40;
        let d = vec![2.0; n];
        let off = vec![-1.0; n - 1];
        let (vals, v) = symmetric_tridiagonal_eig(&d, &off).unwrap();
        for (k, val) in vals.iter().enumerate() {
            let exact = 2.0 - 2.0 * (std::f64::consts::PI * (k + 1) as f64 / (n + 1) as f64).cos();
            assert!((val - exact).abs() < 1e-12);
        }
        let vc = v.to_complex();
        assert!(vc.unitary_deviation() < 1e-12);
    }
}
