//! Unitary eigensolver.
//!
//! The matrix is reduced to upper Hessenberg form with Householder
//! reflectors and then driven to Schur form by single-shift complex QR
//! sweeps. A unitary matrix is normal, so its Schur form is diagonal and the
//! accumulated Schur vectors are already an orthonormal eigenbasis. Only the
//! diagonal blocks are ever updated; the strictly upper part of the Schur
//! form is never needed.

use num_complex::Complex64 as C64;

use crate::linalg::norm;
use crate::{ComplexMatrix, EigOptions, EigenSystem, NumericsError};

pub fn eig_unitary(u: &ComplexMatrix) -> Result<EigenSystem, NumericsError> {
    eig_unitary_with(u, &EigOptions::default())
}

/// Eigenpairs are ordered by eigenphase ascending in `(-π, π]`.
pub fn eig_unitary_with(u: &ComplexMatrix, opts: &EigOptions) -> Result<EigenSystem, NumericsError> {
    if !u.is_square() {
        return Err(NumericsError::NotSquare { rows: u.rows(), cols: u.cols() });
    }
    let n = u.rows();
    if n == 0 {
        return Err(NumericsError::Empty("matrix"));
    }
    let deviation = u.unitary_deviation();
    if deviation > opts.unitary_tol {
        return Err(NumericsError::NotUnitary { deviation });
    }

    let (mut h, z) = hessenberg(u);
    let mut zt = transpose(&z);
    qr_sweeps(&mut h, &mut zt, n, opts.max_sweeps_per_eigenvalue)?;

    let values: Vec<C64> = (0..n).map(|i| h[i * n + i]).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].arg().total_cmp(&values[b].arg()));
    let eigenvalues: Vec<C64> = order.iter().map(|&i| values[i]).collect();
    let eigenvectors = ComplexMatrix::from_fn(n, n, |r, c| zt[order[c] * n + r]);
    let residual_norm = EigenSystem::max_residual(u, &eigenvalues, &eigenvectors);
    Ok(EigenSystem { eigenvalues, eigenvectors, residual_norm })
}

fn transpose(m: &ComplexMatrix) -> Vec<C64> {
    let n = m.rows();
    let mut out = vec![C64::new(0.0, 0.0); n * n];
    for r in 0..n {
        for (c, &v) in m.row(r).iter().enumerate() {
            out[c * n + r] = v;
        }
    }
    out
}

/// Returns the Hessenberg matrix (row-major, flat) and the accumulated
/// unitary `Z` with `A = Z H Z†`.
fn hessenberg(a: &ComplexMatrix) -> (Vec<C64>, ComplexMatrix) {
    let n = a.rows();
    let zero = C64::new(0.0, 0.0);
    let mut h = a.as_slice().to_vec();
    let mut z = ComplexMatrix::identity(n);
    let mut s = vec![zero; n];

    for k in 0..n.saturating_sub(2) {
        let x: Vec<C64> = (k + 1..n).map(|i| h[i * n + k]).collect();
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

        // Left: rows k+1.., columns k.. ← (I − τ v v†) · block
        let sj = &mut s[k..n];
        sj.iter_mut().for_each(|x| *x = zero);
        for (i, vi) in v.iter().enumerate() {
            let row = &h[(k + 1 + i) * n + k..(k + 2 + i) * n];
            let cv = vi.conj();
            for (acc, hij) in sj.iter_mut().zip(row) {
                *acc += cv * hij;
            }
        }
        for (i, vi) in v.iter().enumerate() {
            let row = &mut h[(k + 1 + i) * n + k..(k + 2 + i) * n];
            let f = vi * tau;
            for (hij, acc) in row.iter_mut().zip(sj.iter()) {
                *hij -= f * acc;
            }
        }
        // Right: all rows, columns k+1.. ← block · (I − τ v v†)
        for r in 0..n {
            let row = &mut h[r * n + k + 1..(r + 1) * n];
            let mut t = zero;
            for (hri, vi) in row.iter().zip(&v) {
                t += hri * vi;
            }
            t *= tau;
            for (hri, vi) in row.iter_mut().zip(&v) {
                *hri -= t * vi.conj();
            }
        }
        h[(k + 1) * n + k] = alpha;
        for i in k + 2..n {
            h[i * n + k] = zero;
        }
        for r in 0..n {
            let row = &mut z.row_mut(r)[k + 1..];
            let mut t = zero;
            for (zri, vi) in row.iter().zip(&v) {
                t += zri * vi;
            }
            t *= tau;
            for (zri, vi) in row.iter_mut().zip(&v) {
                *zri -= t * vi.conj();
            }
        }
    }
    (h, z)
}

/// Complex Givens rotation `G = [[c, s], [-conj(s), c]]` with `G·[x; y] = [r; 0]`.
fn givens(x: C64, y: C64) -> (f64, C64) {
    let ax = x.norm();
    let ay = y.norm();
    if ay == 0.0 {
        return (1.0, C64::new(0.0, 0.0));
    }
    if ax == 0.0 {
        return (0.0, y.conj() / ay);
    }
    let r = ax.hypot(ay);
    (ax / r, (x / ax) * y.conj() / r)
}

/// Eigenvalue of the 2×2 block `[[a, b], [c, d]]` closest to `d`.
fn wilkinson_shift(a: C64, b: C64, c: C64, d: C64) -> C64 {
    let half = (a - d) * 0.5;
    let disc = (half * half + b * c).sqrt();
    let mean = (a + d) * 0.5;
    let l1 = mean + disc;
    let l2 = mean - disc;
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

fn qr_sweeps(h: &mut [C64], zt: &mut [C64], n: usize, max_sweeps: usize) -> Result<(), NumericsError> {
    let eps = f64::EPSILON;
    let scale = (norm(h) / (n as f64).sqrt()).max(f64::MIN_POSITIVE);
    let budget = max_sweeps * n.max(1);
    let mut total = 0usize;
    let mut its = 0usize;
    let mut hi = n - 1;

    while hi > 0 {
        // Locate the top of the unreduced block ending at `hi`.
        let mut lo = hi;
        while lo > 0 {
            let sub = h[lo * n + lo - 1].norm();
            let diag = h[(lo - 1) * n + lo - 1].norm() + h[lo * n + lo].norm();
            if sub <= eps * diag || sub <= eps * scale {
                h[lo * n + lo - 1] = C64::new(0.0, 0.0);
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            hi -= 1;
            its = 0;
            continue;
        }

        its += 1;
        total += 1;
        if total > budget {
            return Err(NumericsError::NoConvergence { iterations: total });
        }
        let shift = if its.is_multiple_of(10) {
            // Exceptional shift to break rare cycling.
            h[hi * n + hi] + 0.75 * h[hi * n + hi - 1].re.abs()
        } else {
            wilkinson_shift(h[(hi - 1) * n + hi - 1], h[(hi - 1) * n + hi], h[hi * n + hi - 1], h[hi * n + hi])
        };

        for k in lo..hi {
            let (x, y) =
                if k == lo { (h[lo * n + lo] - shift, h[(lo + 1) * n + lo]) } else { (h[k * n + k - 1], h[(k + 1) * n + k - 1]) };
            let (c, s) = givens(x, y);
            let sc = s.conj();

            // Left: rows k, k+1.
            let start = if k == lo { lo } else { k - 1 };
            let (top, bottom) = h.split_at_mut((k + 1) * n);
            let rk = &mut top[k * n + start..k * n + hi + 1];
            let rk1 = &mut bottom[start..hi + 1];
            for (a, b) in rk.iter_mut().zip(rk1.iter_mut()) {
                let (va, vb) = (*a, *b);
                *a = c * va + s * vb;
                *b = c * vb - sc * va;
            }
            if k > lo {
                h[(k + 1) * n + k - 1] = C64::new(0.0, 0.0);
            }

            // Right: columns k, k+1.
            let last = (k + 2).min(hi);
            for i in lo..=last {
                let va = h[i * n + k];
                let vb = h[i * n + k + 1];
                h[i * n + k] = c * va + sc * vb;
                h[i * n + k + 1] = c * vb - s * va;
            }

            // Schur vectors: columns k, k+1 of Z are rows of `zt`.
            let (zlo, zhi) = zt.split_at_mut((k + 1) * n);
            let zk = &mut zlo[k * n..];
            let zk1 = &mut zhi[..n];
            for (a, b) in zk.iter_mut().zip(zk1.iter_mut()) {
                let (va, vb) = (*a, *b);
                *a = c * va + sc * vb;
                *b = c * vb - s * va;
            }
        }
    }
    Ok(())
}
