//! Dense complex vectors and matrices.

use std::ops::{Index, IndexMut};

use num_complex::Complex64 as C64;

use crate::NumericsError;

/// A non-empty vector of finite complex amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexVector(Vec<C64>);

impl ComplexVector {
    pub fn new(entries: Vec<C64>) -> Result<Self, NumericsError> {
        if entries.is_empty() {
            return Err(NumericsError::Empty("vector"));
        }
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(NumericsError::NonFinite("vector"));
        }
        Ok(Self(entries))
    }

    /// Standard basis vector `e_index` of length `len`.
    pub fn basis(len: usize, index: usize) -> Self {
        assert!(index < len, "basis index out of range");
        let mut v = vec![C64::new(0.0, 0.0); len];
        v[index] = C64::new(1.0, 0.0);
        Self(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.0
    }

    pub fn as_mut_slice(&mut self) -> &mut [C64] {
        &mut self.0
    }

    pub fn into_vec(self) -> Vec<C64> {
        self.0
    }

    pub fn norm(&self) -> f64 {
        norm(&self.0)
    }

    /// `⟨self|other⟩`, conjugate-linear in `self`.
    pub fn inner(&self, other: &Self) -> C64 {
        inner(&self.0, &other.0)
    }
}

impl Index<usize> for ComplexVector {
    type Output = C64;
    fn index(&self, i: usize) -> &C64 {
        &self.0[i]
    }
}

/// `Σ conj(a_i) b_i`.
pub fn inner(a: &[C64], b: &[C64]) -> C64 {
    debug_assert_eq!(a.len(), b.len());
    let mut re = 0.0;
    let mut im = 0.0;
    for (x, y) in a.iter().zip(b) {
        re += x.re * y.re + x.im * y.im;
        im += x.re * y.im - x.im * y.re;
    }
    C64::new(re, im)
}

pub fn norm(a: &[C64]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Row-major dense complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![C64::new(0.0, 0.0); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_diagonal(diag: &[C64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_row_major(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self, NumericsError> {
        if rows == 0 || cols == 0 {
            return Err(NumericsError::Empty("matrix"));
        }
        if data.len() != rows * cols {
            return Err(NumericsError::DimensionMismatch { expected: rows * cols, actual: data.len() });
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(NumericsError::NonFinite("matrix"));
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_columns(columns: &[Vec<C64>]) -> Self {
        let cols = columns.len();
        let rows = columns.first().map_or(0, Vec::len);
        Self::from_fn(rows, cols, |r, c| columns[c][r])
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn row(&self, r: usize) -> &[C64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_mut(&mut self, r: usize) -> &mut [C64] {
        &mut self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<C64> {
        (0..self.rows).map(|r| self[(r, c)]).collect()
    }

    pub fn diagonal(&self) -> Vec<C64> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    pub fn scale(&self, s: C64) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|z| z * s).collect() }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect() }
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matmul shape mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            let out_row = &mut out.data[r * other.cols..(r + 1) * other.cols];
            for k in 0..self.cols {
                let a = self.data[r * self.cols + k];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                for (o, b) in out_row.iter_mut().zip(other.row(k)) {
                    *o += a * b;
                }
            }
        }
        out
    }

    pub fn matvec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.cols, v.len(), "matvec shape mismatch");
        (0..self.rows).map(|r| row_dot(self.row(r), v)).collect()
    }

    /// Largest entrywise modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        norm(&self.data)
    }

    /// Largest entrywise `|A_ij - conj(A_ji)|`.
    pub fn hermitian_deviation(&self) -> f64 {
        let mut dev: f64 = 0.0;
        for r in 0..self.rows {
            for c in r..self.cols {
                dev = dev.max((self[(r, c)] - self[(c, r)].conj()).norm());
            }
        }
        dev
    }

    /// Largest entrywise deviation of `A†A` from the identity.
    pub fn unitary_deviation(&self) -> f64 {
        let gram = self.adjoint().matmul(self);
        gram.max_abs_diff(&Self::identity(self.cols))
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    fn index(&self, (r, c): (usize, usize)) -> &C64 {
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut C64 {
        &mut self.data[r * self.cols + c]
    }
}

#[inline]
fn row_dot(row: &[C64], v: &[C64]) -> C64 {
    let mut re = 0.0;
    let mut im = 0.0;
    for (a, b) in row.iter().zip(v) {
        re += a.re * b.re - a.im * b.im;
        im += a.re * b.im + a.im * b.re;
    }
    C64::new(re, im)
}

/// Row-major dense real matrix, used for real orthogonal factors such as the
/// Wigner rotation matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct RealMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl RealMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn to_complex(&self) -> ComplexMatrix {
        ComplexMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&x| C64::new(x, 0.0)).collect() }
    }

    /// Real part of a complex matrix; fails if any imaginary part exceeds `tol`.
    pub fn from_complex(m: &ComplexMatrix, tol: f64) -> Option<Self> {
        if m.data.iter().any(|z| z.im.abs() > tol) {
            return None;
        }
        Some(Self { rows: m.rows, cols: m.cols, data: m.data.iter().map(|z| z.re).collect() })
    }

    /// `out = self · v` for a complex vector.
    pub fn matvec_into(&self, v: &[C64], out: &mut [C64]) {
        assert_eq!(self.cols, v.len());
        assert_eq!(self.rows, out.len());
        for (r, o) in out.iter_mut().enumerate() {
            let row = self.row(r);
            let mut re = 0.0;
            let mut im = 0.0;
            for (a, b) in row.iter().zip(v) {
                re += a * b.re;
                im += a * b.im;
            }
            *o = C64::new(re, im);
        }
    }

    /// Applies the matrix to two vectors in a single pass over its entries.
    pub fn matvec_pair_into(&self, v: &[C64], w: &[C64], out_v: &mut [C64], out_w: &mut [C64]) {
        assert_eq!(self.cols, v.len());
        assert_eq!(self.cols, w.len());
        for r in 0..self.rows {
            let row = self.row(r);
            let (mut vr, mut vi, mut wr, mut wi) = (0.0, 0.0, 0.0, 0.0);
            for ((a, x), y) in row.iter().zip(v).zip(w) {
                vr += a * x.re;
                vi += a * x.im;
                wr += a * y.re;
                wi += a * y.im;
            }
            out_v[r] = C64::new(vr, vi);
            out_w[r] = C64::new(wr, wi);
        }
    }
}

impl Index<(usize, usize)> for RealMatrix {
    type Output = f64;
    fn index(&self, (r, c): (usize, usize)) -> &f64 {
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for RealMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut f64 {
        &mut self.data[r * self.cols + c]
    }
}

/// Eigenvalues and orthonormal eigenvectors (stored as matrix columns).
#[derive(Debug, Clone, PartialEq)]
pub struct EigenSystem {
    pub eigenvalues: Vec<C64>,
    pub eigenvectors: ComplexMatrix,
    /// Largest `‖A v_j − λ_j v_j‖` over all pairs.
    pub residual_norm: f64,
}

impl EigenSystem {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn vector(&self, j: usize) -> Vec<C64> {
        self.eigenvectors.column(j)
    }

    /// Largest entrywise deviation of `V†V` from the identity.
    pub fn orthonormality_error(&self) -> f64 {
        self.eigenvectors.unitary_deviation()
    }

    /// Computes `max_j ‖A v_j − λ_j v_j‖`.
    pub fn max_residual(a: &ComplexMatrix, values: &[C64], vectors: &ComplexMatrix) -> f64 {
        let av = a.matmul(vectors);
        let mut worst: f64 = 0.0;
        for (j, &lambda) in values.iter().enumerate() {
            let mut s = 0.0;
            for r in 0..a.rows() {
                s += (av[(r, j)] - lambda * vectors[(r, j)]).norm_sqr();
            }
            worst = worst.max(s.sqrt());
        }
        worst
    }
}
