//! Unitary-normalized discrete Fourier transforms of arbitrary length.
//!
//! Lengths whose prime factors are all small use a recursive mixed-radix
//! decimation-in-time transform; lengths with a large prime factor go through
//! Bluestein's chirp-z reformulation on a power-of-two grid.
//!
//! The forward kernel is `e^{-2πi jk/N}`, the inverse kernel `e^{+2πi jk/N}`,
//! and both carry a `1/√N` factor so that the pair is unitary.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;

use crate::ComplexVector;

/// Prime factors above this size are handled by Bluestein instead of a
/// direct radix-p butterfly.
const MAX_DIRECT_RADIX: usize = 61;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Inverse,
}

/// Precomputed transform of a fixed length.
#[derive(Debug, Clone)]
pub struct DftPlan {
    len: usize,
    algo: Algorithm,
}

#[derive(Debug, Clone)]
enum Algorithm {
    MixedRadix(MixedRadix),
    Bluestein(Box<Bluestein>),
}

#[derive(Debug, Clone)]
struct MixedRadix {
    factors: Vec<usize>,
    /// `roots[j] = e^{-2πi j/len}`.
    roots: Vec<C64>,
}

#[derive(Debug, Clone)]
struct Bluestein {
    /// `chirp[k] = e^{-iπ k²/len}`.
    chirp: Vec<C64>,
    /// Forward transform of the zero-padded conjugate chirp.
    kernel: Vec<C64>,
    inner: MixedRadix,
}

impl DftPlan {
    /// # Panics
    /// Panics if `len == 0`.
    pub fn new(len: usize) -> Self {
        assert!(len > 0, "DFT length must be positive");
        let factors = factorize(len);
        let algo = if factors.iter().all(|&p| p <= MAX_DIRECT_RADIX) {
            Algorithm::MixedRadix(MixedRadix::new(len))
        } else {
            Algorithm::Bluestein(Box::new(Bluestein::new(len)))
        };
        Self { len, algo }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Transforms `data` in place with unitary normalization.
    pub fn process(&self, data: &mut [C64], direction: Direction) {
        let mut scratch = Vec::new();
        self.process_with_scratch(data, &mut scratch, direction);
    }

    /// Like [`process`](Self::process) but reuses a caller-owned scratch buffer.
    pub fn process_with_scratch(&self, data: &mut [C64], scratch: &mut Vec<C64>, direction: Direction) {
        assert_eq!(data.len(), self.len, "DFT length mismatch");
        let inverse = direction == Direction::Inverse;
        match &self.algo {
            Algorithm::MixedRadix(mr) => mr.run(data, scratch, inverse),
            Algorithm::Bluestein(b) => b.run(data, scratch, inverse),
        }
        let s = 1.0 / (self.len as f64).sqrt();
        for z in data.iter_mut() {
            *z *= s;
        }
    }
}

/// Transforms a vector, returning a new one.
pub fn dft(v: &ComplexVector, direction: Direction) -> ComplexVector {
    let mut data = v.as_slice().to_vec();
    DftPlan::new(data.len()).process(&mut data, direction);
    ComplexVector::new(data).expect("transform of finite input is finite")
}

fn factorize(mut n: usize) -> Vec<usize> {
    let mut out = Vec::new();
    // Peel radix 4 first where possible: fewer recursion levels.
    while n.is_multiple_of(4) {
        out.push(4);
        n /= 4;
    }
    let mut p = 2;
    while p * p <= n {
        while n.is_multiple_of(p) {
            out.push(p);
            n /= p;
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn unit_roots(n: usize) -> Vec<C64> {
    (0..n)
        .map(|j| {
            let a = -2.0 * PI * j as f64 / n as f64;
            C64::new(a.cos(), a.sin())
        })
        .collect()
}

impl MixedRadix {
    fn new(len: usize) -> Self {
        Self { factors: factorize(len), roots: unit_roots(len) }
    }

    /// Unnormalized transform.
    fn run(&self, data: &mut [C64], scratch: &mut Vec<C64>, inverse: bool) {
        let n = data.len();
        if n == 1 {
            return;
        }
        let maxp = self.factors.iter().copied().max().unwrap_or(1);
        scratch.clear();
        scratch.resize(n + maxp, C64::new(0.0, 0.0));
        let (out, tmp) = scratch.split_at_mut(n);
        self.recurse(data, 1, out, &self.factors, 1, tmp, inverse);
        data.copy_from_slice(out);
    }

    #[allow(clippy::too_many_arguments)]
    fn recurse(
        &self,
        x: &[C64],
        stride: usize,
        out: &mut [C64],
        factors: &[usize],
        root_step: usize,
        tmp: &mut [C64],
        inverse: bool,
    ) {
        let n = out.len();
        let Some((&p, rest)) = factors.split_first() else {
            out[0] = x[0];
            return;
        };
        let m = n / p;
        for j in 0..p {
            self.recurse(&x[j * stride..], stride * p, &mut out[j * m..(j + 1) * m], rest, root_step * p, tmp, inverse);
        }
        let total = self.roots.len();
        let root = |e: usize| {
            let w = self.roots[(e * root_step) % total];
            if inverse {
                w.conj()
            } else {
                w
            }
        };
        let prime_step = total / p;
        let t = &mut tmp[..p];
        match p {
            2 => {
                for k in 0..m {
                    let a = out[k];
                    let b = out[m + k] * root(k);
                    out[k] = a + b;
                    out[m + k] = a - b;
                }
            }
            4 => {
                // ±i rotation depends on direction.
                let rot = if inverse { C64::new(0.0, 1.0) } else { C64::new(0.0, -1.0) };
                for k in 0..m {
                    let a0 = out[k];
                    let a1 = out[m + k] * root(k);
                    let a2 = out[2 * m + k] * root(2 * k);
                    let a3 = out[3 * m + k] * root(3 * k);
                    let s02 = a0 + a2;
                    let d02 = a0 - a2;
                    let s13 = a1 + a3;
                    let d13 = (a1 - a3) * rot;
                    out[k] = s02 + s13;
                    out[m + k] = d02 + d13;
                    out[2 * m + k] = s02 - s13;
                    out[3 * m + k] = d02 - d13;
                }
            }
            _ => {
                for k in 0..m {
                    for (j, tj) in t.iter_mut().enumerate() {
                        *tj = out[j * m + k] * root(j * k);
                    }
                    for q in 0..p {
                        let mut acc = t[0];
                        for (j, tj) in t.iter().enumerate().skip(1) {
                            let w = self.roots[((j * q) % p) * prime_step];
                            acc += tj * if inverse { w.conj() } else { w };
                        }
                        out[q * m + k] = acc;
                    }
                }
            }
        }
    }
}

impl Bluestein {
    fn new(len: usize) -> Self {
        let padded = (2 * len - 1).next_power_of_two();
        let chirp: Vec<C64> = (0..len)
            .map(|k| {
                // k² mod 2·len keeps the phase argument small and exact.
                let e = ((k as u128 * k as u128) % (2 * len as u128)) as f64;
                let a = -PI * e / len as f64;
                C64::new(a.cos(), a.sin())
            })
            .collect();
        let mut kernel = vec![C64::new(0.0, 0.0); padded];
        kernel[0] = chirp[0].conj();
        for k in 1..len {
            kernel[k] = chirp[k].conj();
            kernel[padded - k] = chirp[k].conj();
        }
        let inner = MixedRadix::new(padded);
        let mut scratch = Vec::new();
        inner.run(&mut kernel, &mut scratch, false);
        Self { chirp, kernel, inner }
    }

    fn run(&self, data: &mut [C64], scratch: &mut Vec<C64>, inverse: bool) {
        let n = data.len();
        let m = self.kernel.len();
        // The inverse transform is the conjugate of the forward transform of
        // the conjugated input.
        let mut work = vec![C64::new(0.0, 0.0); m];
        for k in 0..n {
            let x = if inverse { data[k].conj() } else { data[k] };
            work[k] = x * self.chirp[k];
        }
        self.inner.run(&mut work, scratch, false);
        for (w, k) in work.iter_mut().zip(&self.kernel) {
            *w *= k;
        }
        self.inner.run(&mut work, scratch, true);
        let s = 1.0 / m as f64;
        for k in 0..n {
            let y = work[k] * self.chirp[k] * s;
            data[k] = if inverse { y.conj() } else { y };
        }
    }
}
