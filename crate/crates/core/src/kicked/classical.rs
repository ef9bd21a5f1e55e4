//! Classical kicked-top and standard (kicked-rotor) maps.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::spin::SphereCoordinate;

/// Renormalize top orbits to the unit sphere this often.
const RENORMALIZE_EVERY: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TopPoint {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl TopPoint {
    /// Requires `x² + y² + z² = 1` to 1e−12.
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        let n2 = x * x + y * y + z * z;
        if !n2.is_finite() || (n2 - 1.0).abs() > 1e-12 {
            return Err(invalid(format!("top point must lie on the unit sphere, |r|² = {n2}")));
        }
        Ok(Self { x, y, z })
    }

    pub fn from_sphere(c: SphereCoordinate) -> Self {
        let [x, y, z] = c.unit_vector();
        Self { x, y, z }
    }

    /// `(φ, θ)` with `φ = atan2(y, x)` and `θ = arccos z`.
    pub fn angles(&self) -> (f64, f64) {
        (self.y.atan2(self.x), self.z.clamp(-1.0, 1.0).acos())
    }

    pub fn norm(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    fn renormalized(self) -> Self {
        let n = self.norm();
        Self { x: self.x / n, y: self.y / n, z: self.z / n }
    }
}

/// Wraps into `[−1/2, 1/2)`.
pub fn wrap_unit(v: f64) -> f64 {
    let w = v - (v + 0.5).floor();
    if w >= 0.5 {
        -0.5
    } else {
        w
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RotorPoint {
    pub q: f64,
    pub p: f64,
}

impl RotorPoint {
    /// Wraps both coordinates into `[−1/2, 1/2)`.
    pub fn new(q: f64, p: f64) -> Result<Self> {
        if !q.is_finite() || !p.is_finite() {
            return Err(invalid("rotor coordinates must be finite"));
        }
        Ok(Self { q: wrap_unit(q), p: wrap_unit(p) })
    }

    /// Rejects coordinates outside `[−1/2, 1/2)` instead of wrapping.
    pub fn strict(q: f64, p: f64) -> Result<Self> {
        if !(-0.5..0.5).contains(&q) || !(-0.5..0.5).contains(&p) {
            return Err(invalid(format!("rotor point ({q}, {p}) must lie in [−1/2, 1/2)²")));
        }
        Ok(Self { q, p })
    }
}

pub fn classical_top_step(pt: TopPoint, k: f64) -> TopPoint {
    let (s, c) = (k * pt.z).sin_cos();
    TopPoint { x: pt.z, y: pt.x * s + pt.y * c, z: -pt.x * c + pt.y * s }
}

pub fn classical_rotor_step(pt: RotorPoint, k: f64) -> RotorPoint {
    let p = wrap_unit(pt.p + k / (2.0 * PI) * (2.0 * PI * pt.q).sin());
    RotorPoint { q: wrap_unit(pt.q + p), p }
}

pub fn classical_rotor_step_inverse(pt: RotorPoint, k: f64) -> RotorPoint {
    let q = wrap_unit(pt.q - pt.p);
    RotorPoint { q, p: wrap_unit(pt.p - k / (2.0 * PI) * (2.0 * PI * q).sin()) }
}

/// An area-preserving map iterated for phase portraits.
pub trait ClassicalMap: Sync {
    type Point: Copy + Send + Sync;
    fn step(&self, pt: Self::Point) -> Self::Point;
    /// Projects accumulated round-off back onto the phase space.
    fn renormalize(&self, pt: Self::Point) -> Self::Point {
        pt
    }
}

#[derive(Debug, Clone, Copy)]
pub struct TopMap {
    pub k: f64,
}

impl ClassicalMap for TopMap {
    type Point = TopPoint;
    fn step(&self, pt: TopPoint) -> TopPoint {
        classical_top_step(pt, self.k)
    }
    fn renormalize(&self, pt: TopPoint) -> TopPoint {
        pt.renormalized()
    }
}

#[derive(Debug, Clone, Copy)]
pub struct RotorMap {
    pub k: f64,
}

impl ClassicalMap for RotorMap {
    type Point = RotorPoint;
    fn step(&self, pt: RotorPoint) -> RotorPoint {
        classical_rotor_step(pt, self.k)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalOrbit<P> {
    pub seed: P,
    /// `points[0]` is the seed; `points[s]` is the seed after `s` steps.
    pub points: Vec<P>,
}

impl<P> ClassicalOrbit<P> {
    pub fn steps(&self) -> usize {
        self.points.len() - 1
    }
}

impl ClassicalOrbit<TopPoint> {
    pub fn angles(&self) -> Vec<(f64, f64)> {
        self.points.iter().map(TopPoint::angles).collect()
    }
}

pub fn iterate<M: ClassicalMap>(map: &M, seed: M::Point, steps: usize) -> ClassicalOrbit<M::Point> {
    let mut points = Vec::with_capacity(steps + 1);
    points.push(seed);
    let mut cur = seed;
    for s in 1..=steps {
        cur = map.step(cur);
        if s % RENORMALIZE_EVERY == 0 {
            cur = map.renormalize(cur);
        }
        points.push(cur);
    }
    ClassicalOrbit { seed, points }
}

/// One orbit per seed, in seed order.
pub fn generate_portrait<M: ClassicalMap>(map: &M, seeds: &[M::Point], steps: usize) -> Vec<ClassicalOrbit<M::Point>> {
    use rayon::prelude::*;
    seeds.par_iter().map(|&s| iterate(map, s, steps)).collect()
}

/// 25 top seeds on the odd rows and columns of the coherent-state grid.
pub fn default_top_seeds() -> Vec<TopPoint> {
    use crate::spin::GridIndex;
    let mut out = Vec::with_capacity(25);
    for r in [1u32, 3, 5, 7, 9] {
        for c in [1u32, 3, 5, 7, 9] {
            let g = GridIndex::new(10 * (r - 1) + c).expect("grid index in range");
            out.push(TopPoint::from_sphere(g.location()));
        }
    }
    out
}

/// `n` rotor seeds along `q = −1/2`, spread over `p ∈ (0, 1/2)`.
pub fn default_rotor_seeds(n: usize) -> Vec<RotorPoint> {
    (0..n).map(|i| RotorPoint { q: -0.5, p: 0.5 * (i as f64 + 0.5) / n as f64 }).collect()
}
