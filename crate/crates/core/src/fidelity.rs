//! Echo evolution: fidelity series, recurrences and saturation.

use num_complex::Complex64 as C64;
use quasiecho_numerics::linalg::inner;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::kicked::{qkr_floquet, qkt_floquet, torus_coherent_state, FloquetOperator, RotorPoint, Workspace};
use crate::spin::{spin_coherent_state, GridIndex, SphereCoordinate, SpinParameters};
use crate::state::QuantumState;

/// Fraction of the horizon used for the saturation estimate.
pub const SATURATION_FRACTION: f64 = 0.25;
/// Relative standard deviation above which a saturation estimate is unreliable.
pub const SATURATION_MAX_RELATIVE_STD: f64 = 0.5;
/// Default recurrence threshold relative to `F(0) = 1`.
pub const DEFAULT_RECURRENCE_THRESHOLD: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "system", rename_all = "lowercase")]
pub enum SystemSpec {
    Top {
        #[serde(rename = "J")]
        spin: SpinParameters,
        k: f64,
    },
    Rotor {
        #[serde(rename = "N")]
        n: usize,
        k: f64,
    },
}

impl SystemSpec {
    pub fn k(&self) -> f64 {
        match *self {
            Self::Top { k, .. } | Self::Rotor { k, .. } => k,
        }
    }

    pub fn dim(&self) -> usize {
        match *self {
            Self::Top { spin, .. } => spin.dim(),
            Self::Rotor { n, .. } => n,
        }
    }

    pub fn floquet(&self) -> Result<FloquetOperator> {
        match *self {
            Self::Top { spin, k } => qkt_floquet(spin, k),
            Self::Rotor { n, k } => qkr_floquet(n, k),
        }
    }
}

/// Where the initial coherent state is centered.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum InitialState {
    Grid { index: GridIndex },
    Sphere { theta: f64, phi: f64 },
    Torus { q: f64, p: f64 },
}

impl InitialState {
    pub fn grid(index: u32) -> Result<Self> {
        Ok(Self::Grid { index: GridIndex::new(index)? })
    }

    /// Builds the coherent state for `system`.
    pub fn prepare(&self, system: &SystemSpec) -> Result<QuantumState> {
        match (*self, *system) {
            (Self::Grid { index }, SystemSpec::Top { spin, .. }) => Ok(spin_coherent_state(spin, index.location())),
            (Self::Sphere { theta, phi }, SystemSpec::Top { spin, .. }) => {
                Ok(spin_coherent_state(spin, SphereCoordinate::new(theta, phi)?))
            }
            (Self::Torus { q, p }, SystemSpec::Rotor { n, .. }) => {
                let pt = RotorPoint::strict(q, p)?;
                torus_coherent_state(n, pt.q, pt.p)
            }
            (s, _) => Err(invalid(format!("initial state {s:?} does not belong to this system"))),
        }
    }

    /// Human-readable phase-space location.
    pub fn location(&self) -> Location {
        match *self {
            Self::Grid { index } => {
                let c = index.location();
                Location::Sphere { theta: c.theta, phi: c.phi }
            }
            Self::Sphere { theta, phi } => Location::Sphere { theta, phi },
            Self::Torus { q, p } => Location::Torus { q, p },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Location {
    Sphere { theta: f64, phi: f64 },
    Torus { q: f64, p: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EchoSpec {
    #[serde(flatten)]
    pub system: SystemSpec,
    pub delta: f64,
    pub initial: InitialState,
    pub horizon: usize,
}

impl EchoSpec {
    pub fn validate(&self) -> Result<()> {
        if self.horizon < 1 {
            return Err(invalid("horizon must be at least 1"));
        }
        if !(self.delta >= 0.0 && self.delta.is_finite()) {
            return Err(invalid(format!("delta must be non-negative, got {}", self.delta)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SaturationEstimate {
    pub value: f64,
    pub relative_std: f64,
    pub reliable: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FidelitySeries {
    /// `values[t] = F(t)` for `t = 0..=T`.
    pub values: Vec<f64>,
    pub spec: Option<EchoSpec>,
    pub saturation: SaturationEstimate,
}

impl FidelitySeries {
    pub fn from_values(values: Vec<f64>) -> Self {
        let saturation = saturation_estimate(&values);
        Self { values, spec: None, saturation }
    }

    pub fn horizon(&self) -> usize {
        self.values.len() - 1
    }
}

/// The unperturbed and perturbed propagators of one echo experiment.
#[derive(Debug, Clone)]
pub struct EchoEngine {
    pub system: SystemSpec,
    pub delta: f64,
    u: FloquetOperator,
    up: FloquetOperator,
}

impl EchoEngine {
    pub fn new(system: SystemSpec, delta: f64) -> Result<Self> {
        if !(delta >= 0.0 && delta.is_finite()) {
            return Err(invalid(format!("delta must be non-negative, got {delta}")));
        }
        let u = system.floquet()?;
        let up = u.with_kick(system.k() + delta)?;
        Ok(Self { system, delta, u, up })
    }

    pub fn run(&self, initial: &InitialState, horizon: usize) -> Result<FidelitySeries> {
        let spec = EchoSpec { system: self.system, delta: self.delta, initial: *initial, horizon };
        spec.validate()?;
        let psi = initial.prepare(&self.system)?;
        let values = echo_fidelity(&self.u, &self.up, &psi, horizon)?;
        let saturation = saturation_estimate(&values);
        Ok(FidelitySeries { values, spec: Some(spec), saturation })
    }
}

pub fn fidelity_series(spec: &EchoSpec) -> Result<FidelitySeries> {
    spec.validate()?;
    EchoEngine::new(spec.system, spec.delta)?.run(&spec.initial, spec.horizon)
}

/// `F(t) = |⟨U^t ψ|U_p^t ψ⟩|²` for `t = 0..=horizon` by co-evolving two copies of `ψ`.
pub fn echo_fidelity(u: &FloquetOperator, up: &FloquetOperator, psi: &QuantumState, horizon: usize) -> Result<Vec<f64>> {
    let mut a: Vec<C64> = psi.amplitudes().to_vec();
    let mut b = a.clone();
    let mut ws = Workspace::default();
    let mut out = Vec::with_capacity(horizon + 1);
    out.push(1.0);
    for _ in 0..horizon {
        FloquetOperator::apply_pair(u, up, &mut a, &mut b, &mut ws)?;
        out.push(inner(&a, &b).norm_sqr());
    }
    Ok(out)
}

/// Mean of the final quarter, flagged unreliable when its relative spread exceeds 0.5.
pub fn saturation_estimate(values: &[f64]) -> SaturationEstimate {
    let tail = tail(values);
    // Incremental mean is exact for constant input.
    let mut mean = 0.0;
    for (i, v) in tail.iter().enumerate() {
        mean += (v - mean) / (i + 1) as f64;
    }
    let var = tail.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / tail.len().max(1) as f64;
    let relative_std = if mean == 0.0 {
        if var == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        var.sqrt() / mean.abs()
    };
    SaturationEstimate { value: mean, relative_std, reliable: relative_std <= SATURATION_MAX_RELATIVE_STD }
}

pub(crate) fn tail(values: &[f64]) -> &[f64] {
    let len = ((values.len() as f64 * SATURATION_FRACTION).round() as usize).clamp(1.min(values.len()), values.len());
    &values[values.len() - len..]
}

/// Peak times of excursions above `threshold` that follow a drop below `threshold/2`.
///
/// Each excursion (from crossing above `threshold` until falling below
/// `threshold/2` again) contributes its maximum once. A peak on the final
/// sample is not a local maximum and is ignored.
pub fn detect_recurrences(values: &[f64], threshold: f64) -> Vec<usize> {
    let mut out = Vec::new();
    let low = threshold / 2.0;
    let mut armed = false;
    let mut peak: Option<usize> = None;
    for (t, &f) in values.iter().enumerate() {
        if let Some(p) = peak {
            if f > values[p] {
                peak = Some(t);
            }
            if f < low {
                out.push(p);
                peak = None;
            }
            continue;
        }
        if !armed {
            armed = f < low;
        } else if f > threshold {
            peak = Some(t);
            armed = false;
        }
    }
    if let Some(p) = peak {
        if p + 1 < values.len() {
            out.push(p);
        }
    }
    out
}
