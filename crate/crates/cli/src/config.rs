//! Run configuration: JSON file fields mirrored by command-line flags.

use std::path::{Path, PathBuf};

use clap::Args;
use quasiecho_core::fidelity::{InitialState, SystemSpec};
use quasiecho_core::fitting::{DecayModel, ScalingVariable};
use quasiecho_core::kicked::SystemKind;
use quasiecho_core::spin::SpinParameters;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{config, CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Portrait,
    Evolve,
    Sweep,
    Spectrum,
    Fit,
    Scaling,
    Reproduce,
}

/// Law forced by `fit`; without one the series is classified.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitModel {
    Gaussian,
    PowerLaw,
    Exponential,
    GaussianExponential,
    PowerGaussian,
}

impl FitModel {
    pub fn stages(self) -> (DecayModel, Option<DecayModel>) {
        match self {
            Self::Gaussian => (DecayModel::Gaussian, None),
            Self::PowerLaw => (DecayModel::PowerLaw, None),
            Self::Exponential => (DecayModel::Exponential, None),
            Self::GaussianExponential => (DecayModel::Gaussian, Some(DecayModel::Exponential)),
            Self::PowerGaussian => (DecayModel::PowerLaw, Some(DecayModel::Gaussian)),
        }
    }
}

/// Rate extracted per point of a `scaling` run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    /// Gaussian rate `Γ_G`.
    #[default]
    GammaG,
    /// Power-law prefactor `c` of `c·t^{−α}`.
    CP,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub command: Option<Command>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub system: Option<SystemKind>,
    #[serde(rename = "J", skip_serializing_if = "Option::is_none")]
    pub j: Option<f64>,
    #[serde(rename = "N", skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub deltas: Option<Vec<f64>>,
    #[serde(rename = "Js", skip_serializing_if = "Option::is_none")]
    pub js: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid_states: Option<Vec<u32>>,
    /// `(θ, φ)` pairs.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sphere_states: Option<Vec<[f64; 2]>>,
    /// `(q, p)` pairs.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub torus_states: Option<Vec<[f64; 2]>>,
    #[serde(rename = "T", skip_serializing_if = "Option::is_none")]
    pub horizon: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seeds: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub steps: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model: Option<FitModel>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window: Option<[usize; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub variable: Option<ScalingVariable>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub quantity: Option<Quantity>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub figure: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cache_dir: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub jobs: Option<usize>,
}

fn parse_serde<T: DeserializeOwned>(s: &str) -> std::result::Result<T, String> {
    serde_json::from_value(serde_json::Value::String(s.to_owned())).map_err(|e| e.to_string())
}

fn parse_pair(s: &str) -> std::result::Result<[f64; 2], String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("expected two comma-separated numbers, got {s:?}"))?;
    let p = |x: &str| x.trim().parse::<f64>().map_err(|e| format!("{x:?}: {e}"));
    Ok([p(a)?, p(b)?])
}

fn parse_window(s: &str) -> std::result::Result<[usize; 2], String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("expected start,end, got {s:?}"))?;
    let p = |x: &str| x.trim().parse::<usize>().map_err(|e| format!("{x:?}: {e}"));
    Ok([p(a)?, p(b)?])
}

/// Flags mirroring [`RunConfig`]; every flag given overrides the config file.
#[derive(Debug, Default, Args)]
pub struct Flags {
    /// JSON file with RunConfig fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// top | rotor
    #[arg(long, value_parser = parse_serde::<SystemKind>)]
    pub system: Option<SystemKind>,
    /// Spin quantum number of the top.
    #[arg(long = "J")]
    pub j: Option<f64>,
    /// Hilbert-space dimension of the rotor.
    #[arg(long = "N")]
    pub n: Option<usize>,
    /// Kick strength.
    #[arg(long, allow_hyphen_values = true)]
    pub k: Option<f64>,
    /// Perturbation of the kick strength.
    #[arg(long, allow_hyphen_values = true)]
    pub delta: Option<f64>,
    /// Comma-separated perturbations for `scaling --variable delta`.
    #[arg(long, value_delimiter = ',')]
    pub deltas: Option<Vec<f64>>,
    /// Comma-separated spins for `scaling --variable J`.
    #[arg(long = "Js", value_delimiter = ',')]
    pub js: Option<Vec<f64>>,
    /// Coherent-state grid indices 1..=100, comma-separated or repeated.
    #[arg(long = "grid-state", value_delimiter = ',')]
    pub grid_states: Option<Vec<u32>>,
    /// Sphere state "theta,phi"; repeatable.
    #[arg(long = "sphere-state", value_parser = parse_pair, allow_hyphen_values = true)]
    pub sphere_states: Option<Vec<[f64; 2]>>,
    /// Torus state "q,p"; repeatable.
    #[arg(long = "torus-state", value_parser = parse_pair, allow_hyphen_values = true)]
    pub torus_states: Option<Vec<[f64; 2]>>,
    /// Horizon in kicks.
    #[arg(long = "T")]
    pub horizon: Option<usize>,
    /// Number of classical orbits.
    #[arg(long)]
    pub seeds: Option<usize>,
    /// Classical map iterations per orbit.
    #[arg(long)]
    pub steps: Option<usize>,
    /// Series CSV for `fit`.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// gaussian | power_law | exponential | gaussian_exponential | power_gaussian
    #[arg(long, value_parser = parse_serde::<FitModel>)]
    pub model: Option<FitModel>,
    /// Fit window "start,end" (inclusive).
    #[arg(long, value_parser = parse_window)]
    pub window: Option<[usize; 2]>,
    /// delta | J
    #[arg(long, value_parser = parse_serde::<ScalingVariable>)]
    pub variable: Option<ScalingVariable>,
    /// gamma_g | c_p
    #[arg(long, value_parser = parse_serde::<Quantity>)]
    pub quantity: Option<Quantity>,
    /// Figure number for `reproduce`.
    #[arg(long)]
    pub figure: Option<u32>,
    /// Output file (directory for `reproduce`); standard output if absent.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Directory for persisted eigensystems.
    #[arg(long = "cache-dir")]
    pub cache_dir: Option<PathBuf>,
    /// Worker threads; defaults to the number of logical processors.
    #[arg(long)]
    pub jobs: Option<usize>,
}

pub fn parse_command(s: &str) -> std::result::Result<Command, String> {
    parse_serde(s)
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_owned(), source })?;
        serde_json::from_str(&text).map_err(|e| config(format!("{}: {e}", path.display())))
    }

    /// Fields set in `flags` replace those of `self`.
    pub fn overlay(mut self, command: Option<Command>, flags: Flags) -> Self {
        macro_rules! take {
            ($($f:ident),*) => { $( if flags.$f.is_some() { self.$f = flags.$f; } )* };
        }
        if command.is_some() {
            self.command = command;
        }
        take!(
            system,
            j,
            n,
            k,
            delta,
            deltas,
            js,
            grid_states,
            sphere_states,
            torus_states,
            horizon,
            seeds,
            steps,
            input,
            model,
            window,
            variable,
            quantity,
            figure,
            output,
            cache_dir,
            jobs
        );
        self
    }

    pub fn command(&self) -> Result<Command> {
        self.command.ok_or_else(|| config("no command given"))
    }

    pub fn require<T: Copy>(&self, v: Option<T>, name: &str) -> Result<T> {
        v.ok_or_else(|| config(format!("missing required field {name}")))
    }

    pub fn system_kind(&self) -> Result<SystemKind> {
        self.require(self.system, "system")
    }

    pub fn kick(&self) -> Result<f64> {
        let k = self.require(self.k, "k")?;
        if !(k > 0.0 && k.is_finite()) {
            return Err(config(format!("k must be positive, got {k}")));
        }
        Ok(k)
    }

    pub fn delta(&self) -> Result<f64> {
        check_delta(self.require(self.delta, "delta")?)
    }

    pub fn horizon(&self) -> Result<usize> {
        let t = self.require(self.horizon, "T")?;
        if t < 1 {
            return Err(config("T must be at least 1"));
        }
        Ok(t)
    }

    pub fn spin(&self) -> Result<SpinParameters> {
        spin(self.require(self.j, "J")?)
    }

    pub fn system_spec(&self) -> Result<SystemSpec> {
        let k = self.kick()?;
        match self.system_kind()? {
            SystemKind::Top => Ok(SystemSpec::Top { spin: self.spin()?, k }),
            SystemKind::Rotor => {
                let n = self.require(self.n, "N")?;
                if n < 2 {
                    return Err(config(format!("N must be at least 2, got {n}")));
                }
                Ok(SystemSpec::Rotor { n, k })
            }
        }
    }

    /// All requested initial states, grid first, then sphere, then torus.
    pub fn states(&self) -> Result<Vec<InitialState>> {
        let mut out = Vec::new();
        for &g in self.grid_states.iter().flatten() {
            out.push(InitialState::grid(g).map_err(|e| config(e.to_string()))?);
        }
        for &[theta, phi] in self.sphere_states.iter().flatten() {
            out.push(InitialState::Sphere { theta, phi });
        }
        for &[q, p] in self.torus_states.iter().flatten() {
            out.push(InitialState::Torus { q, p });
        }
        Ok(out)
    }

    pub fn single_state(&self) -> Result<InitialState> {
        let s = self.states()?;
        match s.as_slice() {
            [one] => Ok(*one),
            _ => Err(config(format!("exactly one initial state required, got {}", s.len()))),
        }
    }
}

pub fn spin(j: f64) -> Result<SpinParameters> {
    if j.is_nan() || j < 1.0 {
        return Err(config(format!("J must be at least 1, got {j}")));
    }
    SpinParameters::new(j).map_err(|e| config(e.to_string()))
}

pub fn check_delta(delta: f64) -> Result<f64> {
    if !(delta >= 0.0 && delta.is_finite()) {
        return Err(config(format!("delta must be non-negative, got {delta}")));
    }
    Ok(delta)
}

/// Short identifier used in file names.
pub fn state_id(s: &InitialState) -> String {
    match *s {
        InitialState::Grid { index } => format!("grid{}", index.get()),
        InitialState::Sphere { theta, phi } => format!("theta{theta:.6}_phi{phi:.6}"),
        InitialState::Torus { q, p } => format!("q{q:.6}_p{p:.6}"),
    }
}
