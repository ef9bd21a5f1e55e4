//! Command dispatch and output emission.

use std::io::Write;
use std::path::{Path, PathBuf};

use quasiecho_core::fidelity::InitialState;
use quasiecho_core::fidelity::{detect_recurrences, fidelity_series, EchoSpec, SystemSpec, DEFAULT_RECURRENCE_THRESHOLD};
use quasiecho_core::fitting::{
    classify_decay, default_window, fit_default, fit_model, fit_two_stage, scaling_exponent, DecayFit, DecayModel, DecayParams,
    FitWindow, ScalingLaw, ScalingMode, ScalingVariable,
};
use quasiecho_core::io::{read_series_csv, write_rotor_orbits_csv, write_series_csv, write_spectrum_csv, write_top_orbits_csv};
use quasiecho_core::kicked::classical::{default_rotor_seeds, default_top_seeds};
use quasiecho_core::kicked::{generate_portrait, RotorMap, SystemKind, TopMap};
use quasiecho_core::spectral::{extent_spectrum, spectrum_shape_summary, EigenCache, ExtentSpectrum, SpectrumShape};
use quasiecho_core::sweep::sweep;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{check_delta, spin, state_id, Command, Quantity, RunConfig};
use crate::error::{config, CliError, Result};
use crate::figures;

pub const DEFAULT_PORTRAIT_STEPS: usize = 2000;
pub const DEFAULT_ROTOR_SEEDS: usize = 30;

/// Shared state of one invocation: the resolved config, the eigensystem
/// cache and the files written so far.
pub struct Context {
    pub config: RunConfig,
    pub cache: EigenCache,
    outputs: Vec<PathBuf>,
}

impl Context {
    pub fn new(config: RunConfig) -> Result<Self> {
        let cache = match &config.cache_dir {
            Some(dir) => EigenCache::on_disk(dir).map_err(|e| match e {
                quasiecho_core::CoreError::Io(source) => CliError::Io { path: dir.clone(), source },
                other => other.into(),
            })?,
            None => EigenCache::disabled(),
        };
        Ok(Self { config, cache, outputs: Vec::new() })
    }

    pub fn header(&self) -> String {
        format!("# config: {}\n", serde_json::to_string(&self.config).expect("config serializes"))
    }

    /// Writes `body` to `path`, or to standard output without one.
    pub fn emit(&mut self, path: Option<&Path>, body: &[u8]) -> Result<()> {
        match path {
            Some(p) => {
                if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                    std::fs::create_dir_all(dir).map_err(|source| CliError::Io { path: dir.to_owned(), source })?;
                }
                std::fs::write(p, body).map_err(|source| CliError::Io { path: p.to_owned(), source })?;
                self.outputs.push(p.to_owned());
            }
            None => {
                let mut out = std::io::stdout().lock();
                out.write_all(body)
                    .and_then(|_| out.flush())
                    .map_err(|source| CliError::Io { path: PathBuf::from("<stdout>"), source })?;
            }
        }
        Ok(())
    }

    /// CSV with the `# config:` metadata line first.
    pub fn emit_csv(
        &mut self,
        path: Option<&Path>,
        write: impl FnOnce(&mut Vec<u8>) -> quasiecho_core::Result<()>,
    ) -> Result<()> {
        let mut buf = self.header().into_bytes();
        write(&mut buf)?;
        self.emit(path, &buf)
    }

    pub fn emit_json<T: Serialize + ?Sized>(&mut self, path: Option<&Path>, value: &T) -> Result<()> {
        let mut text = serde_json::to_string_pretty(value).expect("output serializes");
        text.push('\n');
        self.emit(path, text.as_bytes())
    }

    pub fn stats(&self) -> Value {
        json!({ "eigendecompositions": self.cache.decompositions(), "cache_hits": self.cache.hits() })
    }

    /// Writes the manifest next to (or, for a directory, inside) `anchor`.
    pub fn finish(&mut self, anchor: Option<&Path>, is_dir: bool, summary: Value) -> Result<()> {
        let Some(anchor) = anchor else { return Ok(()) };
        let path = if is_dir { anchor.join("manifest.json") } else { manifest_path(anchor) };
        let base = if is_dir { anchor } else { anchor.parent().unwrap_or(Path::new("")) };
        let outputs: Vec<String> = self.outputs.iter().map(|p| p.strip_prefix(base).unwrap_or(p).display().to_string()).collect();
        let manifest = json!({
            "config": self.config,
            "outputs": outputs,
            "stats": self.stats(),
            "summary": summary,
        });
        self.emit_json(Some(&path), &manifest)
    }
}

pub fn manifest_path(output: &Path) -> PathBuf {
    output.with_extension("manifest.json")
}

pub fn run(cfg: RunConfig) -> Result<()> {
    let command = cfg.command()?;
    let mut ctx = Context::new(cfg)?;
    let output = ctx.config.output.clone();
    let summary = match command {
        Command::Portrait => portrait(&mut ctx)?,
        Command::Evolve => evolve(&mut ctx)?,
        Command::Sweep => sweep_cmd(&mut ctx)?,
        Command::Spectrum => spectrum(&mut ctx)?,
        Command::Fit => fit(&mut ctx)?,
        Command::Scaling => scaling(&mut ctx)?,
        Command::Reproduce => {
            let dir = output.clone().ok_or_else(|| config("reproduce needs --output <directory>"))?;
            let figure = ctx.config.require(ctx.config.figure, "figure")?;
            let summary = figures::reproduce(&mut ctx, figure, &dir)?;
            return ctx.finish(Some(&dir), true, summary);
        }
    };
    ctx.finish(output.as_deref(), false, summary)
}

fn portrait(ctx: &mut Context) -> Result<Value> {
    let c = &ctx.config;
    let k = c.kick()?;
    let steps = c.steps.unwrap_or(DEFAULT_PORTRAIT_STEPS);
    let output = c.output.clone();
    match c.system_kind()? {
        SystemKind::Top => {
            let all = default_top_seeds();
            let n = c.seeds.unwrap_or(all.len());
            if n == 0 || n > all.len() {
                return Err(config(format!("top portraits use 1..={} grid seeds, got {n}", all.len())));
            }
            let orbits = generate_portrait(&TopMap { k }, &all[..n], steps);
            ctx.emit_csv(output.as_deref(), |w| write_top_orbits_csv(w, &orbits))?;
            Ok(json!({ "orbits": n, "steps": steps }))
        }
        SystemKind::Rotor => {
            let n = c.seeds.unwrap_or(DEFAULT_ROTOR_SEEDS);
            if n == 0 {
                return Err(config("seeds must be positive"));
            }
            let orbits = generate_portrait(&RotorMap { k }, &default_rotor_seeds(n), steps);
            ctx.emit_csv(output.as_deref(), |w| write_rotor_orbits_csv(w, &orbits))?;
            Ok(json!({ "orbits": n, "steps": steps }))
        }
    }
}

fn evolve(ctx: &mut Context) -> Result<Value> {
    let c = &ctx.config;
    let spec = EchoSpec { system: c.system_spec()?, delta: c.delta()?, initial: c.single_state()?, horizon: c.horizon()? };
    let series = fidelity_series(&spec)?;
    let output = c.output.clone();
    ctx.emit_csv(output.as_deref(), |w| write_series_csv(w, &series.values))?;
    Ok(json!({
        "saturation": series.saturation,
        "recurrences": detect_recurrences(&series.values, DEFAULT_RECURRENCE_THRESHOLD),
    }))
}

fn sweep_cmd(ctx: &mut Context) -> Result<Value> {
    let c = &ctx.config;
    let result = sweep(c.system_spec()?, c.delta()?, c.horizon()?, &c.states()?)?;
    let output = c.output.clone();
    ctx.emit_json(output.as_deref(), &result)?;
    let mut counts = std::collections::BTreeMap::<String, usize>::new();
    for r in &result.records {
        let key = r
            .label
            .map_or("error".to_owned(), |l| serde_json::to_value(l).expect("label serializes").as_str().unwrap_or("").to_owned());
        *counts.entry(key).or_default() += 1;
    }
    Ok(json!({ "labels": counts }))
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectrumReport {
    pub state: String,
    pub shape: SpectrumShape,
    pub leading: Vec<quasiecho_core::spectral::SpectrumEntry>,
}

/// Extent spectra of `states` for the top at `(J, k)`, computed against one
/// shared eigensystem.
pub fn spectra(ctx: &Context, j: f64, k: f64, states: &[InitialState]) -> Result<Vec<ExtentSpectrum>> {
    let spin = spin(j)?;
    let es = ctx.cache.qkt_eigensystem(spin, k)?;
    let system = SystemSpec::Top { spin, k };
    states
        .par_iter()
        .map(|s| {
            let psi = s.prepare(&system)?;
            let mut sp = extent_spectrum(&psi, &es)?;
            sp.source = Some(state_id(s));
            Ok(sp)
        })
        .collect()
}

pub fn spectrum_report(sp: &ExtentSpectrum) -> Result<SpectrumReport> {
    Ok(SpectrumReport {
        state: sp.source.clone().unwrap_or_default(),
        shape: spectrum_shape_summary(sp)?,
        leading: sp.leading(5),
    })
}

/// `out.csv` for one state, `out_<state>.csv` for several.
pub fn per_state_path(output: &Path, id: &str) -> PathBuf {
    let stem = output.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let ext = output.extension().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "csv".to_owned());
    output.with_file_name(format!("{stem}_{id}.{ext}"))
}

fn spectrum(ctx: &mut Context) -> Result<Value> {
    let c = &ctx.config;
    if c.system_kind()? != SystemKind::Top {
        return Err(config("extent spectra are defined for the kicked top"));
    }
    let (j, k) = (c.require(c.j, "J")?, c.kick()?);
    let states = c.states()?;
    if states.is_empty() {
        return Err(config("spectrum needs at least one initial state"));
    }
    let output = c.output.clone();
    if states.len() > 1 && output.is_none() {
        return Err(config("several spectra need --output"));
    }
    let spectra = spectra(ctx, j, k, &states)?;
    let mut reports = Vec::new();
    for sp in &spectra {
        let path = match &output {
            Some(o) if spectra.len() > 1 => Some(per_state_path(o, sp.source.as_deref().unwrap_or(""))),
            other => other.clone(),
        };
        ctx.emit_csv(path.as_deref(), |w| write_spectrum_csv(w, sp))?;
        reports.push(spectrum_report(sp)?);
    }
    Ok(json!({ "spectra": reports }))
}

fn fit(ctx: &mut Context) -> Result<Value> {
    let c = &ctx.config;
    let input = c.input.clone().ok_or_else(|| config("fit needs --input <series.csv>"))?;
    let file = std::fs::File::open(&input).map_err(|source| CliError::Io { path: input.clone(), source })?;
    let values = read_series_csv(std::io::BufReader::new(file))?;
    let output = c.output.clone();
    let result = match c.model.map(|m| m.stages()) {
        None => serde_json::to_value(classify_decay(&values)?),
        Some((m, None)) => {
            let w = match c.window {
                Some([a, b]) => FitWindow::new(a, b),
                None => default_window(&values, m)?,
            };
            serde_json::to_value(fit_model(m, &values, w)?)
        }
        Some((first, Some(second))) => match fit_two_stage(&values, first, second)? {
            Some(ts) => serde_json::to_value(ts),
            None => {
                return Err(CliError::Core(quasiecho_core::CoreError::NonPhysicalFit {
                    model: "two-stage",
                    detail: "no breakpoint satisfies the stage constraints".to_owned(),
                }))
            }
        },
    }
    .expect("fit serializes");
    ctx.emit_json(output.as_deref(), &result)?;
    Ok(json!({ "input": input, "points": values.len() }))
}

#[derive(Debug, Clone, Serialize)]
pub struct ScalingPoint {
    pub x: f64,
    pub rate: f64,
    pub horizon: usize,
    pub fit: DecayFit,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScalingReport {
    pub quantity: Quantity,
    pub points: Vec<ScalingPoint>,
    pub law: ScalingLaw,
}

/// Horizon used when none is configured: long enough for the slowest decay
/// over the delta range to leave its shoulder.
pub fn auto_horizon(delta: f64) -> usize {
    if delta > 0.0 {
        1000.max((1.0 / delta).ceil() as usize)
    } else {
        1000
    }
}

/// Fitted rate of one series.
pub fn rate_of(values: &[f64], quantity: Quantity) -> Result<(f64, DecayFit)> {
    let model = match quantity {
        Quantity::GammaG => DecayModel::Gaussian,
        Quantity::CP => DecayModel::PowerLaw,
    };
    let fit = fit_default(values, model)?;
    let rate = match fit.params {
        DecayParams::Gaussian { gamma } => gamma,
        DecayParams::PowerLaw { c, .. } => c,
        DecayParams::Exponential { beta, .. } => beta,
    };
    Ok((rate, fit))
}

/// Rates over a list of systems/deltas sharing one initial state.
pub fn scaling_points(
    cases: &[(SystemSpec, f64, f64)],
    initial: InitialState,
    horizon: Option<usize>,
    quantity: Quantity,
) -> Result<Vec<ScalingPoint>> {
    cases
        .par_iter()
        .map(|&(system, delta, x)| {
            let horizon = horizon.unwrap_or_else(|| auto_horizon(delta));
            let series = fidelity_series(&EchoSpec { system, delta, initial, horizon })?;
            let (rate, fit) = rate_of(&series.values, quantity)?;
            Ok(ScalingPoint { x, rate, horizon, fit })
        })
        .collect()
}

fn scaling(ctx: &mut Context) -> Result<Value> {
    let c = &ctx.config;
    let variable = c.require(c.variable, "variable")?;
    let quantity = c.quantity.unwrap_or_default();
    let initial = c.single_state()?;
    let k = c.kick()?;
    let (cases, mode) = match variable {
        ScalingVariable::Delta => {
            let system = c.system_spec()?;
            let deltas = c.deltas.clone().ok_or_else(|| config("scaling over delta needs deltas"))?;
            let mut cases = Vec::new();
            for d in deltas {
                if check_delta(d)? == 0.0 {
                    return Err(config("log-log scaling needs positive deltas"));
                }
                cases.push((system, d, d));
            }
            (cases, ScalingMode::LogLog)
        }
        ScalingVariable::J => {
            if c.system_kind()? != SystemKind::Top {
                return Err(config("scaling over J needs the kicked top"));
            }
            let delta = c.delta()?;
            let js = c.js.clone().ok_or_else(|| config("scaling over J needs Js"))?;
            let cases = js.iter().map(|&j| Ok((SystemSpec::Top { spin: spin(j)?, k }, delta, j))).collect::<Result<Vec<_>>>()?;
            (cases, ScalingMode::Linear)
        }
    };
    if cases.len() < 3 {
        return Err(config(format!("scaling needs at least 3 points, got {}", cases.len())));
    }
    let points = scaling_points(&cases, initial, c.horizon, quantity)?;
    let xy: Vec<(f64, f64)> = points.iter().map(|p| (p.x, p.rate)).collect();
    let law = scaling_exponent(&xy, mode, variable)?;
    let output = c.output.clone();
    let report = ScalingReport { quantity, points, law };
    ctx.emit_json(output.as_deref(), &report)?;
    Ok(json!({ "law": law }))
}
