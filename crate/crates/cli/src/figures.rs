//! Canned runs behind `reproduce --figure N`.
//!
//! Each bundle holds the series, orbits, spectra and fits that the figure
//! displays, and the manifest lists the reference values they are meant to
//! be compared against. A configured `T` replaces every default horizon.

use std::f64::consts::PI;
use std::path::Path;

use quasiecho_core::fidelity::{detect_recurrences, EchoEngine, InitialState, SystemSpec, DEFAULT_RECURRENCE_THRESHOLD};
use quasiecho_core::fitting::{classify_decay, fit_two_stage, DecayModel, ScalingMode, ScalingVariable};
use quasiecho_core::io::{write_rotor_orbits_csv, write_series_csv, write_spectrum_csv, write_top_orbits_csv};
use quasiecho_core::kicked::classical::{default_rotor_seeds, default_top_seeds};
use quasiecho_core::kicked::{generate_portrait, RotorMap, TopMap};
use quasiecho_core::spin::SpinParameters;
use quasiecho_core::sweep::sweep;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::config::{state_id, Quantity};
use crate::error::{config, Result};
use crate::run::{rate_of, scaling_points, spectra, spectrum_report, Context, DEFAULT_PORTRAIT_STEPS};

const TOP_K: f64 = 1.1;
const TOP_J: f64 = 500.0;
const ROTOR_K: f64 = 0.3;

fn top(j: f64) -> SystemSpec {
    SystemSpec::Top { spin: SpinParameters::new(j).expect("valid spin"), k: TOP_K }
}

fn grid(states: &[u32]) -> Vec<InitialState> {
    states.iter().map(|&g| InitialState::grid(g).expect("grid index in range")).collect()
}

fn sphere(theta: f64, phi: f64) -> InitialState {
    InitialState::Sphere { theta, phi }
}

pub fn reproduce(ctx: &mut Context, figure: u32, dir: &Path) -> Result<Value> {
    let horizon = |default: usize| ctx.config.horizon.unwrap_or(default);
    let (t_short, t_long, t_rotor) = (horizon(1000), horizon(10_000), horizon(5000));
    let summary = match figure {
        1 => {
            portrait_top(ctx, dir, &[TOP_K, 1.3])?;
            let states: Vec<InitialState> = (1..=100).map(|g| InitialState::grid(g).expect("grid index in range")).collect();
            let result = sweep(top(TOP_J), 0.001, t_long, &states)?;
            ctx.emit_json(Some(&dir.join("classification.json")), &result)?;
            json!({
                "labels": result.records.iter().map(|r| json!({ "state": state_id(&r.state), "label": r.label })).collect::<Vec<_>>(),
                "reference_values": { "gaussian": [52, 53, 54, 55], "power_law": [56, 77] },
            })
        }
        2 => {
            let cases = [(top(TOP_J), 0.001, grid(&[52])[0], t_short), (top(TOP_J), 0.001, grid(&[56])[0], t_long)];
            let (fits, _) = series_reports(ctx, dir, &cases, false)?;
            let gamma_cases: Vec<_> = [1e-4, 5e-4, 1e-3, 5e-3, 1e-2].iter().map(|&d| (top(TOP_J), d, d)).collect();
            let gamma = scaling_bundle(
                ctx,
                dir,
                "gamma_vs_delta.json",
                &gamma_cases,
                52,
                None,
                Quantity::GammaG,
                ScalingMode::LogLog,
                ScalingVariable::Delta,
            )?;
            let cp_cases: Vec<_> = [1e-3, 2e-3, 5e-3, 1e-2].iter().map(|&d| (top(TOP_J), d, d)).collect();
            let cp = scaling_bundle(
                ctx,
                dir,
                "cp_vs_delta.json",
                &cp_cases,
                56,
                Some(t_long),
                Quantity::CP,
                ScalingMode::LogLog,
                ScalingVariable::Delta,
            )?;
            json!({
                "series": fits,
                "gamma_vs_delta": gamma,
                "cp_vs_delta": cp,
                "reference_values": {
                    "state_52_gamma_g": 4.5e-6,
                    "state_56_alpha_p": 1.15,
                    "state_56_c_p": 950.0,
                    "gamma_g_delta_exponent": 2.0,
                    "c_p_vs_delta": "0.35 * delta^-1.15",
                },
            })
        }
        3 => {
            portrait_rotor(ctx, dir, &[ROTOR_K, 0.35])?;
            json!({ "reference_values": { "orbits": 30 } })
        }
        4 => {
            let system = SystemSpec::Rotor { n: 500, k: ROTOR_K };
            let cases: Vec<Case> = [(-0.4, 0.1), (-0.1, 0.1), (-0.1, -0.4)]
                .iter()
                .map(|&(q, p)| (system, 0.002, InitialState::Torus { q, p }, t_rotor))
                .collect();
            let (out, _) = series_reports(ctx, dir, &cases, false)?;
            json!({
                "series": out,
                "reference_values": {
                    "q-0.4_p0.1": { "gamma_g": 6e-4, "recurrence_period": 2300 },
                    "q-0.1_p0.1": "non-Gaussian, compared with t^-1",
                    "q-0.1_p-0.4": { "gamma_g": 5e-7, "recurrences": "none" },
                },
            })
        }
        5 => {
            let reports = spectra_bundle(ctx, dir, TOP_J, &grid(&[52, 53, 54, 55, 56, 64, 65, 66, 67, 41, 46]))?;
            json!({
                "spectra": reports,
                "reference_values": {
                    "mean_extent_increases": [52, 53, 54, 55],
                    "state_56": "narrow spectrum at high extent",
                    "state_41": { "amplitude": 0.95, "extent": 17.3 },
                    "state_46": { "leading_amplitudes": [0.21, 0.21, 0.21, 0.21], "extent": 353.7 },
                },
            })
        }
        6 => {
            let js = [100.0, 300.0, 500.0];
            let series: Vec<Case> = js.iter().map(|&j| (top(j), 0.005, grid(&[56])[0], t_rotor)).collect();
            let (mut out, _) = series_reports(ctx, dir, &series, false)?;
            for (r, j) in out.iter_mut().zip(js) {
                r["J"] = json!(j);
            }
            let cases: Vec<_> = [100.0, 200.0, 300.0, 400.0, 500.0].iter().map(|&j| (top(j), 0.005, j)).collect();
            let mut laws = Vec::new();
            for state in [52, 53, 54, 55] {
                let name = format!("gamma_vs_J_grid{state}.json");
                laws.push(scaling_bundle(
                    ctx,
                    dir,
                    &name,
                    &cases,
                    state,
                    Some(t_short),
                    Quantity::GammaG,
                    ScalingMode::Linear,
                    ScalingVariable::J,
                )?);
            }
            json!({
                "series": out,
                "gamma_vs_J": laws,
                "reference_values": { "c_g": [2.3e-7, 5.5e-7, 6.7e-7, 1e-6], "state_56": "power law at J=500 turning Gaussian at J=100" },
            })
        }
        7 => {
            let states: Vec<InitialState> =
                [1.0, 3.0, 5.0, 6.0, 7.0, 9.0].iter().map(|&c| sphere(0.8 * PI, c * PI / 100.0)).collect();
            let cases: Vec<Case> = states.iter().map(|&s| (top(TOP_J), 0.001, s, t_long)).collect();
            let (out, _) = series_reports(ctx, dir, &cases, false)?;
            let reports = spectra_bundle(ctx, dir, TOP_J, &[states[1], states[3], states[5]])?;
            json!({ "series": out, "spectra": reports, "reference_values": "smooth Gaussian to power-law transition with increasing phi" })
        }
        8 => {
            let states: Vec<InitialState> = (0..=10).map(|c| sphere(PI / 2.0 + f64::from(c) * PI / 100.0, 0.0)).collect();
            let cases: Vec<Case> = states.iter().map(|&s| (top(TOP_J), 0.001, s, t_long)).collect();
            let (out, _) = series_reports(ctx, dir, &cases, false)?;
            let reports = spectra_bundle(ctx, dir, TOP_J, &[states[5], states[6], states[7], states[9], states[10]])?;
            json!({
                "series": out,
                "spectra": reports,
                "reference_values": {
                    "offset_0": "oscillates close to 1",
                    "offset_2_to_5": "power law then Gaussian, second stage gamma 8e-8",
                    "offset_6_to_10": "Gaussian rebounding into power law t^-1.05 .. t^-1.15",
                },
            })
        }
        9 => {
            let cases: Vec<Case> =
                [0.01, 0.0075, 0.005, 0.0025, 0.001].iter().map(|&d| (top(TOP_J), d, grid(&[54])[0], t_short)).collect();
            let (out, values) = series_reports(ctx, dir, &cases, true)?;
            let (strong, weak) = (&values[0], &values[3]);
            let crossing: Vec<usize> = (201..600.min(strong.len()).min(weak.len())).filter(|&t| strong[t] > weak[t]).collect();
            json!({
                "series": out,
                "crossing_times_0.01_above_0.0025": crossing,
                "reference_values": {
                    "delta_0.01": "12 exp(-0.035 t)",
                    "delta_0.0075": "0.025 exp(-0.00115 t)",
                    "delta_0.005": "7 exp(-0.052 t)",
                    "crossing": "F(delta=0.01) > F(delta=0.0025) for some 200 < t < 600",
                },
            })
        }
        10 => {
            let cases: Vec<Case> = grid(&[53, 54, 55, 74]).into_iter().map(|s| (top(TOP_J), 0.01, s, t_short)).collect();
            let (out, _) = series_reports(ctx, dir, &cases, true)?;
            json!({
                "series": out,
                "reference_values": {
                    "grid53": "exp(-0.055 t)",
                    "grid54": "10 exp(-0.0345 t)",
                    "grid55": "0.175 exp(-0.012 t)",
                    "grid74": "0.06 exp(-0.00011 t)",
                },
            })
        }
        other => return Err(config(format!("figure must be in 1..=10, got {other}"))),
    };
    Ok(summary)
}

fn portrait_top(ctx: &mut Context, dir: &Path, ks: &[f64]) -> Result<()> {
    let steps = ctx.config.steps.unwrap_or(DEFAULT_PORTRAIT_STEPS);
    for &k in ks {
        let orbits = generate_portrait(&TopMap { k }, &default_top_seeds(), steps);
        ctx.emit_csv(Some(&dir.join(format!("portrait_k{k}.csv"))), |w| write_top_orbits_csv(w, &orbits))?;
    }
    Ok(())
}

fn portrait_rotor(ctx: &mut Context, dir: &Path, ks: &[f64]) -> Result<()> {
    let steps = ctx.config.steps.unwrap_or(DEFAULT_PORTRAIT_STEPS);
    for &k in ks {
        let orbits = generate_portrait(&RotorMap { k }, &default_rotor_seeds(30), steps);
        ctx.emit_csv(Some(&dir.join(format!("portrait_k{k}.csv"))), |w| write_rotor_orbits_csv(w, &orbits))?;
    }
    Ok(())
}

fn system_id(system: &SystemSpec) -> String {
    match *system {
        SystemSpec::Top { spin, k } => format!("top_J{}_k{k}", spin.j()),
        SystemSpec::Rotor { n, k } => format!("rotor_N{n}_k{k}"),
    }
}

type Case = (SystemSpec, f64, InitialState, usize);

/// Fidelity series of all cases, computed in parallel, in input order.
fn run_all(cases: &[Case]) -> Result<Vec<Vec<f64>>> {
    cases
        .par_iter()
        .map(|&(system, delta, state, horizon)| Ok(EchoEngine::new(system, delta)?.run(&state, horizon)?.values))
        .collect()
}

/// Writes each series and reports its classification, Gaussian rate and
/// recurrences; `two_stage` adds a forced Gaussian→exponential fit.
fn series_reports(ctx: &mut Context, dir: &Path, cases: &[Case], two_stage: bool) -> Result<(Vec<Value>, Vec<Vec<f64>>)> {
    let all = run_all(cases)?;
    let mut reports = Vec::with_capacity(cases.len());
    for (&(system, delta, state, _), values) in cases.iter().zip(&all) {
        let name = format!("series_{}_delta{delta}_{}.csv", system_id(&system), state_id(&state));
        ctx.emit_csv(Some(&dir.join(&name)), |w| write_series_csv(w, values))?;
        let class = classify_decay(values)?;
        let gaussian = rate_of(values, Quantity::GammaG).ok().map(|(_, fit)| fit);
        let mut report = json!({
            "file": name,
            "state": state_id(&state),
            "delta": delta,
            "label": class.label,
            "stages": class.stages,
            "gaussian_fit": gaussian,
            "recurrences": detect_recurrences(values, DEFAULT_RECURRENCE_THRESHOLD),
        });
        if two_stage {
            report["gaussian_exponential"] = json!(fit_two_stage(values, DecayModel::Gaussian, DecayModel::Exponential)?);
        }
        reports.push(report);
    }
    Ok((reports, all))
}

#[allow(clippy::too_many_arguments)]
fn scaling_bundle(
    ctx: &mut Context,
    dir: &Path,
    name: &str,
    cases: &[(SystemSpec, f64, f64)],
    state: u32,
    horizon: Option<usize>,
    quantity: Quantity,
    mode: ScalingMode,
    variable: ScalingVariable,
) -> Result<Value> {
    let points = scaling_points(cases, grid(&[state])[0], horizon, quantity)?;
    let xy: Vec<(f64, f64)> = points.iter().map(|p| (p.x, p.rate)).collect();
    let law = quasiecho_core::fitting::scaling_exponent(&xy, mode, variable)?;
    let report = json!({ "state": state, "quantity": quantity, "points": points, "law": law });
    ctx.emit_json(Some(&dir.join(name)), &report)?;
    Ok(json!({ "file": name, "state": state, "law": law }))
}

fn spectra_bundle(ctx: &mut Context, dir: &Path, j: f64, states: &[InitialState]) -> Result<Vec<Value>> {
    let spectra = spectra(ctx, j, TOP_K, states)?;
    let reports: Vec<Value> = spectra.par_iter().map(|sp| spectrum_report(sp).map(|r| json!(r))).collect::<Result<_>>()?;
    for sp in &spectra {
        let name = format!("spectrum_{}.csv", sp.source.as_deref().unwrap_or(""));
        ctx.emit_csv(Some(&dir.join(name)), |w| write_spectrum_csv(w, sp))?;
    }
    Ok(reports)
}
