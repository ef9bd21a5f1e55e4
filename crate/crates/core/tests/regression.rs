//! Classification geography and scaling on the reference kicked top
//! (J = 500, k = 1.1).

use quasiecho_core::fidelity::{EchoEngine, InitialState, SystemSpec};
use quasiecho_core::fitting::{
    classify_decay, decay_regions, default_gaussian_window, default_power_law_window, fit_gaussian, fit_points,
    gamma_g_normalized, moving_average, DecayLabel, DecayModel, DecayParams, FitWindow, CLASSIFY_SMOOTHING_WIDTH,
};
use quasiecho_core::spectral::{extent_spectrum, spectrum_shape_summary, EigenCache};
use quasiecho_core::spin::{spin_coherent_state, GridIndex, SpinParameters};
use quasiecho_core::sweep::sweep;

fn top(j: f64) -> SystemSpec {
    SystemSpec::Top { spin: SpinParameters::new(j).unwrap(), k: 1.1 }
}

fn grid(states: &[u32]) -> Vec<InitialState> {
    states.iter().map(|&g| InitialState::grid(g).unwrap()).collect()
}

#[test]
fn regular_region_states_are_gaussian_or_frozen() {
    let r = sweep(top(500.0), 0.001, 1000, &grid(&[52, 53, 54, 55, 41])).unwrap();
    let labels: Vec<_> = r.records.iter().map(|r| r.label).collect();
    assert_eq!(labels[..4], [Some(DecayLabel::Gaussian); 4]);
    assert_eq!(labels[4], Some(DecayLabel::OscillatoryFrozen));
}

#[test]
fn edge_states_decay_as_power_laws() {
    // The power law only dominates once the initial Gaussian shoulder is short
    // compared to the horizon.
    let r = sweep(top(500.0), 0.001, 10_000, &grid(&[56, 77])).unwrap();
    for rec in &r.records {
        assert_eq!(rec.label, Some(DecayLabel::PowerLaw), "{:?}", rec.state);
    }
}

#[test]
fn gaussian_label_stable_in_delta() {
    let states = grid(&[52]);
    for delta in [5e-4, 1e-3, 2e-3] {
        let r = sweep(top(500.0), delta, 1000, &states).unwrap();
        assert_eq!(r.records[0].label, Some(DecayLabel::Gaussian), "delta {delta}");
    }
}

fn gamma(j: f64, delta: f64, state: u32, horizon: usize) -> f64 {
    let s = EchoEngine::new(top(j), delta).unwrap().run(&InitialState::grid(state).unwrap(), horizon).unwrap();
    let regions = decay_regions(&s.values).unwrap();
    let fit = fit_gaussian(&s.values, default_gaussian_window(&s.values, &regions)).unwrap();
    let DecayParams::Gaussian { gamma } = fit.params else { unreachable!() };
    gamma
}

#[test]
fn normalized_gaussian_rate_depends_only_on_state() {
    let mut values = Vec::new();
    for delta in [1e-3, 5e-3] {
        for j in [100.0, 300.0, 500.0] {
            values.push(gamma_g_normalized(gamma(j, delta, 52, 1000), j, delta).unwrap());
        }
    }
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    for v in &values {
        assert!((v / mean - 1.0).abs() < 0.3, "{values:?}");
    }
}

#[test]
fn fits_are_stable_under_subsampling() {
    let engine = EchoEngine::new(top(500.0), 0.001).unwrap();
    for (state, horizon, model) in [(52, 1000, DecayModel::Gaussian), (56, 10_000, DecayModel::PowerLaw)] {
        // Raw series carry few-step oscillations that alias under decimation,
        // so the check runs on the smoothed series the classifier fits.
        let raw = engine.run(&InitialState::grid(state).unwrap(), horizon).unwrap().values;
        let values = moving_average(&raw, CLASSIFY_SMOOTHING_WIDTH);
        let regions = decay_regions(&values).unwrap();
        let w = match model {
            DecayModel::Gaussian => default_gaussian_window(&values, &regions),
            _ => default_power_law_window(&values, &regions),
        };
        let all: Vec<usize> = (w.start..=w.end).collect();
        let half: Vec<usize> = (w.start..=w.end).step_by(2).collect();
        let fit = |ts: &[usize]| {
            let t: Vec<f64> = ts.iter().map(|&t| t as f64).collect();
            let f: Vec<f64> = ts.iter().map(|&t| values[t]).collect();
            fit_points(model, &t, &f, FitWindow::new(w.start, w.end)).unwrap().params
        };
        match (fit(&all), fit(&half)) {
            (DecayParams::Gaussian { gamma: a }, DecayParams::Gaussian { gamma: b }) => assert!((a / b - 1.0).abs() < 0.01),
            (DecayParams::PowerLaw { c: c1, alpha: a1 }, DecayParams::PowerLaw { c: c2, alpha: a2 }) => {
                assert!((a1 / a2 - 1.0).abs() < 0.01 && (c1 / c2 - 1.0).abs() < 0.01, "{c1} {a1} {c2} {a2}");
            }
            other => panic!("unexpected parameters {other:?}"),
        }
    }
}

#[test]
fn spectra_widen_and_move_outward_across_the_grid() {
    let spin = SpinParameters::new(500.0).unwrap();
    let cache = EigenCache::on_disk(std::path::Path::new(env!("CARGO_TARGET_TMPDIR")).join("eigen-cache")).unwrap();
    let es = cache.qkt_eigensystem(spin, 1.1).unwrap();
    let shape = |g: u32| {
        let psi = spin_coherent_state(spin, GridIndex::new(g).unwrap().location());
        let sp = extent_spectrum(&psi, &es).unwrap();
        assert!((sp.total_amplitude() - 1.0).abs() < 1e-8);
        spectrum_shape_summary(&sp).unwrap()
    };
    let means: Vec<f64> = (52..=55).map(|g| shape(g).mean_extent).collect();
    assert!(means.windows(2).all(|w| w[0] < w[1]), "{means:?}");
    let (s52, s56) = (shape(52), shape(56));
    assert!(s56.mean_extent > s52.mean_extent && s56.extent_spread < s52.extent_spread);
    assert!(es.extents.iter().all(|&e| (0.0..=500.0).contains(&e)));
    assert!(es.eigen.residual_norm <= 1e-8);
}

#[test]
fn classification_needs_decay_below_threshold() {
    let c = classify_decay(&vec![1.0; 200]).unwrap();
    assert_eq!(c.label, DecayLabel::OscillatoryFrozen);
    assert!(c.stages.is_empty());
}
