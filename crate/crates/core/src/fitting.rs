//! Decay-law fits, model selection and scaling laws.

use quasiecho_numerics::{linear_least_squares, LinearFit};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, CoreError, Result};
use crate::fidelity::{detect_recurrences, saturation_estimate, tail, SaturationEstimate, DEFAULT_RECURRENCE_THRESHOLD};

pub const MIN_WINDOW: usize = 5;
pub const SINGLE_ACCEPT_R2: f64 = 0.98;
pub const STAGE_ACCEPT_R2: f64 = 0.95;
pub const UNDETERMINED_R2: f64 = 0.9;
pub const FROZEN_LEVEL: f64 = 0.9;
pub const BREAKPOINT_CANDIDATES: usize = 20;
/// Tail medians at or above this level do not count as a saturation floor.
pub const SATURATED_LEVEL: f64 = 0.25;
/// Width of the centered moving average applied before classification; it
/// suppresses the few-step oscillations of the kicked-top fidelity.
pub const CLASSIFY_SMOOTHING_WIDTH: usize = 9;
/// Largest allowed jump between the two stage models at the breakpoint.
pub const BREAKPOINT_CONTINUITY_FACTOR: f64 = 1.5;
/// A tail whose first-half mean exceeds its second-half mean by this factor is still decaying.
pub const TAIL_TREND_RATIO: f64 = 1.1;
/// Single Gaussian or exponential laws fitted from `t = 1` must extrapolate to
/// `F(0)` within this factor of 1.
pub const UNIT_PREFACTOR_FACTOR: f64 = 1.25;

/// Inclusive range of time steps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FitWindow {
    pub start: usize,
    pub end: usize,
}

impl FitWindow {
    pub fn new(start: usize, end: usize) -> Self {
        Self { start, end }
    }

    pub fn len(&self) -> usize {
        self.end + 1 - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.end < self.start
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecayModel {
    Gaussian,
    PowerLaw,
    Exponential,
}

impl DecayModel {
    fn name(self) -> &'static str {
        match self {
            Self::Gaussian => "gaussian",
            Self::PowerLaw => "power_law",
            Self::Exponential => "exponential",
        }
    }

    /// Linearizing coordinates `(x(t), y(F))`.
    fn x(self, t: f64) -> f64 {
        match self {
            Self::Gaussian => t * t,
            Self::PowerLaw => t.ln(),
            Self::Exponential => t,
        }
    }

    fn y(self, f: f64) -> f64 {
        match self {
            Self::Gaussian => -f.ln(),
            Self::PowerLaw | Self::Exponential => f.ln(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DecayParams {
    /// `F = e^{−Γ t²}`.
    Gaussian { gamma: f64 },
    /// `F = c t^{−α}`.
    PowerLaw { c: f64, alpha: f64 },
    /// `F = c e^{−β t}`.
    Exponential { c: f64, beta: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub model: DecayModel,
    pub params: DecayParams,
    pub window: FitWindow,
    #[serde(rename = "r2")]
    pub r_squared: f64,
    /// Intercept of the line in linearized coordinates.
    pub intercept: f64,
}

impl DecayFit {
    fn line(&self) -> LinearFit {
        let slope = match self.params {
            DecayParams::Gaussian { gamma } => gamma,
            DecayParams::PowerLaw { alpha, .. } => -alpha,
            DecayParams::Exponential { beta, .. } => -beta,
        };
        LinearFit { slope, intercept: self.intercept, r_squared: self.r_squared }
    }

    /// Model fidelity at time `t`, including the fitted intercept.
    pub fn predict(&self, t: f64) -> f64 {
        let y = self.line().predict(self.model.x(t));
        match self.model {
            DecayModel::Gaussian => (-y).exp(),
            _ => y.exp(),
        }
    }

    /// `r²` of this fixed line against `values` over `window`, in the model's coordinates.
    pub fn score(&self, values: &[f64], window: FitWindow) -> Result<f64> {
        let (xs, ys) = linearize(self.model, values, window)?;
        let line = self.line();
        let mean = ys.iter().sum::<f64>() / ys.len() as f64;
        let ss_tot: f64 = ys.iter().map(|y| (y - mean).powi(2)).sum();
        let ss_res: f64 = xs.iter().zip(&ys).map(|(x, y)| (y - line.predict(*x)).powi(2)).sum();
        Ok(if ss_tot == 0.0 {
            if ss_res == 0.0 {
                1.0
            } else {
                0.0
            }
        } else {
            (1.0 - ss_res / ss_tot).clamp(0.0, 1.0)
        })
    }
}

fn check_window(model: DecayModel, values: &[f64], w: FitWindow) -> Result<()> {
    let bad = |reason: &str| CoreError::BadWindow { start: w.start, end: w.end, reason: reason.into() };
    if w.is_empty() || w.end >= values.len() {
        return Err(bad("outside the series"));
    }
    if w.len() < MIN_WINDOW {
        return Err(bad("fewer than 5 points"));
    }
    if model == DecayModel::PowerLaw && w.start == 0 {
        return Err(bad("power-law window must exclude t = 0"));
    }
    if let Some(t) = (w.start..=w.end).find(|&t| values[t].is_nan() || values[t] <= 0.0) {
        return Err(CoreError::NonPositiveFidelity { t });
    }
    Ok(())
}

fn linearize(model: DecayModel, values: &[f64], w: FitWindow) -> Result<(Vec<f64>, Vec<f64>)> {
    check_window(model, values, w)?;
    let xs = (w.start..=w.end).map(|t| model.x(t as f64)).collect();
    let ys = (w.start..=w.end).map(|t| model.y(values[t])).collect();
    Ok((xs, ys))
}

/// Least-squares fit of `model` to explicit `(t, F)` samples.
pub fn fit_points(model: DecayModel, ts: &[f64], fs: &[f64], window: FitWindow) -> Result<DecayFit> {
    if ts.len() < MIN_WINDOW {
        return Err(CoreError::BadWindow { start: window.start, end: window.end, reason: "fewer than 5 points".into() });
    }
    if let Some(i) = fs.iter().position(|f| f.is_nan() || *f <= 0.0) {
        return Err(CoreError::NonPositiveFidelity { t: ts[i] as usize });
    }
    let xs: Vec<f64> = ts.iter().map(|&t| model.x(t)).collect();
    let ys: Vec<f64> = fs.iter().map(|&f| model.y(f)).collect();
    from_line(model, linear_least_squares(&xs, &ys)?, window)
}

fn from_line(model: DecayModel, line: LinearFit, window: FitWindow) -> Result<DecayFit> {
    let nonphysical = |detail: String| CoreError::NonPhysicalFit { model: model.name(), detail };
    let params = match model {
        DecayModel::Gaussian if line.slope > 0.0 => DecayParams::Gaussian { gamma: line.slope },
        DecayModel::Gaussian => return Err(nonphysical(format!("Γ = {} is not positive", line.slope))),
        DecayModel::PowerLaw if line.slope < 0.0 => DecayParams::PowerLaw { c: line.intercept.exp(), alpha: -line.slope },
        DecayModel::PowerLaw => return Err(nonphysical(format!("α = {} is not positive", -line.slope))),
        DecayModel::Exponential if line.slope <= 0.0 => DecayParams::Exponential { c: line.intercept.exp(), beta: -line.slope },
        DecayModel::Exponential => return Err(nonphysical(format!("β = {} is negative", -line.slope))),
    };
    Ok(DecayFit { model, params, window, r_squared: line.r_squared, intercept: line.intercept })
}

pub fn fit_model(model: DecayModel, values: &[f64], window: FitWindow) -> Result<DecayFit> {
    let (xs, ys) = linearize(model, values, window)?;
    from_line(model, linear_least_squares(&xs, &ys)?, window)
}

/// Line through `(t², −ln F)`; `Γ` is the slope.
pub fn fit_gaussian(values: &[f64], window: FitWindow) -> Result<DecayFit> {
    fit_model(DecayModel::Gaussian, values, window)
}

/// Line through `(ln t, ln F)`; `α = −slope`, `c = e^{intercept}`.
pub fn fit_power_law(values: &[f64], window: FitWindow) -> Result<DecayFit> {
    fit_model(DecayModel::PowerLaw, values, window)
}

/// Line through `(t, ln F)`; `β = −slope`, `c = e^{intercept}`.
pub fn fit_exponential(values: &[f64], window: FitWindow) -> Result<DecayFit> {
    fit_model(DecayModel::Exponential, values, window)
}

/// Where the decay ends and the fidelity floor or a revival begins.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayRegions {
    pub saturation: SaturationEstimate,
    /// The final quarter is still trending down, so no floor has been reached.
    pub still_decaying: bool,
    /// Saturation level used by the Gaussian window; zero when still decaying.
    pub floor: f64,
    /// Median of the final quarter; the decay region ends where `F` first falls below twice this.
    pub typical_floor: f64,
    /// Minimum before the first recurrence peak, if any.
    pub recurrence_onset: Option<usize>,
    pub pre_saturation_end: usize,
}

pub fn decay_regions(values: &[f64]) -> Result<DecayRegions> {
    if values.len() < 2 * MIN_WINDOW {
        return Err(invalid("series too short to analyze"));
    }
    let last = values.len() - 1;
    let saturation = saturation_estimate(values);
    let t = tail(values);
    let half = t.len() / 2;
    let mean = |s: &[f64]| s.iter().sum::<f64>() / s.len().max(1) as f64;
    let (early, late) = (mean(&t[..half]), mean(&t[half..]));
    let still_decaying = saturation.reliable && half > 0 && early > TAIL_TREND_RATIO * late;
    let floor = if still_decaying { 0.0 } else { saturation.value };
    // The median ignores isolated revivals that inflate the tail mean.
    let mut sorted = t.to_vec();
    sorted.sort_by(f64::total_cmp);
    let typical_floor = if still_decaying { 0.0 } else { sorted[sorted.len() / 2] };

    let recurrence_onset = detect_recurrences(values, DEFAULT_RECURRENCE_THRESHOLD * values[0])
        .first()
        .map(|&peak| (0..=peak).min_by(|&a, &b| values[a].total_cmp(&values[b])).expect("non-empty range"));
    let cap = recurrence_onset.unwrap_or(last);
    // A tail still far above zero means the series has not decayed to a floor.
    let pre_saturation_end = if still_decaying || typical_floor >= SATURATED_LEVEL {
        cap
    } else {
        values.iter().position(|&f| f < 2.0 * typical_floor).unwrap_or(last).min(cap)
    };
    Ok(DecayRegions { saturation, still_decaying, floor, typical_floor, recurrence_onset, pre_saturation_end })
}

/// First index `≥ from` with `F < level`, or `None`.
fn first_below(values: &[f64], from: usize, level: f64) -> Option<usize> {
    values.iter().skip(from).position(|&f| f < level).map(|i| i + from)
}

/// From `t = 1` until `F` first drops below `max(5·floor, 0.01)`.
pub fn default_gaussian_window(values: &[f64], regions: &DecayRegions) -> FitWindow {
    let level = (5.0 * regions.floor).max(0.01);
    let end = first_below(values, 1, level).map_or(regions.pre_saturation_end, |t| t.saturating_sub(1));
    FitWindow::new(1, end.min(regions.pre_saturation_end))
}

/// From the first `t` with `F < 0.9` to the end of the pre-saturation region.
pub fn default_power_law_window(values: &[f64], regions: &DecayRegions) -> FitWindow {
    let start = first_below(values, 1, 0.9).unwrap_or(values.len());
    FitWindow::new(start, regions.pre_saturation_end)
}

pub fn default_exponential_window(breakpoint: usize, regions: &DecayRegions) -> FitWindow {
    FitWindow::new(breakpoint, regions.pre_saturation_end)
}

/// Default window of `model` for a raw series, located on its smoothed copy
/// so few-step oscillations do not cut the window short.
pub fn default_window(values: &[f64], model: DecayModel) -> Result<FitWindow> {
    let smoothed = moving_average(values, CLASSIFY_SMOOTHING_WIDTH);
    let regions = decay_regions(&smoothed)?;
    Ok(match model {
        DecayModel::Gaussian => default_gaussian_window(&smoothed, &regions),
        DecayModel::PowerLaw => default_power_law_window(&smoothed, &regions),
        DecayModel::Exponential => default_exponential_window(1, &regions),
    })
}

/// Fits `model` to the raw series over [`default_window`].
pub fn fit_default(values: &[f64], model: DecayModel) -> Result<DecayFit> {
    fit_model(model, values, default_window(values, model)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecayLabel {
    Gaussian,
    PowerLaw,
    Exponential,
    TwoStageGaussianExponential,
    TwoStagePowerGaussian,
    OscillatoryFrozen,
    Undetermined,
}

impl DecayLabel {
    pub fn stage_count(self) -> usize {
        match self {
            Self::Gaussian | Self::PowerLaw | Self::Exponential => 1,
            Self::TwoStageGaussianExponential | Self::TwoStagePowerGaussian => 2,
            Self::OscillatoryFrozen | Self::Undetermined => 0,
        }
    }

    fn single(model: DecayModel) -> Self {
        match model {
            DecayModel::Gaussian => Self::Gaussian,
            DecayModel::PowerLaw => Self::PowerLaw,
            DecayModel::Exponential => Self::Exponential,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayClassification {
    pub label: DecayLabel,
    pub stages: Vec<DecayFit>,
    pub regions: Option<DecayRegions>,
}

#[derive(Debug, Clone, Copy)]
struct SingleCandidate {
    fit: DecayFit,
    score: f64,
}

/// Two laws joined at `breakpoint`, scored by [`piecewise_log_r2`] over the joint span.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoStageFit {
    pub first: DecayFit,
    pub second: DecayFit,
    pub breakpoint: usize,
    pub combined_r2: f64,
}

/// Centered moving average of odd `width`, truncated at the ends.
pub fn moving_average(values: &[f64], width: usize) -> Vec<f64> {
    let h = width / 2;
    let mut prefix = Vec::with_capacity(values.len() + 1);
    prefix.push(0.0);
    for v in values {
        prefix.push(prefix.last().unwrap() + v);
    }
    (0..values.len())
        .map(|t| {
            let (a, b) = (t.saturating_sub(h), (t + h).min(values.len() - 1));
            (prefix[b + 1] - prefix[a]) / (b + 1 - a) as f64
        })
        .collect()
}

/// Labels the decay law of a fidelity series. Fits are made to the smoothed
/// series, so stage parameters describe its envelope.
pub fn classify_decay(values: &[f64]) -> Result<DecayClassification> {
    if values.iter().all(|&f| f >= FROZEN_LEVEL) {
        return Ok(DecayClassification { label: DecayLabel::OscillatoryFrozen, stages: vec![], regions: None });
    }
    let smoothed = moving_average(values, CLASSIFY_SMOOTHING_WIDTH);
    let values = &smoothed[..];
    let regions = decay_regions(values)?;
    let end = regions.pre_saturation_end;

    let gauss_w = default_gaussian_window(values, &regions);
    let power_w = default_power_law_window(values, &regions);
    let exp_w = FitWindow::new(1, end);
    let mut singles = Vec::new();
    for (model, w, score_w) in [
        (DecayModel::Gaussian, gauss_w, FitWindow::new(1, end)),
        (DecayModel::PowerLaw, power_w, power_w),
        (DecayModel::Exponential, exp_w, exp_w),
    ] {
        if let Ok(fit) = fit_model(model, values, w) {
            let anchored = model == DecayModel::PowerLaw || fit.predict(0.0).ln().abs() <= UNIT_PREFACTOR_FACTOR.ln();
            if let (true, Ok(score)) = (anchored, fit.score(values, score_w)) {
                singles.push(SingleCandidate { fit, score });
            }
        }
    }
    // Earlier models win ties.
    let best_single = singles.iter().copied().fold(None::<SingleCandidate>, |best, c| match best {
        Some(b) if b.score >= c.score => Some(b),
        _ => Some(c),
    });
    if let Some(b) = best_single.filter(|b| b.score >= SINGLE_ACCEPT_R2) {
        return Ok(DecayClassification { label: DecayLabel::single(b.fit.model), stages: vec![b.fit], regions: Some(regions) });
    }

    let pairs = [
        (DecayLabel::TwoStageGaussianExponential, DecayModel::Gaussian, DecayModel::Exponential, 1),
        (DecayLabel::TwoStagePowerGaussian, DecayModel::PowerLaw, DecayModel::Gaussian, power_w.start),
    ];
    let mut best_pair: Option<(DecayLabel, TwoStageFit)> = None;
    for (label, m1, m2, start) in pairs {
        if let Some(ts) = search_breakpoint(values, m1, m2, start, end) {
            if best_pair.is_none_or(|(_, b)| ts.combined_r2 > b.combined_r2) {
                best_pair = Some((label, ts));
            }
        }
    }
    if let Some((label, ts)) = best_pair {
        return Ok(DecayClassification { label, stages: vec![ts.first, ts.second], regions: Some(regions) });
    }
    if let Some(b) = best_single.filter(|b| b.score >= UNDETERMINED_R2) {
        return Ok(DecayClassification { label: DecayLabel::single(b.fit.model), stages: vec![b.fit], regions: Some(regions) });
    }
    Ok(DecayClassification { label: DecayLabel::Undetermined, stages: vec![], regions: Some(regions) })
}

/// Best two-stage fit of `first` followed by `second` on the smoothed series,
/// without the single-law acceptance step of [`classify_decay`]. `None` when
/// no breakpoint satisfies the per-stage and continuity constraints.
pub fn fit_two_stage(values: &[f64], first: DecayModel, second: DecayModel) -> Result<Option<TwoStageFit>> {
    let smoothed = moving_average(values, CLASSIFY_SMOOTHING_WIDTH);
    let regions = decay_regions(&smoothed)?;
    let start = match first {
        DecayModel::PowerLaw => default_power_law_window(&smoothed, &regions).start,
        _ => 1,
    };
    Ok(search_breakpoint(&smoothed, first, second, start, regions.pre_saturation_end))
}

fn evaluate_split(values: &[f64], m1: DecayModel, m2: DecayModel, start: usize, b: usize, end: usize) -> Option<TwoStageFit> {
    let first = fit_model(m1, values, FitWindow::new(start, b)).ok()?;
    let second = fit_model(m2, values, FitWindow::new(b, end)).ok()?;
    if first.r_squared < STAGE_ACCEPT_R2 || second.r_squared < STAGE_ACCEPT_R2 {
        return None;
    }
    // Both stages describe one continuous curve.
    if (first.predict(b as f64) / second.predict(b as f64)).ln().abs() > BREAKPOINT_CONTINUITY_FACTOR.ln() {
        return None;
    }
    // A slower second stage must sit above the first stage's extrapolation.
    if m2 == DecayModel::Exponential && second.predict(end as f64) < first.predict(end as f64) {
        return None;
    }
    Some(TwoStageFit { first, second, breakpoint: b, combined_r2: piecewise_log_r2(values, &first, &second, start, b, end) })
}

/// `r²` of the piecewise model in `ln F` over `[start, end]`.
pub fn piecewise_log_r2(values: &[f64], first: &DecayFit, second: &DecayFit, start: usize, b: usize, end: usize) -> f64 {
    let ys: Vec<f64> = values[start..=end].iter().map(|f| f.ln()).collect();
    let mean = ys.iter().sum::<f64>() / ys.len() as f64;
    let ss_tot: f64 = ys.iter().map(|y| (y - mean).powi(2)).sum();
    let ss_res: f64 = (start..=end)
        .zip(&ys)
        .map(|(t, y)| {
            let stage = if t <= b { first } else { second };
            (y - stage.predict(t as f64).ln()).powi(2)
        })
        .sum();
    if ss_tot == 0.0 {
        return 1.0;
    }
    (1.0 - ss_res / ss_tot).clamp(0.0, 1.0)
}

/// Coarse grid of breakpoints, then every breakpoint between the best one's neighbours.
fn search_breakpoint(values: &[f64], m1: DecayModel, m2: DecayModel, start: usize, end: usize) -> Option<TwoStageFit> {
    let lo = start + MIN_WINDOW - 1;
    let hi = end.checked_sub(MIN_WINDOW - 1)?;
    if hi < lo {
        return None;
    }
    let span = hi - lo;
    let grid: Vec<usize> = (0..BREAKPOINT_CANDIDATES)
        .map(|i| lo + (span * i) / (BREAKPOINT_CANDIDATES - 1))
        .collect::<std::collections::BTreeSet<_>>()
        .into_iter()
        .collect();
    let better = |cand: &Option<TwoStageFit>, ts: &TwoStageFit| cand.as_ref().is_none_or(|b| ts.combined_r2 > b.combined_r2);
    let mut best: Option<TwoStageFit> = None;
    let mut best_idx = 0;
    for (i, &b) in grid.iter().enumerate() {
        if let Some(ts) = evaluate_split(values, m1, m2, start, b, end) {
            if better(&best, &ts) {
                best = Some(ts);
                best_idx = i;
            }
        }
    }
    best.as_ref()?;
    let from = grid[best_idx.saturating_sub(1)];
    let to = grid[(best_idx + 1).min(grid.len() - 1)];
    let mut refined: Option<TwoStageFit> = None;
    for b in from..=to {
        if let Some(ts) = evaluate_split(values, m1, m2, start, b, end) {
            if better(&refined, &ts) {
                refined = Some(ts);
            }
        }
    }
    refined.or(best)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScalingMode {
    LogLog,
    Linear,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScalingVariable {
    Delta,
    J,
}

/// `rate ≈ prefactor · x^exponent`, or `rate ≈ prefactor · x + offset` in linear mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingLaw {
    pub exponent: f64,
    pub prefactor: f64,
    /// Intercept of the linear-mode fit; zero in log-log mode.
    pub offset: f64,
    #[serde(rename = "r2")]
    pub r_squared: f64,
    pub variable: ScalingVariable,
    pub mode: ScalingMode,
}

pub fn scaling_exponent(points: &[(f64, f64)], mode: ScalingMode, variable: ScalingVariable) -> Result<ScalingLaw> {
    if points.len() < 3 {
        return Err(invalid(format!("scaling law needs at least 3 points, got {}", points.len())));
    }
    match mode {
        ScalingMode::LogLog => {
            if points.iter().any(|&(x, y)| !(x > 0.0 && y > 0.0)) {
                return Err(invalid("log-log scaling needs positive coordinates"));
            }
            let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
            let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
            let line = linear_least_squares(&xs, &ys)?;
            Ok(ScalingLaw {
                exponent: line.slope,
                prefactor: line.intercept.exp(),
                offset: 0.0,
                r_squared: line.r_squared,
                variable,
                mode,
            })
        }
        ScalingMode::Linear => {
            let xs: Vec<f64> = points.iter().map(|p| p.0).collect();
            let ys: Vec<f64> = points.iter().map(|p| p.1).collect();
            let line = linear_least_squares(&xs, &ys)?;
            Ok(ScalingLaw {
                exponent: 1.0,
                prefactor: line.slope,
                offset: line.intercept,
                r_squared: line.r_squared,
                variable,
                mode,
            })
        }
    }
}

/// `γ_G = Γ_G / (J δ²)`.
pub fn gamma_g_normalized(gamma: f64, j: f64, delta: f64) -> Result<f64> {
    if !(j > 0.0 && delta > 0.0) {
        return Err(invalid("J and delta must be positive"));
    }
    Ok(gamma / (j * delta * delta))
}
