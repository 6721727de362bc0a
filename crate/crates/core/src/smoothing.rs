//! Exponential smoothing: single, double (additive or ratio trend) and
//! Holt-Winters, plus an exhaustive grid search for the smoothing constants.
//!
//! Initial states:
//!
//! * single: `F_1 = Y_1`;
//! * double: `C_1 = Y_1`, `T_1 = Y_2 - Y_1` (additive) or `Y_2 / Y_1` (ratio);
//! * Holt-Winters: the first two seasons give the level and slope; the first
//!   season's values are detrended against that slope to seed the seasonal
//!   indices, which are then normalised to mean 1 (or mean 0).
//!
//! Error measures always use one-step-ahead fitted values.

use rayon::prelude::*;
use serde::Serialize;

use crate::decomposition::Composition;
use crate::error::{Error, Result};
use crate::forecast::{check_horizon, check_period, FittedModel, ForecastResult};
use crate::series::TimeSeries;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SmoothingParams {
    pub alpha: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
}

impl SmoothingParams {
    pub fn single(alpha: f64) -> Self {
        Self { alpha, beta: None, gamma: None }
    }

    pub fn double(alpha: f64, beta: f64) -> Self {
        Self { alpha, beta: Some(beta), gamma: None }
    }

    pub fn triple(alpha: f64, beta: f64, gamma: f64) -> Self {
        Self { alpha, beta: Some(beta), gamma: Some(gamma) }
    }
}

fn open_unit(name: &'static str, value: f64) -> Result<f64> {
    if value > 0.0 && value < 1.0 {
        Ok(value)
    } else {
        Err(Error::BadParams { name, value })
    }
}

fn required(name: &'static str, value: Option<f64>) -> Result<f64> {
    open_unit(name, value.ok_or(Error::BadParams { name, value: f64::NAN })?)
}

/// Which smoothing recursion to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SmoothingKind {
    Single,
    Double { trend: Composition },
    HoltWinters { period: usize, model: Composition },
}

/// Criterion minimised by [`optimize_smoothing_params`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Objective {
    #[default]
    Mse,
    Mape,
}

struct Path {
    fitted: Vec<Option<f64>>,
    forecasts: Vec<f64>,
}

fn ses_path(y: &[f64], alpha: f64, horizon: usize) -> Path {
    let mut fitted = vec![None; y.len()];
    let mut f = y[0];
    for (t, &obs) in y.iter().enumerate() {
        if t > 0 {
            fitted[t] = Some(f);
        }
        // Error-correction form of F' = αY + (1-α)F; keeps F fixed exactly
        // when Y = F.
        f += alpha * (obs - f);
    }
    Path { fitted, forecasts: vec![f; horizon] }
}

fn double_path(y: &[f64], alpha: f64, beta: f64, trend: Composition, horizon: usize) -> Path {
    let mut fitted = vec![None; y.len()];
    let mut level = y[0];
    let mut slope = match trend {
        Composition::Additive => y[1] - y[0],
        Composition::Multiplicative => y[1] / y[0],
    };
    for t in 1..y.len() {
        let prev = level;
        match trend {
            Composition::Additive => {
                fitted[t] = Some(level + slope);
                level = alpha * y[t] + (1.0 - alpha) * (prev + slope);
                slope = beta * (level - prev) + (1.0 - beta) * slope;
            }
            Composition::Multiplicative => {
                fitted[t] = Some(level * slope);
                level = alpha * y[t] + (1.0 - alpha) * (prev * slope);
                slope = beta * (level / prev) + (1.0 - beta) * slope;
            }
        }
    }
    let forecasts = (1..=horizon)
        .map(|p| match trend {
            Composition::Additive => level + p as f64 * slope,
            Composition::Multiplicative => level * slope.powi(p as i32),
        })
        .collect();
    Path { fitted, forecasts }
}

fn holt_winters_path(
    y: &[f64],
    period: usize,
    alpha: f64,
    beta: f64,
    gamma: f64,
    model: Composition,
    horizon: usize,
) -> Result<Path> {
    let l = period;
    let n = y.len();
    let first = y[..l].iter().sum::<f64>() / l as f64;
    let second = y[l..2 * l].iter().sum::<f64>() / l as f64;
    let mut slope = (second - first) / l as f64;
    let centre = (l as f64 - 1.0) / 2.0;
    let mut level = first + slope * centre;

    let mut season = Vec::with_capacity(n);
    for (j, &obs) in y[..l].iter().enumerate() {
        let base = first + slope * (j as f64 - centre);
        season.push(match model {
            Composition::Additive => obs - base,
            Composition::Multiplicative => {
                if base <= 0.0 {
                    return Err(Error::NonPositiveValue { index: j, value: base });
                }
                obs / base
            }
        });
    }
    let mean = season.iter().sum::<f64>() / l as f64;
    match model {
        Composition::Additive => season.iter_mut().for_each(|v| *v -= mean),
        Composition::Multiplicative => season.iter_mut().for_each(|v| *v /= mean),
    }

    let mut fitted = vec![None; n];
    for t in l..n {
        let old = season[t - l];
        let prev = level;
        match model {
            Composition::Additive => {
                fitted[t] = Some(level + slope + old);
                level = alpha * (y[t] - old) + (1.0 - alpha) * (prev + slope);
                slope = beta * (level - prev) + (1.0 - beta) * slope;
                season.push(gamma * (y[t] - level) + (1.0 - gamma) * old);
            }
            Composition::Multiplicative => {
                fitted[t] = Some((level + slope) * old);
                level = alpha * (y[t] / old) + (1.0 - alpha) * (prev + slope);
                slope = beta * (level - prev) + (1.0 - beta) * slope;
                season.push(gamma * (y[t] / level) + (1.0 - gamma) * old);
            }
        }
    }
    let forecasts = (1..=horizon)
        .map(|m| {
            let index = season[n - l + (m - 1) % l];
            let base = level + m as f64 * slope;
            match model {
                Composition::Additive => base + index,
                Composition::Multiplicative => base * index,
            }
        })
        .collect();
    Ok(Path { fitted, forecasts })
}

fn check_len(series: &TimeSeries, needed: usize) -> Result<()> {
    if series.len() < needed {
        Err(Error::SeriesTooShort { needed, got: series.len() })
    } else {
        Ok(())
    }
}

/// Single exponential smoothing; every forecast equals `F_{n+1}`.
pub fn ses_forecast(series: &TimeSeries, alpha: f64, horizon: usize) -> Result<ForecastResult> {
    check_horizon(horizon)?;
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::BadParams { name: "alpha", value: alpha });
    }
    let path = ses_path(series.values(), alpha, horizon);
    ForecastResult::new(
        series,
        path.fitted,
        path.forecasts,
        FittedModel::Smoothing(SmoothingParams::single(alpha)),
    )
}

/// Double exponential smoothing with an additive slope or a ratio trend.
pub fn double_exponential_forecast(
    series: &TimeSeries,
    alpha: f64,
    beta: f64,
    trend: Composition,
    horizon: usize,
) -> Result<ForecastResult> {
    check_horizon(horizon)?;
    check_len(series, 3)?;
    open_unit("alpha", alpha)?;
    open_unit("beta", beta)?;
    if trend == Composition::Multiplicative {
        series.require_positive()?;
    }
    let path = double_path(series.values(), alpha, beta, trend, horizon);
    ForecastResult::new(
        series,
        path.fitted,
        path.forecasts,
        FittedModel::Smoothing(SmoothingParams::double(alpha, beta)),
    )
}

/// Holt-Winters smoothing with season length `period`.
pub fn holt_winters_forecast(
    series: &TimeSeries,
    period: usize,
    params: SmoothingParams,
    model: Composition,
    horizon: usize,
) -> Result<ForecastResult> {
    check_horizon(horizon)?;
    check_period(period)?;
    let alpha = open_unit("alpha", params.alpha)?;
    let beta = required("beta", params.beta)?;
    let gamma = required("gamma", params.gamma)?;
    check_len(series, 2 * period)?;
    if model == Composition::Multiplicative {
        series.require_positive()?;
    }
    let path = holt_winters_path(series.values(), period, alpha, beta, gamma, model, horizon)?;
    ForecastResult::new(series, path.fitted, path.forecasts, FittedModel::Smoothing(params))
}

/// Runs the recursion for `kind` and returns the forecast.
pub fn smoothing_forecast(
    kind: SmoothingKind,
    series: &TimeSeries,
    params: SmoothingParams,
    horizon: usize,
) -> Result<ForecastResult> {
    match kind {
        SmoothingKind::Single => ses_forecast(series, params.alpha, horizon),
        SmoothingKind::Double { trend } => double_exponential_forecast(
            series,
            params.alpha,
            required("beta", params.beta)?,
            trend,
            horizon,
        ),
        SmoothingKind::HoltWinters { period, model } => {
            holt_winters_forecast(series, period, params, model, horizon)
        }
    }
}

/// The search values for each constant: 0.05, 0.10, ..., 0.95.
pub fn parameter_grid() -> Vec<f64> {
    (1..=19).map(|k| k as f64 / 20.0).collect()
}

/// Every candidate for `kind`, in lexicographic `(alpha, beta, gamma)` order.
pub fn candidate_params(kind: SmoothingKind) -> Vec<SmoothingParams> {
    let g = parameter_grid();
    let mut out = Vec::new();
    for &a in &g {
        match kind {
            SmoothingKind::Single => out.push(SmoothingParams::single(a)),
            SmoothingKind::Double { .. } => out.extend(g.iter().map(|&b| SmoothingParams::double(a, b))),
            SmoothingKind::HoltWinters { .. } => {
                for &b in &g {
                    out.extend(g.iter().map(|&c| SmoothingParams::triple(a, b, c)));
                }
            }
        }
    }
    out
}

/// One-step in-sample score of `params`, or `None` if the run is invalid.
pub fn objective_value(
    kind: SmoothingKind,
    series: &TimeSeries,
    params: SmoothingParams,
    objective: Objective,
) -> Option<f64> {
    let r = smoothing_forecast(kind, series, params, 1).ok()?;
    let score = match objective {
        Objective::Mse => r.errors.msd,
        Objective::Mape => r.errors.mape,
    };
    score.is_finite().then_some(score)
}

/// Exhaustive grid search. Candidates are scored concurrently; the minimum
/// is then taken in grid order with a strict comparison, so ties go to the
/// lexicographically smallest `(alpha, beta, gamma)`.
pub fn optimize_smoothing_params(
    kind: SmoothingKind,
    series: &TimeSeries,
    objective: Objective,
) -> Result<SmoothingParams> {
    // Surface precondition errors instead of an empty grid.
    let probe = SmoothingParams::triple(0.5, 0.5, 0.5);
    smoothing_forecast(kind, series, probe, 1)?;

    let candidates = candidate_params(kind);
    let scores: Vec<Option<f64>> = candidates
        .par_iter()
        .map(|&p| objective_value(kind, series, p, objective))
        .collect();
    let mut best: Option<(f64, SmoothingParams)> = None;
    for (p, score) in candidates.into_iter().zip(scores) {
        if let Some(s) = score {
            if best.is_none_or(|(b, _)| s < b) {
                best = Some((s, p));
            }
        }
    }
    best.map(|(_, p)| p).ok_or(Error::OptimizationDiverged)
}
