//! Classical decomposition forecasting.
//!
//! A series is split into a straight-line trend, a seasonal index per
//! calendar season and an irregular remainder, composed either as a sum or
//! as a product. Seasonal indices come from one of two estimators:
//!
//! * [`IndexMethod::Standard`]: detrend against a least-squares line fitted
//!   to the raw series, then average the detrended values per season.
//! * [`IndexMethod::CenteredMovingAverage`]: detrend against the centered
//!   moving average of `period` terms (ratio-to-moving-average).
//!
//! Forecasts deseasonalize the series, refit the line, project it and put
//! the seasonal index back. The cyclical component is not modelled.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::forecast::{check_horizon, check_period, FittedModel, ForecastResult};
use crate::series::{centered_moving_average, Lag, TimeSeries, YearMonth};

/// How trend, seasonal and irregular components combine.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Composition {
    Additive,
    Multiplicative,
}

impl Composition {
    fn remove(self, value: f64, component: f64) -> f64 {
        match self {
            Composition::Additive => value - component,
            Composition::Multiplicative => value / component,
        }
    }

    fn apply(self, value: f64, component: f64) -> f64 {
        match self {
            Composition::Additive => value + component,
            Composition::Multiplicative => value * component,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum IndexMethod {
    Standard,
    CenteredMovingAverage,
}

/// `intercept + slope * t`, with `t` counted in months from the series start.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrendLine {
    pub intercept: f64,
    pub slope: f64,
}

impl TrendLine {
    /// Ordinary least squares on `t = 0..n-1`.
    pub fn fit(values: &[f64]) -> Self {
        let n = values.len() as f64;
        let t_mean = (n - 1.0) / 2.0;
        let y_mean = values.iter().sum::<f64>() / n;
        let (mut sxy, mut sxx) = (0.0, 0.0);
        for (t, y) in values.iter().enumerate() {
            let dt = t as f64 - t_mean;
            sxy += dt * (y - y_mean);
            sxx += dt * dt;
        }
        let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
        Self { intercept: y_mean - slope * t_mean, slope }
    }

    pub fn at(&self, t: f64) -> f64 {
        self.intercept + self.slope * t
    }
}

/// One index per calendar season. `indices[j]` belongs to every month whose
/// ordinal is congruent to `j` modulo `period` (for `period = 12`, index 0
/// is January).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeasonalIndexSet {
    pub period: usize,
    pub model: Composition,
    pub indices: Vec<f64>,
}

impl SeasonalIndexSet {
    pub fn for_month(&self, month: YearMonth) -> f64 {
        self.indices[month.season(self.period)]
    }

    /// Averages detrended values per season and normalises them to mean 1
    /// (multiplicative) or mean 0 (additive).
    fn from_detrended(
        period: usize,
        model: Composition,
        detrended: impl Iterator<Item = (usize, f64)>,
    ) -> Result<Self> {
        let mut sums = vec![0.0; period];
        let mut counts = vec![0usize; period];
        for (season, v) in detrended {
            sums[season] += v;
            counts[season] += 1;
        }
        if counts.contains(&0) {
            return Err(Error::SeriesTooShort { needed: 2 * period, got: counts.iter().sum() });
        }
        let mut indices: Vec<f64> = sums.iter().zip(&counts).map(|(s, &c)| s / c as f64).collect();
        let mean = indices.iter().sum::<f64>() / period as f64;
        match model {
            Composition::Additive => indices.iter_mut().for_each(|v| *v -= mean),
            Composition::Multiplicative => {
                if let Some(index) = indices.iter().position(|&v| v <= 0.0) {
                    return Err(Error::NonPositiveValue { index, value: indices[index] });
                }
                indices.iter_mut().for_each(|v| *v /= mean);
            }
        }
        Ok(Self { period, model, indices })
    }
}

fn check_inputs(series: &TimeSeries, period: usize, model: Composition) -> Result<()> {
    check_period(period)?;
    if series.len() < 2 * period {
        return Err(Error::SeriesTooShort { needed: 2 * period, got: series.len() });
    }
    if model == Composition::Multiplicative {
        series.require_positive()?;
    }
    Ok(())
}

/// Seasonal indices from detrending against a least-squares line.
pub fn seasonal_indices_standard(
    series: &TimeSeries,
    period: usize,
    model: Composition,
) -> Result<SeasonalIndexSet> {
    check_inputs(series, period, model)?;
    let line = TrendLine::fit(series.values());
    let mut detrended = Vec::with_capacity(series.len());
    for (t, &y) in series.values().iter().enumerate() {
        let trend = line.at(t as f64);
        if model == Composition::Multiplicative && trend <= 0.0 {
            return Err(Error::NonPositiveValue { index: t, value: trend });
        }
        detrended.push((series.season_at(t, period), model.remove(y, trend)));
    }
    SeasonalIndexSet::from_detrended(period, model, detrended.into_iter())
}

/// Seasonal indices by the ratio (or difference) to a centered moving
/// average of `period` terms. The moving average loses `period / 2`
/// observations at each end; every season still has at least one value
/// when the series covers two full cycles.
pub fn seasonal_indices_cma(
    series: &TimeSeries,
    period: usize,
    model: Composition,
) -> Result<SeasonalIndexSet> {
    check_inputs(series, period, model)?;
    let cma = centered_moving_average(series, Lag::new(period)?)?;
    let offset = series.start().months_until(cma.start()) as usize;
    let detrended = cma.values().iter().enumerate().map(|(j, &avg)| {
        let t = j + offset;
        (series.season_at(t, period), model.remove(series.values()[t], avg))
    });
    SeasonalIndexSet::from_detrended(period, model, detrended)
}

pub fn seasonal_indices(
    series: &TimeSeries,
    period: usize,
    model: Composition,
    method: IndexMethod,
) -> Result<SeasonalIndexSet> {
    match method {
        IndexMethod::Standard => seasonal_indices_standard(series, period, model),
        IndexMethod::CenteredMovingAverage => seasonal_indices_cma(series, period, model),
    }
}

/// Trend, seasonal indices and irregular remainder of a series.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecompositionFit {
    pub start: YearMonth,
    pub indices: SeasonalIndexSet,
    pub trend: TrendLine,
    pub irregular: Vec<f64>,
}

impl DecompositionFit {
    fn seasonal(&self, t: usize) -> f64 {
        self.indices.for_month(self.start.add_months(t as i64))
    }

    /// Trend and season without the irregular term.
    pub fn systematic(&self, t: usize) -> f64 {
        self.indices.model.apply(self.trend.at(t as f64), self.seasonal(t))
    }

    /// Rebuilds the observed series from its three components.
    pub fn recompose(&self) -> Vec<f64> {
        let model = self.indices.model;
        self.irregular
            .iter()
            .enumerate()
            .map(|(t, &irr)| model.apply(self.systematic(t), irr))
            .collect()
    }
}

pub fn decompose(
    series: &TimeSeries,
    period: usize,
    model: Composition,
    method: IndexMethod,
) -> Result<DecompositionFit> {
    let indices = seasonal_indices(series, period, model, method)?;
    let deseasonalized: Vec<f64> = series
        .values()
        .iter()
        .enumerate()
        .map(|(t, &y)| model.remove(y, indices.for_month(series.month_at(t))))
        .collect();
    let trend = TrendLine::fit(&deseasonalized);
    let mut fit = DecompositionFit { start: series.start(), indices, trend, irregular: Vec::new() };
    fit.irregular = series
        .values()
        .iter()
        .enumerate()
        .map(|(t, &y)| model.remove(y, fit.systematic(t)))
        .collect();
    Ok(fit)
}

/// Projects the refitted trend `horizon` months ahead and reapplies each
/// month's seasonal index. Error measures use the in-sample systematic fit.
pub fn forecast_decomposition(
    series: &TimeSeries,
    period: usize,
    model: Composition,
    method: IndexMethod,
    horizon: usize,
) -> Result<ForecastResult> {
    check_horizon(horizon)?;
    let fit = decompose(series, period, model, method)?;
    let n = series.len();
    let fitted = (0..n).map(|t| Some(fit.systematic(t))).collect();
    let forecasts = (n..n + horizon).map(|t| fit.systematic(t)).collect();
    ForecastResult::new(
        series,
        fitted,
        forecasts,
        FittedModel::Decomposition { indices: fit.indices, trend: fit.trend },
    )
}
