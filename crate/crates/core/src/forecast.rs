use serde::Serialize;

use crate::arima::ArimaModel;
use crate::decomposition::{SeasonalIndexSet, TrendLine};
use crate::error::{Error, Result};
use crate::metrics::ErrorTriple;
use crate::regression::RegressionModel;
use crate::series::{TimeSeries, YearMonth};
use crate::smoothing::SmoothingParams;

/// Parameters of whichever model produced a forecast.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FittedModel {
    Decomposition { indices: SeasonalIndexSet, trend: TrendLine },
    Regression(RegressionModel),
    Smoothing(SmoothingParams),
    Arima(ArimaModel),
}

/// In-sample fitted values, point forecasts and the in-sample error triple.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ForecastResult {
    /// One entry per observation; `None` where the model has no one-step
    /// fitted value (initialisation or differencing warm-up).
    pub fitted: Vec<Option<f64>>,
    pub forecast_start: YearMonth,
    pub forecasts: Vec<f64>,
    pub errors: ErrorTriple,
    pub model: FittedModel,
}

impl ForecastResult {
    pub(crate) fn new(
        series: &TimeSeries,
        fitted: Vec<Option<f64>>,
        forecasts: Vec<f64>,
        model: FittedModel,
    ) -> Result<Self> {
        debug_assert_eq!(fitted.len(), series.len());
        let (actual, predicted): (Vec<f64>, Vec<f64>) = series
            .values()
            .iter()
            .zip(&fitted)
            .filter_map(|(&y, f)| f.map(|f| (y, f)))
            .unzip();
        if forecasts.iter().chain(&predicted).any(|v| !v.is_finite()) {
            return Err(Error::OptimizationDiverged);
        }
        let errors = ErrorTriple::compute(&actual, &predicted)?;
        Ok(Self { fitted, forecast_start: series.end().add_months(1), forecasts, errors, model })
    }

    /// `actual - fitted` wherever a fitted value exists.
    pub fn residuals(&self, series: &TimeSeries) -> Vec<Option<f64>> {
        series.values().iter().zip(&self.fitted).map(|(y, f)| f.map(|f| y - f)).collect()
    }

    pub fn forecast_month(&self, h: usize) -> YearMonth {
        self.forecast_start.add_months(h as i64)
    }
}

pub(crate) fn check_horizon(horizon: usize) -> Result<()> {
    if horizon == 0 {
        Err(Error::InvalidHorizon)
    } else {
        Ok(())
    }
}

pub(crate) fn check_period(period: usize) -> Result<()> {
    if period == 4 || period == 12 {
        Ok(())
    } else {
        Err(Error::InvalidPeriod(period))
    }
}
