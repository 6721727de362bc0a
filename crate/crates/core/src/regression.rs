//! Trend plus seasonal-dummy multiple regression.
//!
//! `Y_t = c0 + trend * t + sum_j beta_j * D_j(t)`, with `t = 1..n` and one
//! 0/1 dummy per season except season 1, which is the baseline. Seasons are
//! numbered 1..=period from the calendar: season 1 is calendar position 0
//! (January when `period = 12`).

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::forecast::{check_horizon, check_period, FittedModel, ForecastResult};
use crate::series::TimeSeries;

/// 1-based season of trend index `t` (also 1-based) for a series whose first
/// observation falls in `anchor_season`.
pub fn season_of(t: usize, period: usize, anchor_season: usize) -> usize {
    (anchor_season - 1 + t - 1) % period + 1
}

/// The `n × (period + 1)` design: ones, the trend index `1..=n`, then
/// indicators for seasons `2..=period`.
pub fn build_design_matrix(n: usize, period: usize, anchor_season: usize) -> Result<DMatrix<f64>> {
    check_period(period)?;
    if !(1..=period).contains(&anchor_season) {
        return Err(Error::InvalidPeriod(anchor_season));
    }
    if n < period + 2 {
        return Err(Error::TooFewObservations { needed: period + 2, got: n });
    }
    let mut x = DMatrix::zeros(n, period + 1);
    for row in 0..n {
        let t = row + 1;
        x[(row, 0)] = 1.0;
        x[(row, 1)] = t as f64;
        let season = season_of(t, period, anchor_season);
        if season > 1 {
            x[(row, season)] = 1.0;
        }
    }
    Ok(x)
}

#[derive(Debug, Clone, PartialEq)]
pub struct LeastSquaresFit {
    pub coefficients: Vec<f64>,
    pub residuals: Vec<f64>,
}

/// Least squares via Householder QR. Fails with `RankDeficient` when a
/// diagonal entry of `R` is negligible relative to the largest one.
pub fn fit_least_squares(x: &DMatrix<f64>, y: &[f64]) -> Result<LeastSquaresFit> {
    let (rows, cols) = x.shape();
    if rows != y.len() {
        return Err(Error::LengthMismatch { actual: y.len(), predicted: rows });
    }
    if rows < cols {
        return Err(Error::TooFewObservations { needed: cols, got: rows });
    }
    let qr = x.clone().qr();
    let r = qr.r();
    let max_diag = r.diagonal().iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let tol = 1e-10 * max_diag * rows.max(cols) as f64;
    if max_diag == 0.0 || r.diagonal().iter().any(|v| v.abs() <= tol) {
        return Err(Error::RankDeficient);
    }
    let yv = DVector::from_column_slice(y);
    let qty = qr.q().transpose() * &yv;
    let beta = r.solve_upper_triangular(&qty).ok_or(Error::RankDeficient)?;
    let residuals = (&yv - x * &beta).iter().copied().collect();
    Ok(LeastSquaresFit { coefficients: beta.iter().copied().collect(), residuals })
}

/// Fitted trend-and-dummy coefficients.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegressionModel {
    pub period: usize,
    pub intercept: f64,
    pub trend: f64,
    /// Coefficients for seasons `2..=period`.
    pub dummies: Vec<f64>,
}

impl RegressionModel {
    pub fn from_coefficients(period: usize, coefficients: &[f64]) -> Result<Self> {
        if coefficients.len() != period + 1 {
            return Err(Error::InvalidPeriod(period));
        }
        Ok(Self {
            period,
            intercept: coefficients[0],
            trend: coefficients[1],
            dummies: coefficients[2..].to_vec(),
        })
    }

    pub fn predict(&self, t: usize, season: usize) -> f64 {
        let dummy = if season > 1 { self.dummies[season - 2] } else { 0.0 };
        self.intercept + self.trend * t as f64 + dummy
    }
}

pub fn fit_regression(series: &TimeSeries, period: usize) -> Result<RegressionModel> {
    let anchor = series.start().season(period) + 1;
    let x = build_design_matrix(series.len(), period, anchor)?;
    let fit = fit_least_squares(&x, series.values())?;
    RegressionModel::from_coefficients(period, &fit.coefficients)
}

pub fn forecast_regression(series: &TimeSeries, period: usize, horizon: usize) -> Result<ForecastResult> {
    check_horizon(horizon)?;
    let model = fit_regression(series, period)?;
    let anchor = series.start().season(period) + 1;
    let n = series.len();
    let at = |t: usize| model.predict(t, season_of(t, period, anchor));
    let fitted = (1..=n).map(|t| Some(at(t))).collect();
    let forecasts = (n + 1..=n + horizon).map(at).collect();
    ForecastResult::new(series, fitted, forecasts, FittedModel::Regression(model))
}

/// `max_j |X_j' r| / (||X_j|| ||y||)`.
pub fn normalized_orthogonality(x: &DMatrix<f64>, y: &[f64], residuals: &[f64]) -> f64 {
    let y_norm = y.iter().map(|v| v * v).sum::<f64>().sqrt().max(f64::MIN_POSITIVE);
    x.column_iter()
        .map(|col| {
            let dot: f64 = col.iter().zip(residuals).map(|(a, b)| a * b).sum();
            dot.abs() / (col.norm().max(f64::MIN_POSITIVE) * y_norm)
        })
        .fold(0.0, f64::max)
}
