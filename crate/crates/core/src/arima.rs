//! Seasonal ARIMA by conditional sum of squares.
//!
//! The model for the differenced series `w_t` with `z_t = w_t - mean` is
//!
//! ```text
//! (1 - φ(B)) (1 - Φ(B^s)) z_t = (1 - θ(B)) (1 - Θ(B^s)) ε_t
//! ```
//!
//! with MA terms entering with a minus sign, so `Y_t = μ + ε_t - ω ε_{t-1}`
//! for an MA(1). A mean is estimated only when no differencing is applied;
//! a differenced model carries no drift.
//!
//! Residuals are computed from the first time index at which every AR lag
//! refers to an observed value; MA terms before that point use zero errors.
//! Coefficients are estimated by cyclic coordinate search on the CSS, with
//! the step halving from 0.1 down to 1e-6 and every coefficient kept in
//! (-0.99, 0.99) and inside the stationarity/invertibility region.

use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::forecast::{check_horizon, FittedModel, ForecastResult};
use crate::series::TimeSeries;

const COEF_BOUND: f64 = 0.99;
const START_STEP: f64 = 0.1;
const MIN_STEP: f64 = 1e-6;
const MAX_SWEEPS: usize = 20_000;

/// `(p, d, q)(P, D, Q)_s`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct ArimaOrder {
    pub p: usize,
    pub d: usize,
    pub q: usize,
    #[serde(rename = "P")]
    pub seasonal_p: usize,
    #[serde(rename = "D")]
    pub seasonal_d: usize,
    #[serde(rename = "Q")]
    pub seasonal_q: usize,
    pub s: usize,
}

impl ArimaOrder {
    pub fn new(
        (p, d, q): (usize, usize, usize),
        (seasonal_p, seasonal_d, seasonal_q): (usize, usize, usize),
        s: usize,
    ) -> Result<Self> {
        let order = Self { p, d, q, seasonal_p, seasonal_d, seasonal_q, s };
        if d + seasonal_d > 2 {
            return Err(Error::InvalidOrder(format!("{order}: d + D must not exceed 2")));
        }
        if order.has_seasonal_part() && s < 2 {
            return Err(Error::InvalidOrder(format!("{order}: seasonal period must be at least 2")));
        }
        Ok(order)
    }

    /// A model without seasonal terms; `s` is kept only for display.
    pub fn nonseasonal(p: usize, d: usize, q: usize) -> Self {
        Self { p, d, q, seasonal_p: 0, seasonal_d: 0, seasonal_q: 0, s: 1 }
    }

    fn has_seasonal_part(&self) -> bool {
        self.seasonal_p + self.seasonal_d + self.seasonal_q > 0
    }

    /// AR, MA, seasonal AR and seasonal MA coefficient count.
    pub fn coefficient_count(&self) -> usize {
        self.p + self.q + self.seasonal_p + self.seasonal_q
    }

    pub fn includes_mean(&self) -> bool {
        self.d + self.seasonal_d == 0
    }

    /// Coefficients plus the mean, when one is estimated.
    pub fn free_parameters(&self) -> usize {
        self.coefficient_count() + usize::from(self.includes_mean())
    }

    /// Observations lost to differencing.
    pub fn differencing_loss(&self) -> usize {
        self.d + self.s * self.seasonal_d
    }

    /// First differenced-series index with a full set of AR lags.
    pub fn conditioning_start(&self) -> usize {
        self.p + self.s * self.seasonal_p
    }

    fn difference_lags(&self) -> Vec<usize> {
        let mut lags = vec![1; self.d];
        lags.extend(std::iter::repeat_n(self.s, self.seasonal_d));
        lags
    }
}

impl fmt::Display for ArimaOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({},{},{})({},{},{})",
            self.p, self.d, self.q, self.seasonal_p, self.seasonal_d, self.seasonal_q
        )?;
        if self.has_seasonal_part() {
            write!(f, "_{}", self.s)?;
        }
        Ok(())
    }
}

/// A fitted model.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ArimaModel {
    pub order: ArimaOrder,
    pub ar: Vec<f64>,
    pub ma: Vec<f64>,
    pub seasonal_ar: Vec<f64>,
    pub seasonal_ma: Vec<f64>,
    /// Mean of the differenced series (zero when differenced).
    pub mean: f64,
    /// `mean * (1 - Σφ)(1 - ΣΦ)`.
    pub constant: f64,
    pub sigma2: f64,
    pub css: f64,
    /// Number of residuals entering the CSS.
    pub n_eff: usize,
}

impl ArimaModel {
    /// A model with given coefficients; `sigma2`, `css` and `n_eff` are left
    /// at zero until it is fitted or evaluated.
    pub fn with_coefficients(
        order: ArimaOrder,
        ar: Vec<f64>,
        ma: Vec<f64>,
        seasonal_ar: Vec<f64>,
        seasonal_ma: Vec<f64>,
        mean: f64,
    ) -> Result<Self> {
        if ar.len() != order.p
            || ma.len() != order.q
            || seasonal_ar.len() != order.seasonal_p
            || seasonal_ma.len() != order.seasonal_q
        {
            return Err(Error::InvalidOrder(format!("coefficient counts do not match {order}")));
        }
        let mut model = Self {
            order,
            ar,
            ma,
            seasonal_ar,
            seasonal_ma,
            mean,
            constant: 0.0,
            sigma2: 0.0,
            css: 0.0,
            n_eff: 0,
        };
        model.constant = model.mean
            * (1.0 - model.ar.iter().sum::<f64>())
            * (1.0 - model.seasonal_ar.iter().sum::<f64>());
        Ok(model)
    }

    /// Stationary AR parts and invertible MA parts.
    pub fn is_admissible(&self) -> bool {
        is_stationary(&self.ar)
            && is_stationary(&self.seasonal_ar)
            && is_stationary(&self.ma)
            && is_stationary(&self.seasonal_ma)
    }

    fn expanded(&self) -> Expanded {
        Expanded {
            ar: multiply_lag_polys(&self.ar, &self.seasonal_ar, self.order.s),
            ma: multiply_lag_polys(&self.ma, &self.seasonal_ma, self.order.s),
        }
    }

    fn unpack(order: ArimaOrder, params: &[f64], mean: f64) -> Result<Self> {
        let (ar, rest) = params.split_at(order.p);
        let (ma, rest) = rest.split_at(order.q);
        let (sar, sma) = rest.split_at(order.seasonal_p);
        Self::with_coefficients(order, ar.to_vec(), ma.to_vec(), sar.to_vec(), sma.to_vec(), mean)
    }
}

/// Whether all roots of `1 - c_1 z - ... - c_k z^k` lie outside the unit
/// circle, by the Schur-Cohn step-down recursion: the polynomial qualifies
/// iff every reflection coefficient has modulus below one.
pub fn is_stationary(coefs: &[f64]) -> bool {
    let mut a = coefs.to_vec();
    while a.last() == Some(&0.0) {
        a.pop();
    }
    for k in (1..=a.len()).rev() {
        let r = a[k - 1];
        if !(r.abs() < 1.0) {
            return false;
        }
        let denom = 1.0 - r * r;
        a = (0..k - 1).map(|i| (a[i] + r * a[k - 2 - i]) / denom).collect();
    }
    true
}

/// Lag coefficients `c_k` of `(1 - Σ a_i B^i)(1 - Σ b_j B^{sj}) = 1 - Σ c_k B^k`.
fn multiply_lag_polys(nonseasonal: &[f64], seasonal: &[f64], s: usize) -> Vec<f64> {
    let len = nonseasonal.len() + s * seasonal.len();
    let mut left = vec![0.0; len + 1];
    left[0] = 1.0;
    for (i, a) in nonseasonal.iter().enumerate() {
        left[i + 1] = -a;
    }
    let mut right = vec![0.0; s * seasonal.len() + 1];
    right[0] = 1.0;
    for (j, b) in seasonal.iter().enumerate() {
        right[s * (j + 1)] = -b;
    }
    let mut product = vec![0.0; len + 1];
    for (i, l) in left.iter().enumerate().take(nonseasonal.len() + 1) {
        for (j, r) in right.iter().enumerate() {
            if *l != 0.0 && *r != 0.0 {
                product[i + j] += l * r;
            }
        }
    }
    product[1..].iter().map(|c| -c).collect()
}

struct Expanded {
    ar: Vec<f64>,
    ma: Vec<f64>,
}

/// Successive differencing stages, the original series first.
fn difference_stages(y: &[f64], order: &ArimaOrder) -> Vec<Vec<f64>> {
    let mut stages = vec![y.to_vec()];
    for lag in order.difference_lags() {
        let last = stages.last().unwrap();
        let next = if last.len() > lag { (lag..last.len()).map(|t| last[t] - last[t - lag]).collect() } else { Vec::new() };
        stages.push(next);
    }
    stages
}

/// Residuals over the whole differenced series; entries before `start` are
/// zero and excluded from the sum of squares.
fn residual_path(w: &[f64], mean: f64, poly: &Expanded, start: usize) -> Vec<f64> {
    let mut eps = vec![0.0; w.len()];
    for t in start..w.len() {
        let mut e = w[t] - mean;
        for (k, a) in poly.ar.iter().enumerate() {
            e -= a * (w[t - k - 1] - mean);
        }
        for (k, m) in poly.ma.iter().enumerate() {
            if t > k {
                e += m * eps[t - k - 1];
            }
        }
        eps[t] = e;
    }
    eps
}

fn css(w: &[f64], mean: f64, poly: &Expanded, start: usize) -> f64 {
    residual_path(w, mean, poly, start)[start..].iter().map(|e| e * e).sum()
}

fn required_length(order: &ArimaOrder) -> usize {
    let by_coefs = 3 * order.coefficient_count() + 6;
    let by_lags = order.conditioning_start() + order.free_parameters() + 2;
    by_coefs.max(by_lags)
}

fn differenced(series: &TimeSeries, order: &ArimaOrder) -> Result<Vec<Vec<f64>>> {
    let stages = difference_stages(series.values(), order);
    let w_len = stages.last().unwrap().len();
    let needed = required_length(order);
    if w_len < needed {
        return Err(Error::SeriesTooShort { needed: needed + order.differencing_loss(), got: series.len() });
    }
    Ok(stages)
}

/// CSS residuals `ε_t` for every differenced index from the conditioning
/// start onward.
pub fn css_residuals(series: &TimeSeries, model: &ArimaModel) -> Result<Vec<f64>> {
    if !model.is_admissible() {
        return Err(Error::NonStationaryParams);
    }
    let order = &model.order;
    let stages = difference_stages(series.values(), order);
    let w = stages.last().unwrap();
    let start = order.conditioning_start();
    if w.len() <= start {
        return Err(Error::SeriesTooShort { needed: start + 1 + order.differencing_loss(), got: series.len() });
    }
    Ok(residual_path(w, model.mean, &model.expanded(), start)[start..].to_vec())
}

/// Conditional-sum-of-squares estimate from a zero-coefficient start.
pub fn fit_arima(series: &TimeSeries, order: ArimaOrder) -> Result<ArimaModel> {
    let stages = differenced(series, &order)?;
    let w = stages.last().unwrap();
    let mean = if order.includes_mean() { w.iter().sum::<f64>() / w.len() as f64 } else { 0.0 };
    let start = order.conditioning_start();
    let k = order.coefficient_count();

    let loss = |params: &[f64]| -> f64 {
        let Ok(model) = ArimaModel::unpack(order, params, mean) else { return f64::INFINITY };
        if !model.is_admissible() {
            return f64::INFINITY;
        }
        css(w, mean, &model.expanded(), start)
    };

    let (params, best) = coordinate_search(&vec![0.0; k], loss);
    if !best.is_finite() {
        return Err(Error::OptimizationDiverged);
    }
    let mut model = ArimaModel::unpack(order, &params, mean)?;
    model.n_eff = w.len() - start;
    model.css = best;
    model.sigma2 = best / model.n_eff as f64;
    Ok(model)
}

/// Cyclic coordinate search with a shrinking step, bounded to the
/// coefficient box, with Hooke-Jeeves pattern moves: after a successful
/// sweep the search jumps along the sweep's net displacement and explores
/// from there. Only strict improvements are accepted.
fn coordinate_search(start: &[f64], loss: impl Fn(&[f64]) -> f64) -> (Vec<f64>, f64) {
    let mut base = start.to_vec();
    let mut best = loss(&base);
    if base.is_empty() || !best.is_finite() {
        return (base, best);
    }
    let mut step = START_STEP;
    let mut iterations = 0;
    while step >= MIN_STEP && iterations < MAX_SWEEPS {
        iterations += 1;
        let (mut moved, mut moved_loss) = explore(&base, best, step, &loss);
        if moved_loss >= best {
            step *= 0.5;
            continue;
        }
        loop {
            iterations += 1;
            let pattern: Vec<f64> = moved
                .iter()
                .zip(&base)
                .map(|(m, b)| (2.0 * m - b).clamp(-COEF_BOUND, COEF_BOUND))
                .collect();
            base = moved;
            best = moved_loss;
            let pattern_loss = loss(&pattern);
            let (next, next_loss) = explore(&pattern, pattern_loss, step, &loss);
            if next_loss < best && iterations < MAX_SWEEPS {
                moved = next;
                moved_loss = next_loss;
            } else {
                break;
            }
        }
    }
    (base, best)
}

/// One sweep of ± `step` moves along each coordinate in turn.
fn explore(from: &[f64], from_loss: f64, step: f64, loss: &impl Fn(&[f64]) -> f64) -> (Vec<f64>, f64) {
    let mut x = from.to_vec();
    let mut current = from_loss;
    for i in 0..x.len() {
        let old = x[i];
        for dir in [1.0, -1.0] {
            let candidate = (old + dir * step).clamp(-COEF_BOUND, COEF_BOUND);
            if candidate == old {
                continue;
            }
            x[i] = candidate;
            let value = loss(&x);
            if value < current {
                current = value;
                break;
            }
            x[i] = old;
        }
    }
    (x, current)
}

/// Akaike criterion `n_eff ln(sigma2) + 2 k` with `k` free parameters.
pub fn aic(model: &ArimaModel) -> f64 {
    model.n_eff as f64 * model.sigma2.ln() + 2.0 * model.order.free_parameters() as f64
}

/// The selection grid: p, q in {0,1,2}, d in {0,1}, P, Q in {0,1}, D = 0.
pub fn candidate_orders(s: usize) -> Vec<ArimaOrder> {
    let mut out = Vec::with_capacity(72);
    for p in 0..=2 {
        for d in 0..=1 {
            for q in 0..=2 {
                for seasonal_p in 0..=1 {
                    for seasonal_q in 0..=1 {
                        out.push(ArimaOrder { p, d, q, seasonal_p, seasonal_d: 0, seasonal_q, s });
                    }
                }
            }
        }
    }
    out
}

/// Outcome of fitting one grid candidate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CandidateFit {
    pub order: ArimaOrder,
    pub aic: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ArimaSelection {
    pub model: ArimaModel,
    pub candidates: Vec<CandidateFit>,
}

/// Fits every grid candidate (concurrently) and keeps the minimum AIC;
/// ties go to fewer coefficients, then to the earlier order in
/// lexicographic `(p, d, q, P, D, Q)` order.
pub fn select_arima(series: &TimeSeries, s: usize) -> Result<ArimaSelection> {
    if s < 2 {
        return Err(Error::InvalidOrder(format!("seasonal period {s}")));
    }
    if series.len() < 3 * s {
        return Err(Error::SeriesTooShort { needed: 3 * s, got: series.len() });
    }
    let orders = candidate_orders(s);
    let fits: Vec<Option<ArimaModel>> = orders
        .par_iter()
        .map(|&o| fit_arima(series, o).ok().filter(|m| !aic(m).is_nan()))
        .collect();
    let candidates =
        orders.iter().zip(&fits).map(|(&order, m)| CandidateFit { order, aic: m.as_ref().map(aic) }).collect();
    let best = fits.into_iter().flatten().min_by(|a, b| {
        aic(a)
            .total_cmp(&aic(b))
            .then(a.order.coefficient_count().cmp(&b.order.coefficient_count()))
            .then(a.order.cmp(&b.order))
    });
    best.map(|model| ArimaSelection { model, candidates }).ok_or(Error::AllFitsFailed)
}

pub fn select_arima_order(series: &TimeSeries, s: usize) -> Result<ArimaOrder> {
    select_arima(series, s).map(|sel| sel.model.order)
}

/// Iterates the ARMA recursion with future errors at zero and integrates
/// the differencing back. Fitted values are `Y_t - ε_t`.
pub fn forecast_arima(series: &TimeSeries, model: &ArimaModel, horizon: usize) -> Result<ForecastResult> {
    check_horizon(horizon)?;
    if !model.is_admissible() {
        return Err(Error::NonStationaryParams);
    }
    let order = &model.order;
    let stages = difference_stages(series.values(), order);
    let w = stages.last().unwrap();
    let start = order.conditioning_start();
    if w.len() <= start {
        return Err(Error::SeriesTooShort { needed: start + 1 + order.differencing_loss(), got: series.len() });
    }
    let poly = model.expanded();
    let mut eps = residual_path(w, model.mean, &poly, start);
    let mut z: Vec<f64> = w.iter().map(|v| v - model.mean).collect();
    let n_w = z.len();
    for t in n_w..n_w + horizon {
        let mut next = 0.0;
        for (k, a) in poly.ar.iter().enumerate() {
            next += a * z[t - k - 1];
        }
        for (k, m) in poly.ma.iter().enumerate() {
            if t > k {
                next -= m * eps[t - k - 1];
            }
        }
        z.push(next);
        eps.push(0.0);
    }
    let mut ahead: Vec<f64> = z[n_w..].iter().map(|v| v + model.mean).collect();

    let lags = order.difference_lags();
    for (stage, &lag) in stages.iter().zip(&lags).rev() {
        let mut extended = stage.clone();
        for h in 0..horizon {
            let value = ahead[h] + extended[stage.len() + h - lag];
            extended.push(value);
        }
        ahead = extended.split_off(stage.len());
    }

    let offset = order.differencing_loss();
    let y = series.values();
    let mut fitted = vec![None; y.len()];
    for j in start..n_w {
        fitted[offset + j] = Some(y[offset + j] - eps[j]);
    }
    ForecastResult::new(series, fitted, ahead, FittedModel::Arima(model.clone()))
}
