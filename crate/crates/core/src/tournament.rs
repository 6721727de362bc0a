//! The model tournament: run every registered approach on a training
//! window, rank them by in-sample error, validate a chosen approach on a
//! holdout span and compare training windows.

use std::cmp::Ordering;
use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use crate::arima::{forecast_arima, select_arima};
use crate::decomposition::{forecast_decomposition, Composition, IndexMethod};
use crate::error::{Error, Result};
use crate::forecast::ForecastResult;
use crate::metrics::{approximation_percentage_errors, mpe, ErrorTriple, PairedSeries};
use crate::regression::forecast_regression;
use crate::series::{MonthRange, TimeSeries, YearMonth};
use crate::smoothing::{optimize_smoothing_params, smoothing_forecast, Objective, SmoothingKind};

/// Bumped whenever the registry's rows or their dispatch change.
pub const REGISTRY_VERSION: &str = "1";

/// Ranking keys, most significant first.
pub const METRIC_PRIORITY: [&str; 4] = ["mape", "mad", "msd", "id"];

pub const TIE_BREAK_RULE: &str =
    "ascending MAPE, then MAD, then MSD, then lowest approach id; infeasible approaches last by id";

pub const ERROR_CONVENTION: &str = "tournament errors are in-sample one-step fitted errors; \
     MAPE/MPE in percent with MPE = 100*(actual-forecast)/actual; \
     approximation error = 100*(forecast-actual)/actual (negative = under-forecast); \
     seasonality 4 is a 4-observation cycle over monthly data; \
     ARIMA orders are searched with D fixed at 0";

/// What a registry row runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Method {
    Decomposition { period: usize, model: Composition, index_method: IndexMethod },
    Regression { period: usize },
    /// The period is carried as metadata only; single smoothing ignores it.
    SingleSmoothing { period: usize },
    /// The period is carried as metadata only.
    DoubleSmoothing { period: usize, trend: Composition },
    HoltWinters { period: usize, model: Composition },
    /// The seasonal period comes from [`TournamentConfig::arima_period`].
    Arima,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RegistryEntry {
    pub id: u8,
    pub description: &'static str,
    pub method: Method,
}

use Composition::{Additive, Multiplicative};
use IndexMethod::{CenteredMovingAverage as Cma, Standard};

const fn entry(id: u8, description: &'static str, method: Method) -> RegistryEntry {
    RegistryEntry { id, description, method }
}

/// The nineteen approaches.
pub static REGISTRY: [RegistryEntry; 19] = [
    entry(1, "Classical decomposition with multiplicative model with seasonality is 12",
        Method::Decomposition { period: 12, model: Multiplicative, index_method: Standard }),
    entry(2, "Classical decomposition with multiplicative model with seasonality is 4",
        Method::Decomposition { period: 4, model: Multiplicative, index_method: Standard }),
    entry(3, "Classical decomposition with additive model with seasonality is 12",
        Method::Decomposition { period: 12, model: Additive, index_method: Standard }),
    entry(4, "Classical decomposition with additive model with seasonality is 4",
        Method::Decomposition { period: 4, model: Additive, index_method: Standard }),
    entry(5, "Classical decomposition with centering moving averages with multiplicative model with seasonality is 12",
        Method::Decomposition { period: 12, model: Multiplicative, index_method: Cma }),
    entry(6, "Classical decomposition with centering moving averages with multiplicative model with seasonality is 4",
        Method::Decomposition { period: 4, model: Multiplicative, index_method: Cma }),
    entry(7, "Classical decomposition with centering moving averages with additive model with seasonality is 12",
        Method::Decomposition { period: 12, model: Additive, index_method: Cma }),
    entry(8, "Classical decomposition with centering moving averages with additive model with seasonality is 4",
        Method::Decomposition { period: 4, model: Additive, index_method: Cma }),
    entry(9, "Forecasting with regression equation with seasonality is 12", Method::Regression { period: 12 }),
    entry(10, "Forecasting with regression equation with seasonality is 4", Method::Regression { period: 4 }),
    entry(11, "Single exponential smoothing with seasonality is 12", Method::SingleSmoothing { period: 12 }),
    entry(12, "Single exponential smoothing with seasonality is 4", Method::SingleSmoothing { period: 4 }),
    entry(13, "Double exponential smoothing with seasonality is 12 with multiplicative model",
        Method::DoubleSmoothing { period: 12, trend: Multiplicative }),
    entry(14, "Double exponential smoothing with additive model with seasonality is 12",
        Method::DoubleSmoothing { period: 12, trend: Additive }),
    entry(15, "Double exponential smoothing with multiplicative model with seasonality is 4",
        Method::DoubleSmoothing { period: 4, trend: Multiplicative }),
    entry(16, "Double exponential smoothing with additive model with seasonality is 4",
        Method::DoubleSmoothing { period: 4, trend: Additive }),
    entry(17, "Holt Winter's model with ideal coefficients with seasonality is 12",
        Method::HoltWinters { period: 12, model: Multiplicative }),
    entry(18, "Holt Winter's model with ideal coefficients with seasonality is 4",
        Method::HoltWinters { period: 4, model: Multiplicative }),
    entry(19, "ARIMA models", Method::Arima),
];

/// A registry row number, 1 through 19.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct ApproachId(u8);

impl ApproachId {
    pub fn new(id: u8) -> Result<Self> {
        if (1..=19).contains(&id) {
            Ok(Self(id))
        } else {
            Err(Error::UnknownApproach(id))
        }
    }

    pub fn get(self) -> u8 {
        self.0
    }

    pub fn entry(self) -> &'static RegistryEntry {
        &REGISTRY[usize::from(self.0) - 1]
    }

    pub fn description(self) -> &'static str {
        self.entry().description
    }

    pub fn all() -> impl Iterator<Item = ApproachId> {
        (1..=19).map(ApproachId)
    }
}

impl fmt::Display for ApproachId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TournamentConfig {
    pub horizon: usize,
    /// Seasonal period used by the ARIMA row.
    pub arima_period: usize,
    pub objective: Objective,
    /// Run approaches on the rayon pool. Results do not depend on this.
    #[serde(skip)]
    pub parallel: bool,
}

impl Default for TournamentConfig {
    fn default() -> Self {
        Self { horizon: 12, arima_period: 12, objective: Objective::Mse, parallel: true }
    }
}

fn dispatch(id: ApproachId, series: &TimeSeries, horizon: usize, config: &TournamentConfig) -> Result<ForecastResult> {
    match id.entry().method {
        Method::Decomposition { period, model, index_method } => {
            forecast_decomposition(series, period, model, index_method, horizon)
        }
        Method::Regression { period } => forecast_regression(series, period, horizon),
        Method::SingleSmoothing { .. } => smoothed(SmoothingKind::Single, series, horizon, config),
        Method::DoubleSmoothing { trend, .. } => smoothed(SmoothingKind::Double { trend }, series, horizon, config),
        Method::HoltWinters { period, model } => {
            smoothed(SmoothingKind::HoltWinters { period, model }, series, horizon, config)
        }
        Method::Arima => {
            let selection = select_arima(series, config.arima_period)?;
            forecast_arima(series, &selection.model, horizon)
        }
    }
}

fn smoothed(kind: SmoothingKind, series: &TimeSeries, horizon: usize, config: &TournamentConfig) -> Result<ForecastResult> {
    let params = optimize_smoothing_params(kind, series, config.objective)?;
    smoothing_forecast(kind, series, params, horizon)
}

/// Runs one registry row. Any failure is reported as `ApproachInfeasible`.
pub fn run_approach(
    id: ApproachId,
    series: &TimeSeries,
    horizon: usize,
    config: &TournamentConfig,
) -> Result<ForecastResult> {
    dispatch(id, series, horizon, config)
        .map_err(|e| Error::ApproachInfeasible { id: id.get(), reason: e.to_string() })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum ApproachStatus {
    Fitted,
    Infeasible { reason: String },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ApproachOutcome {
    pub id: ApproachId,
    pub description: &'static str,
    #[serde(flatten)]
    pub status: ApproachStatus,
    pub errors: Option<ErrorTriple>,
    pub result: Option<ForecastResult>,
}

fn compare_triples(a: (ApproachId, &ErrorTriple), b: (ApproachId, &ErrorTriple)) -> Ordering {
    a.1.mape
        .total_cmp(&b.1.mape)
        .then(a.1.mad.total_cmp(&b.1.mad))
        .then(a.1.msd.total_cmp(&b.1.msd))
        .then(a.0.cmp(&b.0))
}

/// Orders approaches by the ranking keys; entries without an error triple
/// come last, by id.
pub fn rank(entries: &[(ApproachId, Option<ErrorTriple>)]) -> Vec<ApproachId> {
    let mut fitted: Vec<(ApproachId, &ErrorTriple)> =
        entries.iter().filter_map(|(id, e)| e.as_ref().map(|e| (*id, e))).collect();
    fitted.sort_by(|a, b| compare_triples(*a, *b));
    let mut failed: Vec<ApproachId> = entries.iter().filter(|(_, e)| e.is_none()).map(|(id, _)| *id).collect();
    failed.sort();
    fitted.into_iter().map(|(id, _)| id).chain(failed).collect()
}

/// The best-ranked approach among those with an error triple.
pub fn select_winner(entries: &[(ApproachId, Option<ErrorTriple>)]) -> Result<ApproachId> {
    entries
        .iter()
        .filter_map(|(id, e)| e.as_ref().map(|e| (*id, e)))
        .min_by(|a, b| compare_triples(*a, *b))
        .map(|(id, _)| id)
        .ok_or(Error::NoFeasibleApproach)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TournamentEcho {
    pub train: MonthRange,
    pub horizon: usize,
    pub arima_period: usize,
    pub objective: Objective,
    pub metric_priority: [&'static str; 4],
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TournamentReport {
    pub config: TournamentEcho,
    pub approaches: Vec<ApproachOutcome>,
    pub ranking: Vec<ApproachId>,
    pub winner: ApproachId,
}

impl TournamentReport {
    pub fn outcome(&self, id: ApproachId) -> &ApproachOutcome {
        &self.approaches[usize::from(id.get()) - 1]
    }

    pub fn winning_result(&self) -> &ForecastResult {
        self.outcome(self.winner).result.as_ref().expect("winner always has a fit")
    }
}

/// Runs all nineteen approaches on `series` and ranks them.
pub fn run_tournament(series: &TimeSeries, config: &TournamentConfig) -> Result<TournamentReport> {
    let run = |id: ApproachId| run_approach(id, series, config.horizon, config);
    let ids: Vec<ApproachId> = ApproachId::all().collect();
    let results: Vec<Result<ForecastResult>> =
        if config.parallel { ids.par_iter().map(|&id| run(id)).collect() } else { ids.iter().map(|&id| run(id)).collect() };

    let approaches: Vec<ApproachOutcome> = ids
        .iter()
        .zip(results)
        .map(|(&id, r)| match r {
            Ok(result) => ApproachOutcome {
                id,
                description: id.description(),
                status: ApproachStatus::Fitted,
                errors: Some(result.errors),
                result: Some(result),
            },
            Err(e) => ApproachOutcome {
                id,
                description: id.description(),
                status: ApproachStatus::Infeasible { reason: e.to_string() },
                errors: None,
                result: None,
            },
        })
        .collect();
    let triples: Vec<(ApproachId, Option<ErrorTriple>)> = approaches.iter().map(|o| (o.id, o.errors)).collect();
    let winner = select_winner(&triples)?;
    Ok(TournamentReport {
        config: TournamentEcho {
            train: series.span(),
            horizon: config.horizon,
            arima_period: config.arima_period,
            objective: config.objective,
            metric_priority: METRIC_PRIORITY,
        },
        ranking: rank(&triples),
        approaches,
        winner,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationRow {
    pub month: YearMonth,
    pub actual: f64,
    pub forecast: f64,
    pub approx_error_pct: f64,
}

/// Holdout comparison of forecasts against withheld actuals.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub approach: Option<ApproachId>,
    pub holdout: MonthRange,
    pub rows: Vec<ValidationRow>,
    /// Error triple over the holdout span.
    pub errors: ErrorTriple,
    pub mpe: f64,
}

impl ValidationReport {
    /// Scores `forecast` against `actual`, both starting at `start`.
    pub fn from_forecasts(
        approach: Option<ApproachId>,
        start: YearMonth,
        actual: &[f64],
        forecast: &[f64],
    ) -> Result<Self> {
        let pairs = PairedSeries::new(actual, forecast)?;
        let approx = approximation_percentage_errors(&pairs)?;
        let rows = actual
            .iter()
            .zip(forecast)
            .zip(approx)
            .enumerate()
            .map(|(h, ((&a, &f), e))| ValidationRow {
                month: start.add_months(h as i64),
                actual: a,
                forecast: f,
                approx_error_pct: e,
            })
            .collect();
        Ok(Self {
            approach,
            holdout: MonthRange::new(start, start.add_months(actual.len() as i64 - 1))?,
            rows,
            errors: ErrorTriple::from_pairs(&pairs)?,
            mpe: mpe(&pairs)?,
        })
    }
}

/// Minimum validation span.
pub const MIN_HOLDOUT: usize = 12;

/// Fits `approach` on observations up to `train_end` and scores its
/// forecasts on every later observation of `series`.
pub fn validate_holdout(
    series: &TimeSeries,
    train_end: YearMonth,
    approach: ApproachId,
    config: &TournamentConfig,
) -> Result<ValidationReport> {
    let available = train_end.months_until(series.end());
    if available < MIN_HOLDOUT as i64 {
        return Err(Error::HoldoutTooShort { needed: MIN_HOLDOUT, got: available.max(0) as usize });
    }
    // The fit only ever sees this truncated copy.
    let train = series.truncate_at(train_end)?;
    let holdout = &series.values()[train.len()..];
    let result = run_approach(approach, &train, holdout.len(), config)?;
    ValidationReport::from_forecasts(Some(approach), result.forecast_start, holdout, &result.forecasts)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WindowOutcome {
    pub window: MonthRange,
    pub tournament: TournamentReport,
    pub validation: ValidationReport,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WindowComparison {
    pub holdout: MonthRange,
    pub window_a: WindowOutcome,
    pub window_b: WindowOutcome,
}

fn run_window(
    series: &TimeSeries,
    window: MonthRange,
    holdout: MonthRange,
    config: &TournamentConfig,
) -> Result<WindowOutcome> {
    let train = series.window(window)?;
    let tournament = run_tournament(&train, config)?;
    let span = series.window(MonthRange::new(window.start, holdout.end)?)?;
    let validation = validate_holdout(&span, window.end, tournament.winner, config)?;
    Ok(WindowOutcome { window, tournament, validation })
}

/// Runs a tournament on each training window and validates each winner on
/// the shared holdout that follows them.
pub fn compare_windows(
    series: &TimeSeries,
    window_a: MonthRange,
    window_b: MonthRange,
    holdout: MonthRange,
    config: &TournamentConfig,
) -> Result<WindowComparison> {
    if window_a.end != window_b.end {
        return Err(Error::InvalidWindow(format!("windows end at {} and {}", window_a.end, window_b.end)));
    }
    if holdout.start != window_a.end.add_months(1) {
        return Err(Error::InvalidWindow(format!(
            "holdout must start at {}, got {}",
            window_a.end.add_months(1),
            holdout.start
        )));
    }
    Ok(WindowComparison {
        holdout,
        window_a: run_window(series, window_a, holdout, config)?,
        window_b: run_window(series, window_b, holdout, config)?,
    })
}
