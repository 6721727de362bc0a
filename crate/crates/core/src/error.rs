use thiserror::Error;

/// Errors returned by this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A series was constructed from invalid data.
    #[error("invalid series: {0}")]
    InvalidSeries(String),
    /// A differencing lag was not shorter than the series.
    #[error("lag {lag} is too large for a series of length {len}")]
    LagTooLarge { lag: usize, len: usize },
    /// Autocorrelation is undefined for a series with zero variance.
    #[error("series is constant; autocorrelation is undefined")]
    ConstantSeries,
    /// Not enough observations for the requested operation.
    #[error("series too short: need at least {needed} observations, got {got}")]
    SeriesTooShort { needed: usize, got: usize },
    /// A seasonal period other than the supported cycle lengths.
    #[error("unsupported seasonal period {0}")]
    InvalidPeriod(usize),
    /// Forecast horizons must be at least one step.
    #[error("forecast horizon must be at least 1")]
    InvalidHorizon,
    /// A metric was asked to summarise zero pairs.
    #[error("empty input")]
    EmptyInput,
    /// Actual and predicted sequences differ in length.
    #[error("length mismatch: {actual} actual values vs {predicted} predicted values")]
    LengthMismatch { actual: usize, predicted: usize },
    /// A percentage error needs a nonzero actual value.
    #[error("actual value at index {index} is zero")]
    ZeroActual { index: usize },
    /// Multiplicative models need strictly positive data.
    #[error("non-positive value {value} at index {index}")]
    NonPositiveValue { index: usize, value: f64 },
    /// A regression design has fewer rows than it needs.
    #[error("too few observations: need at least {needed}, got {got}")]
    TooFewObservations { needed: usize, got: usize },
    /// Columns of a design matrix are linearly dependent.
    #[error("design matrix is rank deficient")]
    RankDeficient,
    /// A smoothing constant lies outside its admissible range.
    #[error("smoothing parameter {name} = {value} is out of range")]
    BadParams { name: &'static str, value: f64 },
    /// An invalid ARIMA order.
    #[error("invalid ARIMA order: {0}")]
    InvalidOrder(String),
    /// ARIMA coefficients violate stationarity or invertibility.
    #[error("coefficients are not stationary/invertible")]
    NonStationaryParams,
    /// The CSS loss became non-finite during estimation.
    #[error("optimization diverged")]
    OptimizationDiverged,
    /// Every candidate order in the selection grid failed to fit.
    #[error("no ARIMA candidate could be fitted")]
    AllFitsFailed,
    /// An approach could not be run on the given series.
    #[error("approach {id} infeasible: {reason}")]
    ApproachInfeasible { id: u8, reason: String },
    /// Approach ids run from 1 to 19.
    #[error("unknown approach id {0}")]
    UnknownApproach(u8),
    /// No approach in the registry produced a fit.
    #[error("no feasible approach")]
    NoFeasibleApproach,
    /// The validation span is shorter than a year.
    #[error("holdout too short: need at least {needed} observations after the training window, got {got}")]
    HoldoutTooShort { needed: usize, got: usize },
    /// A month range does not fit the series or the workflow.
    #[error("invalid window: {0}")]
    InvalidWindow(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
