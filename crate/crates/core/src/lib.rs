//! Forecasting monthly electricity tariff prices.
//!
//! The crate implements nineteen forecasting approaches (classical
//! decomposition, seasonal-dummy regression, single/double/Holt-Winters
//! exponential smoothing and seasonal ARIMA), the usual error measures, and
//! a tournament that ranks the approaches, validates the winner on a
//! holdout year and compares training windows.
//!
//! ```
//! use tariffcast::{run_tournament, TimeSeries, TournamentConfig, YearMonth};
//!
//! let prices: Vec<f64> = (0..48)
//!     .map(|t| (0.2 + 0.001 * t as f64) * (1.0 + 0.03 * ((t % 12) as f64 - 5.5) / 5.5))
//!     .collect();
//! let series = TimeSeries::new(YearMonth::new(2011, 1).unwrap(), prices).unwrap();
//! let report = run_tournament(&series, &TournamentConfig::default()).unwrap();
//! assert_eq!(report.ranking.len(), 19);
//! assert_eq!(report.winning_result().forecasts.len(), 12);
//! ```

pub mod arima;
pub mod decomposition;
mod error;
pub mod forecast;
pub mod metrics;
pub mod regression;
pub mod series;
pub mod smoothing;
pub mod tournament;

pub use error::{Error, Result};
pub use forecast::{FittedModel, ForecastResult};
pub use metrics::ErrorTriple;
pub use series::{Lag, MonthRange, TimeSeries, YearMonth};
pub use tournament::{
    compare_windows, run_approach, run_tournament, validate_holdout, ApproachId, TournamentConfig,
    TournamentReport, ValidationReport, WindowComparison,
};
