//! The four workflows, driven by a resolved [`RunConfig`].

use serde::{Serialize, Serializer};
use tariffcast::tournament::{ApproachOutcome, ApproachStatus};
use tariffcast::{
    compare_windows, run_approach, run_tournament, validate_holdout, ApproachId, ForecastResult, MonthRange,
    TimeSeries, TournamentConfig, TournamentReport,
};
use thiserror::Error;

use crate::dataset::{IngestError, Tariff, TariffDataset};
use crate::report::{plot_rows, ApproachRow, ForecastPoint, Report, SeriesRun, ValidationSection, Winner};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Forecast,
    Tournament,
    Validate,
    CompareWindows,
}

/// Either one registry row or the whole tournament.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ApproachChoice {
    All,
    One(ApproachId),
}

impl Serialize for ApproachChoice {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            ApproachChoice::All => s.serialize_str("all"),
            ApproachChoice::One(id) => s.serialize_u8(id.get()),
        }
    }
}

/// Everything a run depends on besides the input data; echoed in reports.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: Command,
    pub input: String,
    pub series: Vec<Tariff>,
    pub train: Option<MonthRange>,
    pub holdout: Option<MonthRange>,
    pub window_a: Option<MonthRange>,
    pub window_b: Option<MonthRange>,
    pub horizon: usize,
    pub approach: ApproachChoice,
    pub tournament: TournamentConfig,
}

#[derive(Debug, Error)]
pub enum RunError {
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error("{series}: {source}")]
    Model { series: Tariff, source: tariffcast::Error },
    #[error("{0}")]
    Output(String),
}

impl RunError {
    pub fn exit_code(&self) -> u8 {
        match self {
            RunError::Config(_) | RunError::Output(_) => 2,
            RunError::Ingest(_) => 3,
            RunError::Model { source, .. } => match source {
                tariffcast::Error::NoFeasibleApproach => 4,
                tariffcast::Error::InvalidWindow(_)
                | tariffcast::Error::HoldoutTooShort { .. }
                | tariffcast::Error::UnknownApproach(_)
                | tariffcast::Error::InvalidHorizon => 2,
                _ => 3,
            },
        }
    }

    pub fn kind(&self) -> &'static str {
        match self.exit_code() {
            2 => "config",
            3 => "data",
            _ => "no_feasible_approach",
        }
    }

    /// Machine-readable form written to stderr.
    pub fn to_json(&self) -> serde_json::Value {
        let mut error = serde_json::json!({
            "kind": self.kind(),
            "exit_code": self.exit_code(),
            "message": self.to_string(),
        });
        match self {
            RunError::Ingest(e) => {
                error["code"] = e.code().into();
                match e {
                    IngestError::Parse { row, column, .. } | IngestError::NonPositivePrice { row, column, .. } => {
                        error["row"] = (*row).into();
                        error["column"] = column.as_str().into();
                    }
                    IngestError::GapInCalendar { row, missing } => {
                        error["row"] = (*row).into();
                        error["missing"] = missing.to_string().into();
                    }
                    IngestError::OutOfOrder { row, .. } => error["row"] = (*row).into(),
                    IngestError::Io { .. } | IngestError::TooFewRows { .. } => {}
                }
            }
            RunError::Model { series, .. } => error["series"] = series.name().into(),
            RunError::Config(_) | RunError::Output(_) => {}
        }
        serde_json::json!({ "error": error })
    }
}

fn within(dataset: &TariffDataset, flag: &str, range: MonthRange) -> Result<(), RunError> {
    if dataset.span().contains_range(&range) {
        Ok(())
    } else {
        Err(RunError::Config(format!("--{flag} {range} lies outside the data ({})", dataset.span())))
    }
}

fn follows(holdout: MonthRange, train_end: tariffcast::YearMonth) -> Result<(), RunError> {
    if holdout.start == train_end.add_months(1) {
        Ok(())
    } else {
        Err(RunError::Config(format!("--holdout must start at {}, got {}", train_end.add_months(1), holdout.start)))
    }
}

fn required(range: Option<MonthRange>, flag: &str) -> Result<MonthRange, RunError> {
    range.ok_or_else(|| RunError::Config(format!("--{flag} is required")))
}

fn rows_of(outcomes: &[ApproachOutcome]) -> Vec<ApproachRow> {
    outcomes.iter().map(ApproachRow::from).collect()
}

fn winner(id: ApproachId, result: &ForecastResult) -> Winner {
    Winner { id, descriptor: id.description(), errors: result.errors, model: result.model.clone() }
}

fn forecast_points(result: &ForecastResult) -> Vec<ForecastPoint> {
    result.forecasts.iter().enumerate().map(|(h, &v)| ForecastPoint::new(result.forecast_month(h), v)).collect()
}

/// A single registry row presented as a one-entry tournament.
fn single(id: ApproachId, series: &TimeSeries, horizon: usize, config: &TournamentConfig, tariff: Tariff) -> Result<(Vec<ApproachRow>, ForecastResult), RunError> {
    let result = run_approach(id, series, horizon, config).map_err(|source| RunError::Model { series: tariff, source })?;
    let outcome = ApproachOutcome {
        id,
        description: id.description(),
        status: ApproachStatus::Fitted,
        errors: Some(result.errors),
        result: None,
    };
    Ok((vec![ApproachRow::from(&outcome)], result))
}

fn tournament(series: &TimeSeries, config: &TournamentConfig, tariff: Tariff) -> Result<TournamentReport, RunError> {
    run_tournament(series, config).map_err(|source| RunError::Model { series: tariff, source })
}

fn tournament_run(tariff: Tariff, train: &TimeSeries, report: &TournamentReport, window: Option<&'static str>) -> SeriesRun {
    let result = report.winning_result();
    SeriesRun {
        series: tariff,
        window,
        train: train.span(),
        approaches: rows_of(&report.approaches),
        ranking: report.ranking.clone(),
        winner: winner(report.winner, result),
        forecasts: forecast_points(result),
        validation: None,
        plot: Vec::new(),
    }
}

pub fn execute(config: &RunConfig, dataset: &TariffDataset) -> Result<Report, RunError> {
    let tc = &config.tournament;
    let mut runs = Vec::new();
    for &tariff in &config.series {
        let full = dataset
            .series(tariff)
            .ok_or_else(|| RunError::Config(format!("series {tariff} is not in the input")))?;
        let model_err = |source| RunError::Model { series: tariff, source };
        match config.command {
            Command::Tournament | Command::Forecast => {
                let train_range = config.train.unwrap_or(dataset.span());
                within(dataset, "train", train_range)?;
                let train = full.window(train_range).map_err(model_err)?;
                let (mut run, fitted) = match config.approach {
                    ApproachChoice::All => {
                        let report = tournament(&train, tc, tariff)?;
                        let fitted = report.winning_result().fitted.clone();
                        (tournament_run(tariff, &train, &report, None), fitted)
                    }
                    ApproachChoice::One(id) => {
                        let (approaches, result) = single(id, &train, config.horizon, tc, tariff)?;
                        let run = SeriesRun {
                            series: tariff,
                            window: None,
                            train: train.span(),
                            approaches,
                            ranking: vec![id],
                            winner: winner(id, &result),
                            forecasts: forecast_points(&result),
                            validation: None,
                            plot: Vec::new(),
                        };
                        (run, result.fitted)
                    }
                };
                if config.command == Command::Forecast {
                    let values: Vec<f64> = run.forecasts.iter().map(|p| p.value).collect();
                    run.plot = plot_rows(tariff, &train, &fitted, &values);
                }
                runs.push(run);
            }
            Command::Validate => {
                let train_range = required(config.train, "train")?;
                let holdout = match config.holdout {
                    Some(h) => h,
                    None => MonthRange::new(train_range.end.add_months(1), dataset.span().end)
                        .map_err(|_| RunError::Config(format!("no data after --train {train_range}")))?,
                };
                follows(holdout, train_range.end)?;
                within(dataset, "train", train_range)?;
                within(dataset, "holdout", holdout)?;
                let span = full.window(MonthRange::new(train_range.start, holdout.end).map_err(model_err)?).map_err(model_err)?;
                let train = span.truncate_at(train_range.end).map_err(model_err)?;
                let (approaches, ranking, id) = match config.approach {
                    ApproachChoice::All => {
                        let report = tournament(&train, tc, tariff)?;
                        (rows_of(&report.approaches), report.ranking.clone(), report.winner)
                    }
                    ApproachChoice::One(id) => (single(id, &train, holdout.len(), tc, tariff)?.0, vec![id], id),
                };
                let validation = validate_holdout(&span, train_range.end, id, tc).map_err(model_err)?;
                let fit = run_approach(id, &train, holdout.len(), tc).map_err(model_err)?;
                runs.push(SeriesRun {
                    series: tariff,
                    window: None,
                    train: train.span(),
                    approaches,
                    ranking,
                    winner: winner(id, &fit),
                    forecasts: forecast_points(&fit),
                    validation: Some(ValidationSection::from(&validation)),
                    plot: Vec::new(),
                });
            }
            Command::CompareWindows => {
                let a = required(config.window_a, "window-a")?;
                let b = required(config.window_b, "window-b")?;
                let holdout = required(config.holdout, "holdout")?;
                if a.end != b.end {
                    return Err(RunError::Config(format!("--window-a ends at {} but --window-b ends at {}", a.end, b.end)));
                }
                follows(holdout, a.end)?;
                for (flag, r) in [("window-a", a), ("window-b", b), ("holdout", holdout)] {
                    within(dataset, flag, r)?;
                }
                let cmp = compare_windows(&full, a, b, holdout, tc).map_err(model_err)?;
                for (label, outcome) in [("window_a", &cmp.window_a), ("window_b", &cmp.window_b)] {
                    let train = full.window(outcome.window).map_err(model_err)?;
                    let mut run = tournament_run(tariff, &train, &outcome.tournament, Some(label));
                    run.forecasts = outcome.validation.rows.iter().map(|r| ForecastPoint::new(r.month, r.forecast)).collect();
                    run.validation = Some(ValidationSection::from(&outcome.validation));
                    runs.push(run);
                }
            }
        }
    }
    Ok(Report::new(config.clone(), runs))
}
