//! Structured run reports, their human-readable table form and plot data.

use std::fmt::Write as _;
use std::io;

use serde::Serialize;
use tariffcast::tournament::{
    ApproachOutcome, ApproachStatus, ERROR_CONVENTION, METRIC_PRIORITY, REGISTRY_VERSION, TIE_BREAK_RULE,
};
use tariffcast::{ApproachId, ErrorTriple, FittedModel, MonthRange, TimeSeries, ValidationReport, YearMonth};

use crate::dataset::Tariff;
use crate::run::RunConfig;

fn d5(v: f64) -> String {
    format!("{v:.5}")
}

fn e5(v: f64) -> String {
    format!("{v:.5e}")
}

/// Five-decimal renderings of an error triple; MSD in scientific form.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TripleDisplay {
    pub mape: String,
    pub mad: String,
    pub msd: String,
}

impl From<&ErrorTriple> for TripleDisplay {
    fn from(e: &ErrorTriple) -> Self {
        Self { mape: d5(e.mape), mad: d5(e.mad), msd: e5(e.msd) }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ApproachRow {
    pub id: ApproachId,
    pub descriptor: &'static str,
    pub status: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    pub mape: Option<f64>,
    pub mad: Option<f64>,
    pub msd: Option<f64>,
    pub display: Option<TripleDisplay>,
}

impl From<&ApproachOutcome> for ApproachRow {
    fn from(o: &ApproachOutcome) -> Self {
        let (status, reason) = match &o.status {
            ApproachStatus::Fitted => ("fitted", None),
            ApproachStatus::Infeasible { reason } => ("infeasible", Some(reason.clone())),
        };
        Self {
            id: o.id,
            descriptor: o.description,
            status,
            reason,
            mape: o.errors.map(|e| e.mape),
            mad: o.errors.map(|e| e.mad),
            msd: o.errors.map(|e| e.msd),
            display: o.errors.as_ref().map(TripleDisplay::from),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Winner {
    pub id: ApproachId,
    pub descriptor: &'static str,
    pub errors: ErrorTriple,
    pub model: FittedModel,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ForecastPoint {
    pub month: YearMonth,
    pub value: f64,
    pub display: String,
}

impl ForecastPoint {
    pub fn new(month: YearMonth, value: f64) -> Self {
        Self { month, value, display: d5(value) }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationPoint {
    pub month: YearMonth,
    pub actual: f64,
    pub forecast: f64,
    pub approx_error_pct: f64,
    pub display: [String; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationSection {
    pub approach: Option<ApproachId>,
    pub holdout: MonthRange,
    pub rows: Vec<ValidationPoint>,
    pub mape: f64,
    pub mad: f64,
    pub msd: f64,
    pub mpe: f64,
    pub display: TripleDisplay,
}

impl From<&ValidationReport> for ValidationSection {
    fn from(v: &ValidationReport) -> Self {
        Self {
            approach: v.approach,
            holdout: v.holdout,
            rows: v
                .rows
                .iter()
                .map(|r| ValidationPoint {
                    month: r.month,
                    actual: r.actual,
                    forecast: r.forecast,
                    approx_error_pct: r.approx_error_pct,
                    display: [d5(r.actual), d5(r.forecast), format!("{:.2}", r.approx_error_pct)],
                })
                .collect(),
            mape: v.errors.mape,
            mad: v.errors.mad,
            msd: v.errors.msd,
            mpe: v.mpe,
            display: TripleDisplay::from(&v.errors),
        }
    }
}

/// One row of plot data; blanks where a column has no value.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlotRow {
    pub series: Tariff,
    pub month: YearMonth,
    pub actual: Option<f64>,
    pub fitted: Option<f64>,
    pub forecast: Option<f64>,
}

/// Actual and fitted values over the training span followed by the forecasts.
pub fn plot_rows(tariff: Tariff, train: &TimeSeries, fitted: &[Option<f64>], forecasts: &[f64]) -> Vec<PlotRow> {
    let in_sample = train.values().iter().zip(fitted).enumerate().map(|(t, (&y, &f))| PlotRow {
        series: tariff,
        month: train.month_at(t),
        actual: Some(y),
        fitted: f,
        forecast: None,
    });
    let ahead = forecasts.iter().enumerate().map(|(h, &v)| PlotRow {
        series: tariff,
        month: train.end().add_months(h as i64 + 1),
        actual: None,
        fitted: None,
        forecast: Some(v),
    });
    in_sample.chain(ahead).collect()
}

/// Results for one series (and, for window comparisons, one window).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeriesRun {
    pub series: Tariff,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window: Option<&'static str>,
    pub train: MonthRange,
    pub approaches: Vec<ApproachRow>,
    pub ranking: Vec<ApproachId>,
    pub winner: Winner,
    pub forecasts: Vec<ForecastPoint>,
    pub validation: Option<ValidationSection>,
    #[serde(skip)]
    pub plot: Vec<PlotRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub registry_version: &'static str,
    pub metric_priority: [&'static str; 4],
    pub tie_break_rule: &'static str,
    pub conventions: &'static str,
    pub config: RunConfig,
    pub runs: Vec<SeriesRun>,
}

impl Report {
    pub fn new(config: RunConfig, runs: Vec<SeriesRun>) -> Self {
        Self {
            registry_version: REGISTRY_VERSION,
            metric_priority: METRIC_PRIORITY,
            tie_break_rule: TIE_BREAK_RULE,
            conventions: ERROR_CONVENTION,
            config,
            runs,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_table(&self) -> String {
        let mut out = String::new();
        for run in &self.runs {
            let _ = write!(out, "series {}  train {}", run.series, run.train);
            if let Some(w) = run.window {
                let _ = write!(out, "  ({w})");
            }
            let _ = writeln!(out, "\nwinner {}: {}", run.winner.id, run.winner.descriptor);
            let _ = writeln!(out, "{:>4}  {:>9}  {:>9}  {:>12}  {:<10}  descriptor", "id", "MAPE", "MAD", "MSD", "status");
            for id in &run.ranking {
                let row = run.approaches.iter().find(|r| r.id == *id).expect("ranked rows are listed");
                match &row.display {
                    Some(d) => {
                        let _ = writeln!(
                            out,
                            "{:>4}  {:>9}  {:>9}  {:>12}  {:<10}  {}",
                            row.id, d.mape, d.mad, d.msd, row.status, row.descriptor
                        );
                    }
                    None => {
                        let _ = writeln!(
                            out,
                            "{:>4}  {:>9}  {:>9}  {:>12}  {:<10}  {} ({})",
                            row.id,
                            "-",
                            "-",
                            "-",
                            row.status,
                            row.descriptor,
                            row.reason.as_deref().unwrap_or("")
                        );
                    }
                }
            }
            let _ = writeln!(out, "forecasts");
            for p in &run.forecasts {
                let _ = writeln!(out, "  {}  {}", p.month, p.display);
            }
            if let Some(v) = &run.validation {
                let _ = writeln!(
                    out,
                    "validation on {}: MAPE {}  MAD {}  MSD {}",
                    v.holdout, v.display.mape, v.display.mad, v.display.msd
                );
                let _ = writeln!(out, "  {:<7}  {:>9}  {:>9}  {:>8}", "month", "actual", "forecast", "error %");
                for r in &v.rows {
                    let _ = writeln!(out, "  {:<7}  {:>9}  {:>9}  {:>8}", r.month, r.display[0], r.display[1], r.display[2]);
                }
            }
            out.push('\n');
        }
        out
    }

    pub fn has_plot(&self) -> bool {
        self.runs.iter().any(|r| !r.plot.is_empty())
    }

    pub fn write_plot<W: io::Write>(&self, writer: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        for run in &self.runs {
            for row in &run.plot {
                w.serialize(row)?;
            }
        }
        w.flush()?;
        Ok(())
    }
}
