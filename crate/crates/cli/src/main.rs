use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use tariffcast::smoothing::Objective;
use tariffcast::{ApproachId, MonthRange, TournamentConfig};
use tariffcast_cli::dataset::{Tariff, TariffDataset};
use tariffcast_cli::report::Report;
use tariffcast_cli::run::{execute, ApproachChoice, Command, RunConfig, RunError};

#[derive(Parser, Debug)]
#[command(name = "tariffcast", version, about = "Forecast monthly electricity tariff prices")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Forecast with one approach or the tournament winner
    Forecast {
        #[command(flatten)]
        common: Common,
        /// Training months, START:END; defaults to the whole file
        #[arg(long)]
        train: Option<MonthRange>,
        #[arg(long, default_value_t = 12, value_parser = clap::value_parser!(u16).range(1..))]
        horizon: u16,
        /// Registry row 1-19, or "all" for the tournament winner
        #[arg(long, default_value = "all", value_parser = parse_approach)]
        approach: ApproachChoice,
    },
    /// Rank all nineteen approaches on a training window
    Tournament {
        #[command(flatten)]
        common: Common,
        /// Training months, START:END; defaults to the whole file
        #[arg(long)]
        train: Option<MonthRange>,
        #[arg(long, default_value_t = 12, value_parser = clap::value_parser!(u16).range(1..))]
        horizon: u16,
    },
    /// Fit on --train and score the forecasts over --holdout
    Validate {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        train: MonthRange,
        /// Defaults to every month after --train
        #[arg(long)]
        holdout: Option<MonthRange>,
        /// Registry row 1-19, or "all" for the tournament winner
        #[arg(long, default_value = "all", value_parser = parse_approach)]
        approach: ApproachChoice,
    },
    /// Run and validate tournaments on two training windows that end together
    CompareWindows {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        window_a: MonthRange,
        #[arg(long)]
        window_b: MonthRange,
        #[arg(long)]
        holdout: MonthRange,
    },
}

#[derive(Args, Debug)]
struct Common {
    /// CSV with a date column and price columns
    #[arg(long)]
    input: PathBuf,
    /// Comma-separated series names; defaults to every price column
    #[arg(long, value_delimiter = ',')]
    series: Vec<Tariff>,
    /// Seasonal period for the ARIMA row
    #[arg(long, default_value_t = 12, value_parser = parse_seasonality)]
    seasonality: usize,
    /// Report path; stdout when absent. Forecasts also write plot data to
    /// the same path with a .plot.csv extension.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Table,
}

fn parse_approach(s: &str) -> Result<ApproachChoice, String> {
    if s.eq_ignore_ascii_case("all") {
        return Ok(ApproachChoice::All);
    }
    let n: u8 = s.parse().map_err(|_| format!("{s:?} is not an approach id or \"all\""))?;
    ApproachId::new(n).map(ApproachChoice::One).map_err(|e| e.to_string())
}

fn parse_seasonality(s: &str) -> Result<usize, String> {
    match s {
        "4" => Ok(4),
        "12" => Ok(12),
        _ => Err(format!("seasonality must be 4 or 12, got {s:?}")),
    }
}

struct Resolved {
    config: RunConfig,
    input: PathBuf,
    out: Option<PathBuf>,
    format: Format,
}

fn resolve(cli: Cli) -> Resolved {
    let (command, common, train, holdout, window_a, window_b, horizon, approach) = match cli.command {
        Cmd::Forecast { common, train, horizon, approach } => {
            (Command::Forecast, common, train, None, None, None, usize::from(horizon), approach)
        }
        Cmd::Tournament { common, train, horizon } => {
            (Command::Tournament, common, train, None, None, None, usize::from(horizon), ApproachChoice::All)
        }
        Cmd::Validate { common, train, holdout, approach } => {
            let horizon = holdout.map_or(12, |h| h.len());
            (Command::Validate, common, Some(train), holdout, None, None, horizon, approach)
        }
        Cmd::CompareWindows { common, window_a, window_b, holdout } => (
            Command::CompareWindows,
            common,
            None,
            Some(holdout),
            Some(window_a),
            Some(window_b),
            holdout.len(),
            ApproachChoice::All,
        ),
    };
    let tournament = TournamentConfig {
        horizon,
        arima_period: common.seasonality,
        objective: Objective::Mse,
        parallel: true,
    };
    Resolved {
        config: RunConfig {
            command,
            input: common.input.display().to_string(),
            series: common.series,
            train,
            holdout,
            window_a,
            window_b,
            horizon,
            approach,
            tournament,
        },
        input: common.input,
        out: common.out,
        format: common.format,
    }
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), RunError> {
    fs::write(path, bytes).map_err(|e| RunError::Output(format!("cannot write {}: {e}", path.display())))
}

fn plot_path(out: &Path) -> PathBuf {
    out.with_extension("plot.csv")
}

fn run(mut resolved: Resolved) -> Result<(), RunError> {
    let dataset = TariffDataset::read(&resolved.input)?;
    if resolved.config.series.is_empty() {
        resolved.config.series = dataset.tariffs();
    }
    let report: Report = execute(&resolved.config, &dataset)?;
    let text = match resolved.format {
        Format::Json => report.to_json(),
        Format::Table => report.to_table(),
    };
    match &resolved.out {
        Some(path) => {
            write_file(path, text.as_bytes())?;
            if report.has_plot() {
                let mut buf = Vec::new();
                report.write_plot(&mut buf).map_err(|e| RunError::Output(e.to_string()))?;
                write_file(&plot_path(path), &buf)?;
            }
        }
        None => {
            let mut stdout = io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| RunError::Output(format!("cannot write report: {e}")))?;
        }
    }
    Ok(())
}

fn fail(err: &RunError) -> ExitCode {
    eprintln!("{}", err.to_json());
    ExitCode::from(err.exit_code())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => return fail(&RunError::Config(e.to_string().trim_end().to_string())),
    };
    match run(resolve(cli)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(&e),
    }
}
