//! Monthly tariff price files.
//!
//! ```text
//! date,monochromic,day,peak,night
//! 2011-01,0.2013,0.2094,0.3148,0.1207
//! ```
//!
//! Any non-empty subset of the price columns may be present, in any order.
//! Header names are matched case-insensitively.

use std::fmt;
use std::io;
use std::path::Path;
use std::str::FromStr;

use serde::Serialize;
use tariffcast::{MonthRange, TimeSeries, YearMonth};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Tariff {
    Monochromic,
    Day,
    Peak,
    Night,
}

impl Tariff {
    pub const ALL: [Tariff; 4] = [Tariff::Monochromic, Tariff::Day, Tariff::Peak, Tariff::Night];

    pub fn name(self) -> &'static str {
        match self {
            Tariff::Monochromic => "monochromic",
            Tariff::Day => "day",
            Tariff::Peak => "peak",
            Tariff::Night => "night",
        }
    }
}

impl fmt::Display for Tariff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Tariff {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Tariff::ALL
            .into_iter()
            .find(|t| t.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| format!("unknown series {s:?}; expected one of monochromic, day, peak, night"))
    }
}

/// Rows are 1-based file lines, so the header is row 1.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum IngestError {
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("row {row}, column {column}: {message}")]
    Parse { row: u64, column: String, message: String },
    #[error("row {row}: calendar gap, {missing} is missing")]
    GapInCalendar { row: u64, missing: YearMonth },
    #[error("row {row}: {month} does not follow the previous month")]
    OutOfOrder { row: u64, month: YearMonth },
    #[error("row {row}, column {column}: price {value} is not positive")]
    NonPositivePrice { row: u64, column: String, value: f64 },
    #[error("need at least 2 rows of prices, got {got}")]
    TooFewRows { got: usize },
}

impl IngestError {
    pub fn code(&self) -> &'static str {
        match self {
            IngestError::Io { .. } => "Io",
            IngestError::Parse { .. } => "ParseError",
            IngestError::GapInCalendar { .. } => "GapInCalendar",
            IngestError::OutOfOrder { .. } => "OutOfOrder",
            IngestError::NonPositivePrice { .. } => "NonPositivePrice",
            IngestError::TooFewRows { .. } => "TooFewRows",
        }
    }
}

fn parse_err(row: u64, column: &str, message: impl Into<String>) -> IngestError {
    IngestError::Parse { row, column: column.to_string(), message: message.into() }
}

/// A validated set of contiguous monthly price series sharing one calendar.
#[derive(Debug, Clone, PartialEq)]
pub struct TariffDataset {
    start: YearMonth,
    columns: Vec<(Tariff, Vec<f64>)>,
}

impl TariffDataset {
    pub fn start(&self) -> YearMonth {
        self.start
    }

    pub fn len(&self) -> usize {
        self.columns[0].1.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn span(&self) -> MonthRange {
        MonthRange::new(self.start, self.start.add_months(self.len() as i64 - 1)).expect("at least two rows")
    }

    /// Present columns in file order.
    pub fn tariffs(&self) -> Vec<Tariff> {
        self.columns.iter().map(|(t, _)| *t).collect()
    }

    pub fn values(&self, tariff: Tariff) -> Option<&[f64]> {
        self.columns.iter().find(|(t, _)| *t == tariff).map(|(_, v)| v.as_slice())
    }

    pub fn series(&self, tariff: Tariff) -> Option<TimeSeries> {
        let values = self.values(tariff)?.to_vec();
        Some(TimeSeries::new(self.start, values).expect("validated on ingest"))
    }

    pub fn parse<R: io::Read>(reader: R) -> Result<Self, IngestError> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).from_reader(reader);
        let mut records = rdr.records();

        let header = match records.next() {
            Some(r) => r.map_err(|e| parse_err(1, "header", e.to_string()))?,
            None => return Err(parse_err(1, "header", "file is empty")),
        };
        let mut fields = header.iter();
        match fields.next() {
            Some(first) if first.eq_ignore_ascii_case("date") => {}
            Some(first) => return Err(parse_err(1, first, "first column must be date")),
            None => return Err(parse_err(1, "header", "header is empty")),
        }
        let mut tariffs: Vec<Tariff> = Vec::new();
        for name in fields {
            let tariff: Tariff = name.parse().map_err(|m: String| parse_err(1, name, m))?;
            if tariffs.contains(&tariff) {
                return Err(parse_err(1, name, "duplicate column"));
            }
            tariffs.push(tariff);
        }
        if tariffs.is_empty() {
            return Err(parse_err(1, "header", "no price columns"));
        }

        let mut start = None;
        let mut previous: Option<YearMonth> = None;
        let mut columns: Vec<Vec<f64>> = vec![Vec::new(); tariffs.len()];
        for (k, record) in records.enumerate() {
            let row = k as u64 + 2;
            let record = record.map_err(|e| parse_err(row, "date", e.to_string()))?;
            if record.len() != tariffs.len() + 1 {
                return Err(parse_err(
                    row,
                    "date",
                    format!("expected {} fields, found {}", tariffs.len() + 1, record.len()),
                ));
            }
            let month: YearMonth = record[0].parse().map_err(|_| parse_err(row, "date", format!("{:?} is not YYYY-MM", &record[0])))?;
            if let Some(prev) = previous {
                let expected = prev.add_months(1);
                if month < expected {
                    return Err(IngestError::OutOfOrder { row, month });
                }
                if month > expected {
                    return Err(IngestError::GapInCalendar { row, missing: expected });
                }
            }
            start.get_or_insert(month);
            previous = Some(month);

            for (j, tariff) in tariffs.iter().enumerate() {
                let text = &record[j + 1];
                let value: f64 = text
                    .parse()
                    .ok()
                    .filter(|v: &f64| v.is_finite())
                    .ok_or_else(|| parse_err(row, tariff.name(), format!("{text:?} is not a decimal number")))?;
                if value <= 0.0 {
                    return Err(IngestError::NonPositivePrice { row, column: tariff.name().to_string(), value });
                }
                columns[j].push(value);
            }
        }
        let got = columns[0].len();
        match start {
            Some(start) if got >= 2 => Ok(Self { start, columns: tariffs.into_iter().zip(columns).collect() }),
            _ => Err(IngestError::TooFewRows { got }),
        }
    }

    pub fn read(path: &Path) -> Result<Self, IngestError> {
        let file = std::fs::File::open(path)
            .map_err(|e| IngestError::Io { path: path.display().to_string(), message: e.to_string() })?;
        Self::parse(io::BufReader::new(file))
    }

    /// Writes the canonical CSV form. Prices use the shortest representation
    /// that parses back to the same `f64`.
    pub fn write<W: io::Write>(&self, writer: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let mut header = vec!["date".to_string()];
        header.extend(self.columns.iter().map(|(t, _)| t.name().to_string()));
        w.write_record(&header)?;
        for i in 0..self.len() {
            let mut row = vec![self.start.add_months(i as i64).to_string()];
            row.extend(self.columns.iter().map(|(_, v)| v[i].to_string()));
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }
}
