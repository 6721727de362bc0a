//! Monthly time series container and the transforms shared by every model:
//! differencing, sample autocorrelation and centered moving averages.
//!
//! Every transform carries the calendar anchor along, so a value's seasonal
//! position can always be recovered from `start + t` months.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A calendar month.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct YearMonth {
    year: i32,
    month: u8,
}

impl YearMonth {
    pub fn new(year: i32, month: u8) -> Result<Self> {
        if !(1..=12).contains(&month) {
            return Err(Error::InvalidSeries(format!("month {month} is not in 1..=12")));
        }
        Ok(Self { year, month })
    }

    pub fn year(self) -> i32 {
        self.year
    }

    /// Month of year, 1 = January.
    pub fn month(self) -> u8 {
        self.month
    }

    /// Months elapsed since January of year 0. Seasonal positions are
    /// computed from this so they agree across every derived series.
    pub fn ordinal(self) -> i64 {
        i64::from(self.year) * 12 + i64::from(self.month) - 1
    }

    fn from_ordinal(ordinal: i64) -> Self {
        Self {
            year: ordinal.div_euclid(12) as i32,
            month: (ordinal.rem_euclid(12) + 1) as u8,
        }
    }

    pub fn add_months(self, months: i64) -> Self {
        Self::from_ordinal(self.ordinal() + months)
    }

    /// Signed number of months from `self` to `other`.
    pub fn months_until(self, other: YearMonth) -> i64 {
        other.ordinal() - self.ordinal()
    }

    /// Zero-based position of this month within a cycle of `period` months.
    pub fn season(self, period: usize) -> usize {
        self.ordinal().rem_euclid(period as i64) as usize
    }
}

impl fmt::Display for YearMonth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:04}-{:02}", self.year, self.month)
    }
}

impl FromStr for YearMonth {
    type Err = Error;

    /// Parses `YYYY-MM`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidSeries(format!("'{s}' is not a YYYY-MM month"));
        let (y, m) = s.trim().split_once('-').ok_or_else(bad)?;
        if y.len() != 4 || m.len() != 2 {
            return Err(bad());
        }
        let year = y.parse::<i32>().map_err(|_| bad())?;
        let month = m.parse::<u8>().map_err(|_| bad())?;
        YearMonth::new(year, month).map_err(|_| bad())
    }
}

impl Serialize for YearMonth {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for YearMonth {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// An inclusive span of months, written `YYYY-MM:YYYY-MM`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MonthRange {
    pub start: YearMonth,
    pub end: YearMonth,
}

impl MonthRange {
    pub fn new(start: YearMonth, end: YearMonth) -> Result<Self> {
        if end < start {
            return Err(Error::InvalidWindow(format!("{end} is before {start}")));
        }
        Ok(Self { start, end })
    }

    pub fn len(&self) -> usize {
        (self.start.months_until(self.end) + 1) as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains_range(&self, other: &MonthRange) -> bool {
        self.start <= other.start && other.end <= self.end
    }
}

impl fmt::Display for MonthRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.start, self.end)
    }
}

impl FromStr for MonthRange {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (a, b) = s
            .split_once(':')
            .ok_or_else(|| Error::InvalidWindow(format!("'{s}' is not a YYYY-MM:YYYY-MM range")))?;
        MonthRange::new(a.parse()?, b.parse()?)
    }
}

/// A differencing or averaging lag, counted in observations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Lag(usize);

impl Lag {
    pub fn new(k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidSeries("lag must be positive".into()));
        }
        Ok(Self(k))
    }

    pub fn get(self) -> usize {
        self.0
    }
}

/// Contiguous monthly observations anchored at a calendar month.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TimeSeries {
    start: YearMonth,
    values: Vec<f64>,
    period_hint: Option<usize>,
}

impl TimeSeries {
    /// Builds a series of at least two finite observations.
    pub fn new(start: YearMonth, values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::InvalidSeries(format!(
                "need at least 2 observations, got {}",
                values.len()
            )));
        }
        Self::derived(start, values)
    }

    /// Derived series (differences, averages) may be as short as one point.
    pub(crate) fn derived(start: YearMonth, values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidSeries("empty series".into()));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidSeries(format!("value at index {i} is not finite")));
        }
        Ok(Self { start, values, period_hint: None })
    }

    pub fn with_period_hint(mut self, period: usize) -> Result<Self> {
        if period != 4 && period != 12 {
            return Err(Error::InvalidPeriod(period));
        }
        self.period_hint = Some(period);
        Ok(self)
    }

    pub fn start(&self) -> YearMonth {
        self.start
    }

    /// Month of the last observation.
    pub fn end(&self) -> YearMonth {
        self.month_at(self.len() - 1)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn period_hint(&self) -> Option<usize> {
        self.period_hint
    }

    pub fn month_at(&self, t: usize) -> YearMonth {
        self.start.add_months(t as i64)
    }

    /// Seasonal position of observation `t` (which may lie past the end,
    /// for forecasts).
    pub fn season_at(&self, t: usize, period: usize) -> usize {
        self.month_at(t).season(period)
    }

    pub fn span(&self) -> MonthRange {
        MonthRange { start: self.start, end: self.end() }
    }

    /// Index of the first value that is not strictly positive.
    pub fn first_non_positive(&self) -> Option<(usize, f64)> {
        self.values.iter().copied().enumerate().find(|&(_, v)| v <= 0.0)
    }

    pub(crate) fn require_positive(&self) -> Result<()> {
        match self.first_non_positive() {
            Some((index, value)) => Err(Error::NonPositiveValue { index, value }),
            None => Ok(()),
        }
    }

    /// The observations falling inside `range`, which must lie within the
    /// series span.
    pub fn window(&self, range: MonthRange) -> Result<TimeSeries> {
        if !self.span().contains_range(&range) {
            return Err(Error::InvalidWindow(format!(
                "{range} is outside the series span {}",
                self.span()
            )));
        }
        let from = self.start.months_until(range.start) as usize;
        let to = self.start.months_until(range.end) as usize;
        let mut out = TimeSeries::new(range.start, self.values[from..=to].to_vec())?;
        out.period_hint = self.period_hint;
        Ok(out)
    }

    /// Observations up to and including `end`.
    pub fn truncate_at(&self, end: YearMonth) -> Result<TimeSeries> {
        self.window(MonthRange::new(self.start, end)?)
    }
}

/// Lag-`k` differences `Y_t - Y_{t-k}`; the anchor advances by `k` months.
pub fn difference(series: &TimeSeries, lag: Lag) -> Result<TimeSeries> {
    let k = lag.get();
    let n = series.len();
    if k >= n {
        return Err(Error::LagTooLarge { lag: k, len: n });
    }
    let values = series.values();
    let diffs = (k..n).map(|t| values[t] - values[t - k]).collect();
    TimeSeries::derived(series.start.add_months(k as i64), diffs)
}

/// Sample autocorrelations `r_1..r_max_lag` using the full-series mean and
/// denominator.
pub fn autocorrelation(series: &TimeSeries, max_lag: Lag) -> Result<Vec<f64>> {
    let m = max_lag.get();
    let n = series.len();
    if n < m + 2 {
        return Err(Error::SeriesTooShort { needed: m + 2, got: n });
    }
    let y = series.values();
    let mean = y.iter().sum::<f64>() / n as f64;
    let dev: Vec<f64> = y.iter().map(|v| v - mean).collect();
    let denom: f64 = dev.iter().map(|d| d * d).sum();
    if denom == 0.0 {
        return Err(Error::ConstantSeries);
    }
    Ok((1..=m)
        .map(|k| {
            let num: f64 = dev.iter().zip(&dev[k..]).map(|(a, b)| a * b).sum();
            (num / denom).clamp(-1.0, 1.0)
        })
        .collect())
}

/// Centered moving average of `k` terms. Even `k` uses the 2×k average so
/// that each value sits on an observation; the output anchor is shifted by
/// `k / 2` months (even) or `(k - 1) / 2` months (odd).
pub fn centered_moving_average(series: &TimeSeries, k: Lag) -> Result<TimeSeries> {
    let k = k.get();
    let n = series.len();
    let needed = if k % 2 == 0 { k + 1 } else { k };
    if n < needed {
        return Err(Error::SeriesTooShort { needed, got: n });
    }
    let y = series.values();
    let inv_k = 1.0 / k as f64;
    let plain: Vec<f64> = y.windows(k).map(|w| w.iter().sum::<f64>() * inv_k).collect();
    let (values, shift) = if k % 2 == 0 {
        (plain.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect(), k / 2)
    } else {
        (plain, (k - 1) / 2)
    };
    TimeSeries::derived(series.start.add_months(shift as i64), values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn jan2011() -> YearMonth {
        YearMonth::new(2011, 1).unwrap()
    }

    fn ts(values: &[f64]) -> TimeSeries {
        TimeSeries::new(jan2011(), values.to_vec()).unwrap()
    }

    #[test]
    fn calendar_arithmetic() {
        let m = YearMonth::new(2014, 11).unwrap();
        assert_eq!(m.add_months(3).to_string(), "2015-02");
        assert_eq!(m.add_months(-11).to_string(), "2013-12");
        assert_eq!(m.months_until(YearMonth::new(2015, 12).unwrap()), 13);
        assert_eq!(YearMonth::new(2015, 1).unwrap().season(12), 0);
        assert_eq!(YearMonth::new(2015, 12).unwrap().season(12), 11);
        assert_eq!("2007-03".parse::<YearMonth>().unwrap(), YearMonth::new(2007, 3).unwrap());
        assert!("2007-3".parse::<YearMonth>().is_err());
        assert!("2007-13".parse::<YearMonth>().is_err());
        let r: MonthRange = "2011-01:2014-12".parse().unwrap();
        assert_eq!(r.len(), 48);
        assert!("2014-12:2011-01".parse::<MonthRange>().is_err());
    }

    #[test]
    fn construction_rejects_bad_values() {
        assert!(TimeSeries::new(jan2011(), vec![1.0]).is_err());
        assert!(TimeSeries::new(jan2011(), vec![1.0, f64::NAN]).is_err());
        assert!(ts(&[1.0, 2.0]).with_period_hint(5).is_err());
    }

    #[test]
    fn window_and_truncate() {
        let s = ts(&[1.0, 2.0, 3.0, 4.0, 5.0]);
        let w = s.window("2011-02:2011-04".parse().unwrap()).unwrap();
        assert_eq!(w.values(), &[2.0, 3.0, 4.0]);
        assert_eq!(w.start().to_string(), "2011-02");
        assert_eq!(s.truncate_at(YearMonth::new(2011, 3).unwrap()).unwrap().len(), 3);
        assert!(s.window("2010-12:2011-02".parse().unwrap()).is_err());
    }

    #[test]
    fn difference_examples() {
        let d = difference(&ts(&[1.0, 3.0, 6.0]), Lag::new(1).unwrap()).unwrap();
        assert_eq!(d.values(), &[2.0, 3.0]);
        assert_eq!(d.start().to_string(), "2011-02");
        let d = difference(&ts(&[5.0, 5.0, 5.0, 5.0]), Lag::new(1).unwrap()).unwrap();
        assert_eq!(d.values(), &[0.0, 0.0, 0.0]);
        let d = difference(&ts(&[1.0, 2.0, 4.0, 8.0, 16.0]), Lag::new(2).unwrap()).unwrap();
        assert_eq!(d.values(), &[3.0, 6.0, 12.0]);
        assert_eq!(d.start().to_string(), "2011-03");
        assert_eq!(
            difference(&ts(&[1.0, 2.0]), Lag::new(2).unwrap()),
            Err(Error::LagTooLarge { lag: 2, len: 2 })
        );
    }

    #[test]
    fn seasonal_difference_of_trend_plus_season_is_constant() {
        let pattern = [0.3, -0.1, 0.5, -0.7];
        let slope = 0.25;
        let y: Vec<f64> = (0..20).map(|t| 2.0 + slope * t as f64 + pattern[t % 4]).collect();
        let d = difference(&ts(&y), Lag::new(4).unwrap()).unwrap();
        for v in d.values() {
            assert!((v - 4.0 * slope).abs() < 1e-12);
        }
    }

    fn acf_oracle(y: &[f64], k: usize) -> f64 {
        let n = y.len();
        let mean = y.iter().sum::<f64>() / n as f64;
        let mut num = 0.0;
        for t in 0..n - k {
            num += (y[t] - mean) * (y[t + k] - mean);
        }
        let mut den = 0.0;
        for v in y {
            den += (v - mean) * (v - mean);
        }
        num / den
    }

    #[test]
    fn autocorrelation_examples() {
        let r = autocorrelation(&ts(&[1.0, 2.0, 3.0, 4.0]), Lag::new(1).unwrap()).unwrap();
        assert!((r[0] - 0.25).abs() < 1e-15);

        // Alternating ±1 has zero mean, so r_1 = -(n-1)/n.
        for n in [4usize, 10, 30] {
            let y: Vec<f64> = (0..n).map(|t| if t % 2 == 0 { 1.0 } else { -1.0 }).collect();
            let r = autocorrelation(&ts(&y), Lag::new(1).unwrap()).unwrap();
            assert!((r[0] - acf_oracle(&y, 1)).abs() < 1e-15);
            assert!((r[0] + (n as f64 - 1.0) / n as f64).abs() < 1e-15);
        }
        assert_eq!(
            autocorrelation(&ts(&[2.0, 2.0, 2.0]), Lag::new(1).unwrap()),
            Err(Error::ConstantSeries)
        );
        assert!(autocorrelation(&ts(&[1.0, 2.0, 3.0]), Lag::new(2).unwrap()).is_err());
    }

    #[test]
    fn cma_examples() {
        let c = centered_moving_average(&ts(&[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]), Lag::new(4).unwrap())
            .unwrap();
        assert_eq!(c.values(), &[3.0, 4.0]);
        assert_eq!(c.start().to_string(), "2011-03");
        let c = centered_moving_average(&ts(&[2.0, 4.0, 6.0]), Lag::new(3).unwrap()).unwrap();
        assert_eq!(c.values(), &[4.0]);
        assert_eq!(c.start().to_string(), "2011-02");
        assert!(centered_moving_average(&ts(&[1.0, 2.0, 3.0, 4.0]), Lag::new(4).unwrap()).is_err());
    }

    proptest! {
        #[test]
        fn difference_is_linear(
            x in prop::collection::vec(-100.0f64..100.0, 3..30),
            seed in prop::collection::vec(-100.0f64..100.0, 30),
            a in -5.0f64..5.0, b in -5.0f64..5.0, k in 1usize..3,
        ) {
            let z = &seed[..x.len()];
            let combo: Vec<f64> = x.iter().zip(z).map(|(p, q)| a * p + b * q).collect();
            let lag = Lag::new(k).unwrap();
            let dx = difference(&ts(&x), lag).unwrap();
            let dz = difference(&ts(z), lag).unwrap();
            let dc = difference(&ts(&combo), lag).unwrap();
            for i in 0..dc.len() {
                let expect = a * dx.values()[i] + b * dz.values()[i];
                prop_assert!((dc.values()[i] - expect).abs() <= 1e-9 * (1.0 + expect.abs()));
            }
        }

        #[test]
        fn cma_reproduces_lines(a in -10.0f64..10.0, b in -1.0f64..1.0, n in 13usize..40, k in 2usize..13) {
            let y: Vec<f64> = (0..n).map(|t| a + b * t as f64).collect();
            let c = centered_moving_average(&ts(&y), Lag::new(k).unwrap()).unwrap();
            let shift = if k % 2 == 0 { k / 2 } else { (k - 1) / 2 };
            for (j, v) in c.values().iter().enumerate() {
                let expect = y[j + shift];
                prop_assert!((v - expect).abs() <= 1e-12 * (1.0 + expect.abs()) * 10.0);
            }
            let expected_len = if k % 2 == 0 { n - k } else { n - k + 1 };
            prop_assert_eq!(c.len(), expected_len);
        }

        #[test]
        fn cma_of_constant_is_constant(c in -50.0f64..50.0, n in 5usize..30, k in 1usize..5) {
            let out = centered_moving_average(&ts(&vec![c; n]), Lag::new(k).unwrap()).unwrap();
            for v in out.values() {
                prop_assert!((v - c).abs() <= 1e-12 * (1.0 + c.abs()));
            }
        }

        #[test]
        fn acf_bounded_and_matches_oracle(y in prop::collection::vec(-10.0f64..10.0, 6..40), m in 1usize..4) {
            if let Ok(r) = autocorrelation(&ts(&y), Lag::new(m).unwrap()) {
                prop_assert_eq!(r.len(), m);
                for (i, rk) in r.iter().enumerate() {
                    prop_assert!(rk.abs() <= 1.0);
                    prop_assert!((rk - acf_oracle(&y, i + 1)).abs() < 1e-12);
                }
            }
        }
    }
}
