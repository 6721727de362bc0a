//! Forecast error measures.
//!
//! MAPE and MPE are expressed in percent. MPE is oriented as
//! `(actual - forecast) / actual`, so a positive value means the forecasts
//! run low. The per-period approximation errors use the opposite
//! orientation, `(forecast - actual) / actual`, so an under-forecast shows
//! up as a negative entry.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Actual values paired with predictions of the same length.
#[derive(Debug, Clone, Copy)]
pub struct PairedSeries<'a> {
    actual: &'a [f64],
    predicted: &'a [f64],
}

impl<'a> PairedSeries<'a> {
    pub fn new(actual: &'a [f64], predicted: &'a [f64]) -> Result<Self> {
        if actual.len() != predicted.len() {
            return Err(Error::LengthMismatch { actual: actual.len(), predicted: predicted.len() });
        }
        if actual.is_empty() {
            return Err(Error::EmptyInput);
        }
        Ok(Self { actual, predicted })
    }

    pub fn actual(&self) -> &'a [f64] {
        self.actual
    }

    pub fn predicted(&self) -> &'a [f64] {
        self.predicted
    }

    pub fn len(&self) -> usize {
        self.actual.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actual.is_empty()
    }

    fn errors(&self) -> impl Iterator<Item = f64> + 'a {
        self.actual.iter().zip(self.predicted).map(|(y, f)| y - f)
    }

    fn require_nonzero_actuals(&self) -> Result<()> {
        match self.actual.iter().position(|&y| y == 0.0) {
            Some(index) => Err(Error::ZeroActual { index }),
            None => Ok(()),
        }
    }
}

/// Mean absolute deviation.
pub fn mad(pairs: &PairedSeries<'_>) -> f64 {
    pairs.errors().map(f64::abs).sum::<f64>() / pairs.len() as f64
}

/// Mean squared error.
pub fn mse(pairs: &PairedSeries<'_>) -> f64 {
    pairs.errors().map(|e| e * e).sum::<f64>() / pairs.len() as f64
}

/// Mean squared deviation; the same quantity as [`mse`].
pub fn msd(pairs: &PairedSeries<'_>) -> f64 {
    mse(pairs)
}

pub fn rmse(pairs: &PairedSeries<'_>) -> f64 {
    mse(pairs).sqrt()
}

/// Mean absolute percentage error, in percent.
pub fn mape(pairs: &PairedSeries<'_>) -> Result<f64> {
    pairs.require_nonzero_actuals()?;
    let sum: f64 = pairs
        .actual
        .iter()
        .zip(pairs.predicted)
        .map(|(y, f)| ((y - f) / y).abs())
        .sum();
    Ok(100.0 * sum / pairs.len() as f64)
}

/// Mean percentage error, in percent. Positive means under-forecasting.
pub fn mpe(pairs: &PairedSeries<'_>) -> Result<f64> {
    pairs.require_nonzero_actuals()?;
    let sum: f64 = pairs.actual.iter().zip(pairs.predicted).map(|(y, f)| (y - f) / y).sum();
    Ok(100.0 * sum / pairs.len() as f64)
}

/// Signed per-period errors `100 * (forecast - actual) / actual`.
pub fn approximation_percentage_errors(pairs: &PairedSeries<'_>) -> Result<Vec<f64>> {
    pairs.require_nonzero_actuals()?;
    Ok(pairs
        .actual
        .iter()
        .zip(pairs.predicted)
        .map(|(y, f)| 100.0 * (f - y) / y)
        .collect())
}

/// The three measures used to rank approaches.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorTriple {
    /// Percent.
    pub mape: f64,
    pub mad: f64,
    pub msd: f64,
}

impl ErrorTriple {
    pub fn from_pairs(pairs: &PairedSeries<'_>) -> Result<Self> {
        Ok(Self { mape: mape(pairs)?, mad: mad(pairs), msd: msd(pairs) })
    }

    pub fn compute(actual: &[f64], predicted: &[f64]) -> Result<Self> {
        Self::from_pairs(&PairedSeries::new(actual, predicted)?)
    }
}
