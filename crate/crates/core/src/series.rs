//! Daily observation series plus differencing and its inverse.

use chrono::{Duration, NaiveDate};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A gap-free daily series of finite observations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries {
    dates: Vec<NaiveDate>,
    values: Vec<f64>,
    label: String,
}

impl TimeSeries {
    /// Builds a series, checking that dates advance by exactly one day and
    /// that every value is finite.
    pub fn new(dates: Vec<NaiveDate>, values: Vec<f64>, label: impl Into<String>) -> Result<Self> {
        if dates.len() != values.len() {
            return Err(Error::Validation(format!(
                "{} dates but {} values",
                dates.len(),
                values.len()
            )));
        }
        if values.is_empty() {
            return Err(Error::InsufficientData("series is empty".into()));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Validation(format!(
                "non-finite value at {}",
                dates[i]
            )));
        }
        for w in dates.windows(2) {
            let step = w[1] - w[0];
            if step <= Duration::zero() {
                return Err(Error::DataIntegrity(format!(
                    "dates not strictly increasing: {} follows {}",
                    w[1], w[0]
                )));
            }
            if step != Duration::days(1) {
                return Err(Error::DataIntegrity(format!(
                    "gap in daily series: {} missing",
                    w[0] + Duration::days(1)
                )));
            }
        }
        Ok(Self {
            dates,
            values,
            label: label.into(),
        })
    }

    /// Consecutive daily series starting at `start`.
    pub fn from_values(start: NaiveDate, values: Vec<f64>, label: impl Into<String>) -> Result<Self> {
        let dates = (0..values.len())
            .map(|i| start + Duration::days(i as i64))
            .collect();
        Self::new(dates, values, label)
    }

    pub fn dates(&self) -> &[NaiveDate] {
        &self.dates
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn start(&self) -> NaiveDate {
        self.dates[0]
    }

    pub fn end(&self) -> NaiveDate {
        self.dates[self.dates.len() - 1]
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// Inclusive calendar slice. Both bounds must fall inside the series.
    pub fn slice(&self, from: NaiveDate, to: NaiveDate) -> Result<Self> {
        if from > to {
            return Err(Error::Validation(format!("window start {from} is after end {to}")));
        }
        if from < self.start() || to > self.end() {
            return Err(Error::InsufficientData(format!(
                "window {from}..{to} not covered by data {}..{}",
                self.start(),
                self.end()
            )));
        }
        let i = (from - self.start()).num_days() as usize;
        let j = (to - self.start()).num_days() as usize;
        Ok(Self {
            dates: self.dates[i..=j].to_vec(),
            values: self.values[i..=j].to_vec(),
            label: self.label.clone(),
        })
    }

    /// The d-times differenced series; the first `d` dates are dropped.
    pub fn differenced(&self, d: usize) -> Result<Self> {
        let values = difference(&self.values, d)?;
        Ok(Self {
            dates: self.dates[d..].to_vec(),
            values,
            label: self.label.clone(),
        })
    }
}

/// Applies the first-difference operator `d` times.
pub fn difference(values: &[f64], d: usize) -> Result<Vec<f64>> {
    if values.len() <= d {
        return Err(Error::InsufficientData(format!(
            "cannot difference {} observations {d} times",
            values.len()
        )));
    }
    let mut out = values.to_vec();
    for _ in 0..d {
        out = out.windows(2).map(|w| w[1] - w[0]).collect();
    }
    Ok(out)
}

/// Values of each differencing level at the last observation of `history`:
/// element `j` is the final value of the j-times differenced history.
pub fn pivots(history: &[f64], d: usize) -> Result<Vec<f64>> {
    if history.len() < d.max(1) {
        return Err(Error::InsufficientData(format!(
            "need {} observations for {d} pivots, got {}",
            d.max(1),
            history.len()
        )));
    }
    let mut level = history.to_vec();
    let mut out = Vec::with_capacity(d);
    for _ in 0..d {
        out.push(*level.last().expect("nonempty level"));
        level = level.windows(2).map(|w| w[1] - w[0]).collect();
    }
    Ok(out)
}

/// Undoes `d` rounds of differencing. `pivot_values[j]` is the last value of
/// the j-times differenced series immediately before `diff_values` begins
/// (see [`pivots`]).
pub fn integrate(diff_values: &[f64], pivot_values: &[f64], d: usize) -> Result<Vec<f64>> {
    if pivot_values.len() != d {
        return Err(Error::Validation(format!(
            "integrate needs {d} pivot values, got {}",
            pivot_values.len()
        )));
    }
    let mut current = diff_values.to_vec();
    for level in (0..d).rev() {
        let mut acc = pivot_values[level];
        for v in current.iter_mut() {
            acc += *v;
            *v = acc;
        }
    }
    Ok(current)
}
