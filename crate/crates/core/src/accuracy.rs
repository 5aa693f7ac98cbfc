//! Forecast-accuracy measures and predicted-versus-actual summaries.
//!
//! MASE scales by the in-sample MAE of the one-step naive forecast,
//! `mean_{t>=2} |y_t - y_{t-1}|` over the training series.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimation::ArimaModel;
use crate::forecast::fitted_values;

fn check_pair(actual: &[f64], predicted: &[f64]) -> Result<()> {
    if actual.is_empty() {
        return Err(Error::Validation("accuracy measures need at least one point".into()));
    }
    if actual.len() != predicted.len() {
        return Err(Error::Validation(format!(
            "actual has {} points but predicted has {}",
            actual.len(),
            predicted.len()
        )));
    }
    Ok(())
}

pub fn mae(actual: &[f64], predicted: &[f64]) -> Result<f64> {
    check_pair(actual, predicted)?;
    Ok(actual.iter().zip(predicted).map(|(a, p)| (a - p).abs()).sum::<f64>() / actual.len() as f64)
}

/// Mean absolute percentage error, in percent.
pub fn mape(actual: &[f64], predicted: &[f64]) -> Result<f64> {
    check_pair(actual, predicted)?;
    if let Some(i) = actual.iter().position(|a| *a == 0.0) {
        return Err(Error::Domain(format!("MAPE undefined: actual value at index {i} is zero")));
    }
    Ok(actual
        .iter()
        .zip(predicted)
        .map(|(a, p)| ((a - p) / a).abs())
        .sum::<f64>()
        / actual.len() as f64
        * 100.0)
}

pub fn rmse(actual: &[f64], predicted: &[f64]) -> Result<f64> {
    check_pair(actual, predicted)?;
    Ok((actual.iter().zip(predicted).map(|(a, p)| (a - p).powi(2)).sum::<f64>()
        / actual.len() as f64)
        .sqrt())
}

/// Mean absolute scaled error against the naive forecast on `training`.
pub fn mase(actual: &[f64], predicted: &[f64], training: &[f64]) -> Result<f64> {
    let num = mae(actual, predicted)?;
    if training.len() < 2 {
        return Err(Error::InsufficientData("MASE needs a training series of length 2".into()));
    }
    let scale = training.windows(2).map(|w| (w[1] - w[0]).abs()).sum::<f64>()
        / (training.len() - 1) as f64;
    if scale == 0.0 {
        return Err(Error::DegenerateSeries("training series is constant".into()));
    }
    Ok(num / scale)
}

/// Adjusted coefficient of determination of `predicted` against `actual`
/// with `k` regressors.
pub fn adj_r2(actual: &[f64], predicted: &[f64], k: usize) -> Result<f64> {
    check_pair(actual, predicted)?;
    let n = actual.len();
    if n <= k + 1 {
        return Err(Error::Domain(format!("adjusted R2 needs n > k + 1 (n = {n}, k = {k})")));
    }
    let mean = actual.iter().sum::<f64>() / n as f64;
    let sst: f64 = actual.iter().map(|a| (a - mean).powi(2)).sum();
    if sst == 0.0 {
        return Err(Error::Domain("actual values have zero variance".into()));
    }
    let sse: f64 = actual.iter().zip(predicted).map(|(a, p)| (a - p).powi(2)).sum();
    let r2 = 1.0 - sse / sst;
    Ok(1.0 - (1.0 - r2) * (n - 1) as f64 / (n - k - 1) as f64)
}

/// MAPE interpretation bands; each band includes its upper edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LewisClass {
    HighlyAccurate,
    Good,
    Reasonable,
    Inaccurate,
}

impl fmt::Display for LewisClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LewisClass::HighlyAccurate => "highly accurate",
            LewisClass::Good => "good",
            LewisClass::Reasonable => "reasonable",
            LewisClass::Inaccurate => "inaccurate",
        })
    }
}

pub fn lewis_class(mape_pct: f64) -> LewisClass {
    if mape_pct <= 10.0 {
        LewisClass::HighlyAccurate
    } else if mape_pct <= 20.0 {
        LewisClass::Good
    } else if mape_pct <= 50.0 {
        LewisClass::Reasonable
    } else {
        LewisClass::Inaccurate
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AccuracyReport {
    pub mae: f64,
    pub mape_pct: f64,
    pub mase: f64,
    pub rmse: f64,
    pub forecast_accuracy_pct: f64,
    pub lewis_class: LewisClass,
    pub adj_r2: Option<f64>,
    pub n: usize,
}

impl AccuracyReport {
    /// `k` is the regressor count for adjusted R2; `None` skips it.
    pub fn compute(
        actual: &[f64],
        predicted: &[f64],
        training: &[f64],
        k: Option<usize>,
    ) -> Result<Self> {
        let mape_pct = mape(actual, predicted)?;
        Ok(Self {
            mae: mae(actual, predicted)?,
            mape_pct,
            mase: mase(actual, predicted, training)?,
            rmse: rmse(actual, predicted)?,
            forecast_accuracy_pct: 100.0 - mape_pct,
            lewis_class: lewis_class(mape_pct),
            adj_r2: k.map(|k| adj_r2(actual, predicted, k)).transpose()?,
            n: actual.len(),
        })
    }
}

/// In-sample accuracy of a fitted model over the points with a one-step
/// prediction (all but the first `d`). MASE is scaled by the full training
/// series; adjusted R2 counts the mean-equation coefficients (at least 1).
pub fn in_sample_accuracy(model: &ArimaModel) -> Result<AccuracyReport> {
    let d = model.order.d;
    let y = model.series.values();
    let predicted: Vec<f64> = fitted_values(model).into_iter().flatten().collect();
    AccuracyReport::compute(&y[d..], &predicted, y, Some(model.n_coefficients().max(1)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeviationReport {
    pub label: String,
    pub predicted_total: f64,
    pub actual_total: f64,
    pub overall_deviation: f64,
    pub overall_pct_deviation: f64,
    pub mape_pct: f64,
    pub mae: f64,
    pub n_days: usize,
}

pub fn deviation_report(
    actual_future: &[f64],
    predicted_future: &[f64],
    label: impl Into<String>,
) -> Result<DeviationReport> {
    check_pair(actual_future, predicted_future)?;
    let actual_total: f64 = actual_future.iter().sum();
    let predicted_total: f64 = predicted_future.iter().sum();
    if actual_total == 0.0 {
        return Err(Error::Domain("actual total is zero".into()));
    }
    Ok(DeviationReport {
        label: label.into(),
        predicted_total,
        actual_total,
        overall_deviation: predicted_total - actual_total,
        overall_pct_deviation: (predicted_total / actual_total - 1.0) * 100.0,
        mape_pct: mape(actual_future, predicted_future)?,
        mae: mae(actual_future, predicted_future)?,
        n_days: actual_future.len(),
    })
}
