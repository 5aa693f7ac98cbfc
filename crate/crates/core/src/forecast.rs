//! Multi-step forecasts with Gaussian prediction intervals on the original
//! scale.

use chrono::{Days, NaiveDate};
use serde::{Deserialize, Serialize};

use crate::dist::normal_quantile;
use crate::error::{Error, Result};
use crate::estimation::poly::{integrated_ar, psi_weights};
use crate::estimation::ArimaModel;
use crate::series::{integrate, pivots};

/// Longest horizon accepted, as a multiple of the effective sample size.
pub const MAX_HORIZON_FACTOR: usize = 10;

/// Prediction interval at one confidence level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub level: f64,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Forecast {
    pub horizon: usize,
    pub dates: Vec<NaiveDate>,
    pub mean: Vec<f64>,
    /// Forecast standard deviation at each step.
    pub sd: Vec<f64>,
    pub intervals: Vec<Interval>,
    /// Psi-weights of the integrated model; element 0 is 1.
    pub psi_weights: Vec<f64>,
    pub sigma2: f64,
    pub clamped: bool,
}

impl Forecast {
    pub fn interval(&self, level: f64) -> Option<&Interval> {
        self.intervals
            .iter()
            .find(|i| (i.level - level).abs() < 1e-12)
    }

    /// First date whose mean forecast falls below `threshold`.
    pub fn first_below(&self, threshold: f64) -> Option<NaiveDate> {
        self.mean
            .iter()
            .position(|m| *m < threshold)
            .map(|i| self.dates[i])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ForecastOptions {
    /// Truncate negative means and bounds at zero.
    pub clamp_zero: bool,
}

pub fn forecast(model: &ArimaModel, h: usize, levels: &[f64]) -> Result<Forecast> {
    forecast_with(model, h, levels, ForecastOptions::default())
}

pub fn forecast_with(
    model: &ArimaModel,
    h: usize,
    levels: &[f64],
    opts: ForecastOptions,
) -> Result<Forecast> {
    if h == 0 {
        return Err(Error::Validation("horizon must be at least 1".into()));
    }
    if h > MAX_HORIZON_FACTOR * model.n_effective {
        return Err(Error::HorizonTooLong {
            horizon: h,
            n_effective: model.n_effective,
        });
    }
    if let Some(l) = levels.iter().find(|l| !(**l > 0.0 && **l < 1.0)) {
        return Err(Error::Validation(format!(
            "confidence level {l} must lie strictly between 0 and 1"
        )));
    }

    let diff_mean = differenced_means(model, h);
    let d = model.order.d;
    let y = model.series.values();
    let mut mean = integrate(&diff_mean, &pivots(y, d)?, d)?;

    let psi = psi_weights(&integrated_ar(&model.ar, d), &model.ma, h);
    let mut acc = 0.0;
    let sd: Vec<f64> = psi
        .iter()
        .map(|w| {
            acc += w * w;
            (model.sigma2 * acc).sqrt()
        })
        .collect();

    let mut intervals: Vec<Interval> = levels
        .iter()
        .map(|&level| {
            let z = normal_quantile(0.5 + level / 2.0);
            Interval {
                level,
                lower: mean.iter().zip(&sd).map(|(m, s)| m - z * s).collect(),
                upper: mean.iter().zip(&sd).map(|(m, s)| m + z * s).collect(),
            }
        })
        .collect();

    if opts.clamp_zero {
        let clamp = |v: &mut Vec<f64>| v.iter_mut().for_each(|x| *x = x.max(0.0));
        clamp(&mut mean);
        for i in &mut intervals {
            clamp(&mut i.lower);
            clamp(&mut i.upper);
        }
    }

    let end = model.series.end();
    let dates = (1..=h as u64)
        .map(|j| end + Days::new(j))
        .collect();
    Ok(Forecast {
        horizon: h,
        dates,
        mean,
        sd,
        intervals,
        psi_weights: psi,
        sigma2: model.sigma2,
        clamped: opts.clamp_zero,
    })
}

/// Conditional means of the differenced series from the filtered state.
fn differenced_means(model: &ArimaModel, h: usize) -> Vec<f64> {
    let mu = model.constant.unwrap_or(0.0);
    let out = model.filter();
    let mut a = out.next_state;
    let r = a.len();
    let mut phi = vec![0.0; r];
    phi[..model.ar.len()].copy_from_slice(&model.ar);
    let mut means = Vec::with_capacity(h);
    for _ in 0..h {
        means.push(a[0] + mu);
        let head = a[0];
        for i in 0..r {
            let next = if i + 1 < r { a[i + 1] } else { 0.0 };
            a[i] = phi[i] * head + next;
        }
    }
    means
}

/// One-step in-sample predictions on the original scale. The first `d`
/// entries have no prediction.
pub fn fitted_values(model: &ArimaModel) -> Vec<Option<f64>> {
    let d = model.order.d;
    let y = model.series.values();
    let mut out = vec![None; d];
    out.extend(
        y[d..]
            .iter()
            .zip(&model.residuals)
            .map(|(v, e)| Some(v - e)),
    );
    out
}

/// Cumulative total projected from the mean forecast.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FinalSize {
    pub observed_total: f64,
    pub projected_total: f64,
    /// Days of forecast added to the observed total.
    pub days: usize,
    /// First forecast date with mean below the threshold, if reached.
    pub crossing_date: Option<NaiveDate>,
    pub threshold: f64,
}

/// Observed cumulative cases plus mean forecasts up to (not including) the
/// first day below `threshold`, or up to `cap` days.
pub fn final_size(
    model: &ArimaModel,
    observed_total: f64,
    threshold: f64,
    cap: usize,
) -> Result<FinalSize> {
    let cap = cap.min(MAX_HORIZON_FACTOR * model.n_effective);
    let fc = forecast(model, cap, &[])?;
    let crossing = fc.mean.iter().position(|m| *m < threshold);
    let days = crossing.unwrap_or(cap);
    Ok(FinalSize {
        observed_total,
        projected_total: observed_total + fc.mean[..days].iter().sum::<f64>(),
        days,
        crossing_date: crossing.map(|i| fc.dates[i]),
        threshold,
    })
}
