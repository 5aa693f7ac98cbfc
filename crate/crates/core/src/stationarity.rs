//! KPSS stationarity test and the differencing-order rule built on it.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::{difference, TimeSeries};

/// Deterministic component kept under the null hypothesis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NullKind {
    /// Stationary around a constant.
    Level,
    /// Stationary around a linear trend.
    Trend,
}

/// Upper-tail significance levels with tabulated asymptotic critical values.
const LEVELS: [f64; 4] = [0.10, 0.05, 0.025, 0.01];
const LEVEL_CRITICAL: [f64; 4] = [0.347, 0.463, 0.574, 0.739];
const TREND_CRITICAL: [f64; 4] = [0.119, 0.146, 0.176, 0.216];

impl NullKind {
    fn critical_values(self) -> &'static [f64; 4] {
        match self {
            NullKind::Level => &LEVEL_CRITICAL,
            NullKind::Trend => &TREND_CRITICAL,
        }
    }

    /// Critical value at a tabulated significance level.
    pub fn critical_value(self, alpha: f64) -> Result<f64> {
        LEVELS
            .iter()
            .position(|&a| (a - alpha).abs() < 1e-12)
            .map(|i| self.critical_values()[i])
            .ok_or_else(|| {
                Error::Validation(format!(
                    "KPSS alpha must be one of 0.10, 0.05, 0.025, 0.01; got {alpha}"
                ))
            })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KpssResult {
    pub statistic: f64,
    pub null_kind: NullKind,
    pub bandwidth: usize,
    /// Keyed by significance level label, e.g. `"5%"`.
    pub critical_values: BTreeMap<String, f64>,
    pub reject_at_5pct: bool,
}

impl KpssResult {
    pub fn rejects_at(&self, alpha: f64) -> Result<bool> {
        Ok(self.statistic > self.null_kind.critical_value(alpha)?)
    }
}

/// Short-lag Bartlett bandwidth `floor(4 (n/100)^{1/4})`.
pub fn default_bandwidth(n: usize) -> usize {
    (4.0 * (n as f64 / 100.0).powf(0.25)).floor() as usize
}

/// KPSS test with the default bandwidth.
pub fn kpss_test(values: &[f64], null_kind: NullKind) -> Result<KpssResult> {
    kpss_test_with_bandwidth(values, null_kind, default_bandwidth(values.len()))
}

pub fn kpss_test_with_bandwidth(
    values: &[f64],
    null_kind: NullKind,
    bandwidth: usize,
) -> Result<KpssResult> {
    let n = values.len();
    if n < 10 {
        return Err(Error::InsufficientData(format!(
            "KPSS needs at least 10 observations, got {n}"
        )));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::Validation("KPSS input contains non-finite values".into()));
    }
    if bandwidth >= n {
        return Err(Error::Validation(format!(
            "bandwidth {bandwidth} must be below sample size {n}"
        )));
    }
    let resid = detrend(values, null_kind);
    let nf = n as f64;

    let gamma = |s: usize| -> f64 {
        resid[s..]
            .iter()
            .zip(&resid[..n - s])
            .map(|(a, b)| a * b)
            .sum::<f64>()
            / nf
    };
    let mut long_run = gamma(0);
    for s in 1..=bandwidth {
        let w = 1.0 - s as f64 / (bandwidth as f64 + 1.0);
        long_run += 2.0 * w * gamma(s);
    }
    let scale = values.iter().fold(0.0_f64, |m, v| m.max(v.abs())).max(1.0);
    if long_run <= (1e-12 * scale).powi(2) {
        return Err(Error::DegenerateSeries(
            "zero long-run variance in KPSS residuals".into(),
        ));
    }

    let mut partial = 0.0;
    let mut sum_sq = 0.0;
    for e in &resid {
        partial += e;
        sum_sq += partial * partial;
    }
    let statistic = (sum_sq / (nf * nf) / long_run).max(0.0);

    let labels = ["10%", "5%", "2.5%", "1%"];
    let critical_values = labels
        .iter()
        .zip(null_kind.critical_values())
        .map(|(l, v)| (l.to_string(), *v))
        .collect();
    Ok(KpssResult {
        statistic,
        null_kind,
        bandwidth,
        critical_values,
        reject_at_5pct: statistic > null_kind.critical_values()[1],
    })
}

/// Residuals from an OLS fit on a constant, or on a constant and time index.
fn detrend(values: &[f64], null_kind: NullKind) -> Vec<f64> {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    match null_kind {
        NullKind::Level => values.iter().map(|v| v - mean).collect(),
        NullKind::Trend => {
            let t_mean = (n - 1.0) / 2.0;
            let (mut sxy, mut sxx) = (0.0, 0.0);
            for (t, v) in values.iter().enumerate() {
                let dt = t as f64 - t_mean;
                sxy += dt * (v - mean);
                sxx += dt * dt;
            }
            let slope = sxy / sxx;
            values
                .iter()
                .enumerate()
                .map(|(t, v)| v - mean - slope * (t as f64 - t_mean))
                .collect()
        }
    }
}

/// Smallest `d <= max_d` whose d-th difference passes the level-null KPSS
/// test at `alpha`; `max_d` when none does.
pub fn choose_d(series: &TimeSeries, max_d: usize, alpha: f64) -> Result<usize> {
    NullKind::Level.critical_value(alpha)?;
    if series.len() < max_d + 10 {
        return Err(Error::InsufficientData(format!(
            "{} observations leave fewer than 10 after {max_d} differences",
            series.len()
        )));
    }
    for d in 0..=max_d {
        let w = difference(series.values(), d)?;
        let res = kpss_test(&w, NullKind::Level)?;
        if !res.rejects_at(alpha)? {
            return Ok(d);
        }
    }
    Ok(max_d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bandwidth_rule() {
        assert_eq!(default_bandwidth(100), 4);
        assert_eq!(default_bandwidth(200), 4);
        assert_eq!(default_bandwidth(53), 3);
        assert_eq!(default_bandwidth(10), 2);
    }

    #[test]
    fn constant_series_is_degenerate() {
        assert!(matches!(
            kpss_test(&[4.0; 30], NullKind::Level),
            Err(Error::DegenerateSeries(_))
        ));
    }

    #[test]
    fn short_series_rejected() {
        assert!(matches!(
            kpss_test(&[1.0, 2.0, 3.0], NullKind::Level),
            Err(Error::InsufficientData(_))
        ));
    }

    #[test]
    fn untabulated_alpha_rejected() {
        assert!(NullKind::Level.critical_value(0.07).is_err());
        assert_eq!(NullKind::Trend.critical_value(0.05).unwrap(), 0.146);
    }

    #[test]
    fn hand_statistic_no_bandwidth() {
        // e = y - mean = [-1.5, -0.5, 0.5, 1.5, ...] for y = 0..10 would trend;
        // use an alternating series so partial sums are easy to track.
        let y: Vec<f64> = (0..10).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect();
        let r = kpss_test_with_bandwidth(&y, NullKind::Level, 0).unwrap();
        // Partial sums alternate 1,0,... : sum of squares = 5; s^2 = 1.
        assert!((r.statistic - 5.0 / 100.0).abs() < 1e-12);
        assert!(!r.reject_at_5pct);
    }
}
