//! Sample autocorrelation and partial autocorrelation with 95% bands.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Two-sided 95% normal quantile used for correlogram bands.
pub const BAND_Z: f64 = 1.96;

/// Correlation coefficients at lags `1..=max_lag` with the white-noise band.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Correlogram {
    pub lags: Vec<usize>,
    pub coefficients: Vec<f64>,
    pub band_halfwidth: f64,
    pub n: usize,
}

impl Correlogram {
    /// Lags whose coefficient lies outside `±band_halfwidth`.
    pub fn offending_lags(&self) -> Vec<usize> {
        self.lags
            .iter()
            .zip(&self.coefficients)
            .filter(|(_, c)| c.abs() > self.band_halfwidth)
            .map(|(&l, _)| l)
            .collect()
    }
}

fn check_input(values: &[f64], max_lag: usize) -> Result<()> {
    if max_lag == 0 {
        return Err(Error::Validation("max_lag must be positive".into()));
    }
    if values.len() < max_lag + 1 {
        return Err(Error::InsufficientData(format!(
            "{} observations cannot support lag {max_lag}",
            values.len()
        )));
    }
    Ok(())
}

/// Sample autocorrelations `r_0..=r_max_lag` (biased estimator, mean-centred).
pub(crate) fn autocorrelations(values: &[f64], max_lag: usize) -> Result<Vec<f64>> {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let centred: Vec<f64> = values.iter().map(|v| v - mean).collect();
    let denom: f64 = centred.iter().map(|v| v * v).sum();
    let scale = values.iter().fold(0.0_f64, |m, v| m.max(v.abs())).max(1.0);
    if denom <= (1e-13 * scale).powi(2) * n {
        return Err(Error::DegenerateSeries(
            "zero sample variance, autocorrelation undefined".into(),
        ));
    }
    Ok((0..=max_lag)
        .map(|k| {
            let num: f64 = centred[k..]
                .iter()
                .zip(&centred[..centred.len() - k])
                .map(|(a, b)| a * b)
                .sum();
            num / denom
        })
        .collect())
}

/// Sample ACF at lags `1..=max_lag`. Lag 0 is identically one and omitted.
pub fn acf(values: &[f64], max_lag: usize) -> Result<Correlogram> {
    check_input(values, max_lag)?;
    let r = autocorrelations(values, max_lag)?;
    Ok(Correlogram {
        lags: (1..=max_lag).collect(),
        coefficients: r[1..].to_vec(),
        band_halfwidth: BAND_Z / (values.len() as f64).sqrt(),
        n: values.len(),
    })
}

/// Durbin-Levinson recursion. `rho[0]` must be 1; returns partial
/// autocorrelations at lags `1..rho.len()`.
pub fn durbin_levinson(rho: &[f64]) -> Vec<f64> {
    let max_lag = rho.len().saturating_sub(1);
    let mut phi = vec![0.0; max_lag + 1];
    let mut prev = vec![0.0; max_lag + 1];
    let mut out = Vec::with_capacity(max_lag);
    let mut v = 1.0;
    for k in 1..=max_lag {
        let num = rho[k] - (1..k).map(|j| prev[j] * rho[k - j]).sum::<f64>();
        let a = if v > 0.0 { num / v } else { 0.0 };
        phi[k] = a;
        for j in 1..k {
            phi[j] = prev[j] - a * prev[k - j];
        }
        v *= 1.0 - a * a;
        out.push(a.clamp(-1.0, 1.0));
        prev[..=k].copy_from_slice(&phi[..=k]);
    }
    out
}

/// Sample PACF at lags `1..=max_lag` via Durbin-Levinson on the sample ACF.
pub fn pacf(values: &[f64], max_lag: usize) -> Result<Correlogram> {
    check_input(values, max_lag)?;
    let r = autocorrelations(values, max_lag)?;
    Ok(Correlogram {
        lags: (1..=max_lag).collect(),
        coefficients: durbin_levinson(&r),
        band_halfwidth: BAND_Z / (values.len() as f64).sqrt(),
        n: values.len(),
    })
}
