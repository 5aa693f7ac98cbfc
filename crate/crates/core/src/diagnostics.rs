//! Residual adequacy checks: Ljung-Box, Engle's ARCH LM test and the
//! correlogram whiteness verdict.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::correlogram::{acf, autocorrelations, pacf, Correlogram};
use crate::dist::chi_square_sf;
use crate::error::{Error, Result};
use crate::estimation::ArimaModel;

/// Significance level used for the textual decisions.
pub const DECISION_ALPHA: f64 = 0.05;

/// ARCH LM lags reported by [`diagnose`].
pub const ARCH_LAGS: [usize; 3] = [1, 12, 24];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PortmanteauResult {
    pub lag: usize,
    pub statistic: f64,
    pub df: usize,
    pub p_value: f64,
    pub decision: String,
}

pub fn ljung_box(residuals: &[f64], lag: usize, fitdf: usize) -> Result<PortmanteauResult> {
    let n = residuals.len();
    if lag == 0 || lag >= n {
        return Err(Error::Validation(format!(
            "Ljung-Box lag {lag} must lie in 1..{n}"
        )));
    }
    if lag <= fitdf {
        return Err(Error::DegreesOfFreedom { lag, fitdf });
    }
    let r = autocorrelations(residuals, lag)?;
    let nf = n as f64;
    let q = nf
        * (nf + 2.0)
        * (1..=lag)
            .map(|k| r[k] * r[k] / (nf - k as f64))
            .sum::<f64>();
    let df = lag - fitdf;
    let p_value = chi_square_sf(q, df);
    Ok(PortmanteauResult {
        lag,
        statistic: q,
        df,
        p_value,
        decision: if p_value < DECISION_ALPHA {
            "autocorrelation".into()
        } else {
            "no autocorrelation".into()
        },
    })
}

/// A lag of the portmanteau schedule with its display label.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScheduledLag {
    pub label: String,
    /// Unrounded rule value.
    pub value: f64,
    /// Lag used in computation (rule value floored).
    pub lag: usize,
}

/// The five lags `T/4`, 12, `sqrt(T) + 10`, 20 and 10 for a series of
/// length `n`.
pub fn lag_schedule(n: usize) -> Result<Vec<ScheduledLag>> {
    if n < 24 {
        return Err(Error::InsufficientData(format!(
            "lag schedule needs at least 24 observations, have {n}"
        )));
    }
    let quarter = n as f64 / 4.0;
    let root = (n as f64).sqrt() + 10.0;
    let rule = |name: &str, v: f64| ScheduledLag {
        label: format!("{name}={}", trim(v)),
        value: v,
        lag: v.floor() as usize,
    };
    let fixed = |v: usize| ScheduledLag {
        label: v.to_string(),
        value: v as f64,
        lag: v,
    };
    Ok(vec![
        rule("T/4", quarter),
        fixed(12),
        rule("sqrt(T)+10", root),
        fixed(20),
        fixed(10),
    ])
}

fn trim(v: f64) -> String {
    let s = format!("{v:.2}");
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArchLmResult {
    pub lag: usize,
    pub statistic: f64,
    pub p_value: f64,
    pub decision: String,
}

pub fn arch_lm(residuals: &[f64], m: usize) -> Result<ArchLmResult> {
    let n = residuals.len();
    if m == 0 {
        return Err(Error::Validation("ARCH lag must be at least 1".into()));
    }
    if n <= 2 * m + 1 {
        return Err(Error::InsufficientData(format!(
            "ARCH LM with {m} lags needs more than {} residuals, have {n}",
            2 * m + 1
        )));
    }
    let sq: Vec<f64> = residuals.iter().map(|e| e * e).collect();
    let rows = n - m;
    let x = DMatrix::from_fn(rows, m + 1, |i, j| {
        if j == 0 {
            1.0
        } else {
            sq[m + i - j]
        }
    });
    let y = DVector::from_iterator(rows, sq[m..].iter().copied());
    let mean = y.mean();
    let sst: f64 = y.iter().map(|v| (v - mean).powi(2)).sum();
    if sst == 0.0 {
        return Err(Error::DegenerateSeries("squared residuals are constant".into()));
    }
    let beta = x
        .clone()
        .svd(true, true)
        .solve(&y, 1e-12)
        .map_err(|e| Error::Domain(format!("ARCH regression failed: {e}")))?;
    let sse = (&y - &x * beta).norm_squared();
    let r2 = (1.0 - sse / sst).max(0.0);
    let statistic = rows as f64 * r2;
    let p_value = chi_square_sf(statistic, m);
    Ok(ArchLmResult {
        lag: m,
        statistic,
        p_value,
        decision: if p_value < DECISION_ALPHA {
            "ARCH effect".into()
        } else {
            "no ARCH effect".into()
        },
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WhitenessReport {
    pub acf: Correlogram,
    pub pacf: Correlogram,
    pub offending_acf_lags: Vec<usize>,
    pub offending_pacf_lags: Vec<usize>,
    pub pass: bool,
}

pub fn whiteness_verdict(residuals: &[f64], max_lag: usize) -> Result<WhitenessReport> {
    let acf = acf(residuals, max_lag)?;
    let pacf = pacf(residuals, max_lag)?;
    let offending_acf_lags = acf.offending_lags();
    let offending_pacf_lags = pacf.offending_lags();
    let pass = offending_acf_lags.is_empty() && offending_pacf_lags.is_empty();
    Ok(WhitenessReport {
        acf,
        pacf,
        offending_acf_lags,
        offending_pacf_lags,
        pass,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabelledPortmanteau {
    pub label: String,
    #[serde(flatten)]
    pub result: PortmanteauResult,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsReport {
    pub fitdf: usize,
    pub ljung_box: Vec<LabelledPortmanteau>,
    pub arch_lm: Vec<ArchLmResult>,
    pub whiteness: WhitenessReport,
}

/// Default correlogram depth for residual checks.
pub fn default_max_lag(n: usize) -> usize {
    24.min(n.saturating_sub(1)).max(1)
}

/// Runs the full residual check on a fitted model. `fitdf` defaults to
/// `p + q`. Lags the residual count cannot support are skipped.
pub fn diagnose(model: &ArimaModel, fitdf: Option<usize>) -> Result<DiagnosticsReport> {
    let fitdf = fitdf.unwrap_or(model.order.p + model.order.q);
    let resid = &model.residuals;
    let mut ljung = Vec::new();
    for s in lag_schedule(model.series.len())? {
        if s.lag > fitdf && s.lag < resid.len() {
            ljung.push(LabelledPortmanteau {
                label: s.label,
                result: ljung_box(resid, s.lag, fitdf)?,
            });
        }
    }
    let arch = ARCH_LAGS
        .iter()
        .filter(|m| resid.len() > 2 * **m + 1)
        .map(|m| arch_lm(resid, *m))
        .collect::<Result<Vec<_>>>()?;
    Ok(DiagnosticsReport {
        fitdf,
        ljung_box: ljung,
        arch_lm: arch,
        whiteness: whiteness_verdict(resid, default_max_lag(resid.len()))?,
    })
}
