//! Gaussian maximum-likelihood estimation of ARIMA(p, d, q) models.
//!
//! The differenced series `w_t` follows
//!
//! ```text
//! w_t - mu = ar_1 (w_{t-1} - mu) + .. + ar_p (w_{t-p} - mu)
//!            + e_t + ma_1 e_{t-1} + .. + ma_q e_{t-q}
//! ```
//!
//! where `mu` is the optional constant. Estimation starts from a conditional
//! sum-of-squares fit and refines the exact state-space likelihood with a
//! Nelder-Mead search in an unconstrained parameterisation that keeps the
//! AR (and, by default, MA) roots outside [`transform::ROOT_RADIUS`].

pub mod optim;
pub mod poly;
pub mod simulate;
pub mod state_space;
pub mod transform;

use std::fmt;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::{difference, TimeSeries};
use optim::{nelder_mead, NelderMeadOptions};
use state_space::{FilterOutput, StateSpace};
use transform::ROOT_RADIUS;

pub use simulate::simulate;


/// Nonseasonal model order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ArimaOrder {
    pub p: usize,
    pub d: usize,
    pub q: usize,
}

impl ArimaOrder {
    pub const fn new(p: usize, d: usize, q: usize) -> Self {
        Self { p, d, q }
    }

    pub(crate) fn check_coefficients(&self, ar: &[f64], ma: &[f64]) -> Result<()> {
        if ar.len() != self.p || ma.len() != self.q {
            return Err(Error::Validation(format!(
                "order {self} needs {} AR and {} MA coefficients, got {} and {}",
                self.p,
                self.q,
                ar.len(),
                ma.len()
            )));
        }
        if ar.iter().chain(ma).any(|c| !c.is_finite()) {
            return Err(Error::Validation("non-finite coefficient".into()));
        }
        Ok(())
    }
}

impl fmt::Display for ArimaOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.p, self.d, self.q)
    }
}

impl std::str::FromStr for ArimaOrder {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s
            .trim_matches(|c| c == '(' || c == ')')
            .split(',')
            .map(str::trim)
            .collect();
        let parse = |v: &str| {
            v.parse::<usize>()
                .map_err(|_| Error::Validation(format!("invalid order component {v:?} in {s:?}")))
        };
        match parts.as_slice() {
            [p, d, q] => Ok(Self::new(parse(p)?, parse(d)?, parse(q)?)),
            _ => Err(Error::Validation(format!("order must look like p,d,q: {s:?}"))),
        }
    }
}

/// Estimation settings. `Default` follows the documented conventions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitOptions {
    /// `None` includes a constant only when `d == 0`.
    pub include_constant: Option<bool>,
    /// Keep MA roots outside the unit circle during the search.
    pub enforce_invertibility: bool,
    pub rel_tol: f64,
    pub max_evals: usize,
    pub restarts: usize,
    /// Additional seeded starting points drawn in the unconstrained space.
    pub random_starts: usize,
    /// Mixed with the order to seed the random starts.
    pub seed: u64,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            include_constant: None,
            enforce_invertibility: true,
            rel_tol: 1e-8,
            max_evals: 5000,
            restarts: 3,
            random_starts: 2,
            seed: 0,
        }
    }
}

impl FitOptions {
    pub fn with_constant(include_constant: bool) -> Self {
        Self {
            include_constant: Some(include_constant),
            ..Self::default()
        }
    }

    fn constant_for(&self, d: usize) -> bool {
        self.include_constant.unwrap_or(d == 0)
    }
}

/// A fitted ARIMA model. Immutable once built.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArimaModel {
    pub order: ArimaOrder,
    pub ar: Vec<f64>,
    pub ma: Vec<f64>,
    /// Mean of the differenced series, when estimated.
    pub constant: Option<f64>,
    pub sigma2: f64,
    pub loglik: f64,
    pub aic: f64,
    pub aicc: f64,
    /// Number of differenced observations entering the likelihood.
    pub n_effective: usize,
    /// One-step innovations on the differenced scale.
    pub residuals: Vec<f64>,
    /// One-step predictions on the differenced scale.
    pub fitted: Vec<f64>,
    /// Standard errors aligned with `[ar.., ma.., constant]`; `None` where the
    /// numerical Hessian is not positive definite.
    pub stderr: Vec<Option<f64>>,
    /// Set when a fitted root lies within 0.1% of the root-radius bound.
    pub near_boundary: bool,
    pub evaluations: usize,
    pub series: TimeSeries,
}

impl ArimaModel {
    /// Number of estimated parameters counted by the information criteria,
    /// including the innovation variance.
    pub fn n_params(&self) -> usize {
        parameter_count(self.order, self.constant.is_some())
    }

    /// Number of estimated mean-equation coefficients (AR, MA, constant).
    pub fn n_coefficients(&self) -> usize {
        self.order.p + self.order.q + usize::from(self.constant.is_some())
    }

    /// `(name, estimate, stderr)` rows in the order AR, MA, constant.
    pub fn coefficient_table(&self) -> Vec<(String, f64, Option<f64>)> {
        let mut rows = Vec::new();
        for (i, v) in self.ar.iter().enumerate() {
            rows.push((format!("AR({})", i + 1), *v));
        }
        for (i, v) in self.ma.iter().enumerate() {
            rows.push((format!("MA({})", i + 1), *v));
        }
        if let Some(c) = self.constant {
            rows.push(("constant".to_string(), c));
        }
        rows.into_iter()
            .zip(&self.stderr)
            .map(|((n, v), s)| (n, v, *s))
            .collect()
    }

    /// Differenced training data.
    pub fn differenced(&self) -> Vec<f64> {
        difference(self.series.values(), self.order.d).expect("validated at fit time")
    }

    /// Re-runs the Kalman filter at the fitted parameters.
    pub fn filter(&self) -> FilterOutput {
        let ss = StateSpace::new(&self.ar, &self.ma).expect("fitted AR part is stationary");
        let mu = self.constant.unwrap_or(0.0);
        let centred: Vec<f64> = self.differenced().iter().map(|v| v - mu).collect();
        ss.filter(&centred)
    }
}

fn parameter_count(order: ArimaOrder, constant: bool) -> usize {
    order.p + order.q + 1 + usize::from(constant)
}

/// Akaike criterion `-2 loglik + 2k`.
pub fn aic(loglik: f64, k: usize) -> f64 {
    -2.0 * loglik + 2.0 * k as f64
}

/// Small-sample corrected AIC `-2 loglik + 2k + 2k(k+1)/(n-k-1)`.
pub fn aicc(loglik: f64, k: usize, n: usize) -> Result<f64> {
    if n <= k + 1 {
        return Err(Error::Domain(format!(
            "AICc undefined for n = {n} with k = {k} parameters"
        )));
    }
    let kf = k as f64;
    Ok(aic(loglik, k) + 2.0 * kf * (kf + 1.0) / (n as f64 - kf - 1.0))
}

/// Exact Gaussian log-likelihood of `diff_values` under an ARMA(p, q) with
/// the given coefficients, evaluated by the Kalman filter from the
/// stationary initial state. The AR part must be stationary.
pub fn log_likelihood(
    order: ArimaOrder,
    ar: &[f64],
    ma: &[f64],
    constant: Option<f64>,
    sigma2: f64,
    diff_values: &[f64],
) -> Result<f64> {
    order.check_coefficients(ar, ma)?;
    if diff_values.is_empty() {
        return Err(Error::InsufficientData("no observations".into()));
    }
    if !(sigma2 > 0.0 && sigma2.is_finite()) {
        return Err(Error::Domain(format!("innovation variance {sigma2} must be positive")));
    }
    let ss = StateSpace::new(ar, ma)
        .ok_or_else(|| Error::Domain("AR coefficients are not stationary".into()))?;
    let mu = constant.unwrap_or(0.0);
    let centred: Vec<f64> = diff_values.iter().map(|v| v - mu).collect();
    Ok(ss.filter(&centred).log_likelihood(sigma2))
}

/// Conditional sum of squares: residuals computed from observation `p`
/// onward with pre-sample innovations set to zero. No stationarity is
/// required.
pub fn css_objective(
    order: ArimaOrder,
    ar: &[f64],
    ma: &[f64],
    constant: Option<f64>,
    diff_values: &[f64],
) -> Result<f64> {
    order.check_coefficients(ar, ma)?;
    if diff_values.len() <= order.p {
        return Err(Error::InsufficientData(format!(
            "CSS needs more than {} observations",
            order.p
        )));
    }
    Ok(css_residuals(ar, ma, constant.unwrap_or(0.0), diff_values)
        .iter()
        .map(|e| e * e)
        .sum())
}

fn css_residuals(ar: &[f64], ma: &[f64], mu: f64, w: &[f64]) -> Vec<f64> {
    let p = ar.len();
    let mut e = vec![0.0; w.len()];
    for t in p..w.len() {
        let mut v = w[t] - mu;
        for (i, a) in ar.iter().enumerate() {
            v -= a * (w[t - i - 1] - mu);
        }
        for (j, m) in ma.iter().enumerate() {
            if t > j {
                v -= m * e[t - j - 1];
            }
        }
        e[t] = v;
    }
    e[p..].to_vec()
}

/// Fits with default options apart from the constant.
pub fn fit(series: &TimeSeries, order: ArimaOrder, include_constant: bool) -> Result<ArimaModel> {
    fit_with(series, order, &FitOptions::with_constant(include_constant))
}

/// Minimum differenced length for an order: `max(8, 3 (p + q + 1))`.
pub fn min_effective_length(order: ArimaOrder) -> usize {
    8.max(3 * (order.p + order.q + 1))
}

/// Parameter layout shared by the objective and the model builder.
struct Layout {
    p: usize,
    q: usize,
    constant: bool,
    invertible: bool,
    mean0: f64,
    mean_scale: f64,
}

impl Layout {
    fn dim(&self) -> usize {
        self.p + self.q + usize::from(self.constant)
    }

    fn decode(&self, x: &[f64]) -> (Vec<f64>, Vec<f64>, Option<f64>) {
        let ar = transform::ar_from_free(&x[..self.p], ROOT_RADIUS);
        let ma_free = &x[self.p..self.p + self.q];
        let ma = if self.invertible {
            transform::ma_from_free(ma_free, ROOT_RADIUS)
        } else {
            ma_free.to_vec()
        };
        let mu = self
            .constant
            .then(|| self.mean0 + self.mean_scale * x[self.p + self.q]);
        (ar, ma, mu)
    }

    /// Free-parameter vector for raw coefficients, if they are admissible.
    fn encode(&self, ar: &[f64], ma: &[f64], mu: Option<f64>) -> Option<Vec<f64>> {
        let mut x = transform::ar_to_free(ar, ROOT_RADIUS)?;
        if self.invertible {
            x.extend(transform::ma_to_free(ma, ROOT_RADIUS)?);
        } else {
            x.extend_from_slice(ma);
        }
        if self.constant {
            x.push((mu.unwrap_or(self.mean0) - self.mean0) / self.mean_scale);
        }
        if x.iter().all(|v| v.is_finite()) {
            Some(x)
        } else {
            None
        }
    }
}

fn neg_concentrated_loglik(ar: &[f64], ma: &[f64], mu: f64, w: &[f64]) -> f64 {
    let Some(ss) = StateSpace::new(ar, ma) else {
        return f64::INFINITY;
    };
    let centred: Vec<f64> = w.iter().map(|v| v - mu).collect();
    let out = ss.filter(&centred);
    if out.sigma2_hat() <= 0.0 {
        return f64::INFINITY;
    }
    -out.concentrated_log_likelihood()
}

/// Fits an ARIMA model by exact maximum likelihood.
pub fn fit_with(series: &TimeSeries, order: ArimaOrder, opts: &FitOptions) -> Result<ArimaModel> {
    fit_from(series, order, opts, &[])
}

/// Coefficients used to seed the optimizer, typically from a nested order.
/// Shorter vectors are padded with zeros, so the seeded likelihood equals
/// that of the smaller model.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct WarmStart {
    pub ar: Vec<f64>,
    pub ma: Vec<f64>,
    pub constant: Option<f64>,
}

impl From<&ArimaModel> for WarmStart {
    fn from(m: &ArimaModel) -> Self {
        Self {
            ar: m.ar.clone(),
            ma: m.ma.clone(),
            constant: m.constant,
        }
    }
}

/// [`fit_with`] with additional starting points.
pub fn fit_from(
    series: &TimeSeries,
    order: ArimaOrder,
    opts: &FitOptions,
    warm: &[WarmStart],
) -> Result<ArimaModel> {
    let n = series.len();
    let ArimaOrder { p, d, q } = order;
    let needed = min_effective_length(order);
    if n <= d || n - d < needed {
        return Err(Error::InsufficientData(format!(
            "order {order} needs at least {needed} observations after differencing, have {}",
            n.saturating_sub(d)
        )));
    }
    let w = difference(series.values(), d)?;
    let n_eff = w.len();
    let constant = opts.constant_for(d);
    let k = parameter_count(order, constant);
    if n_eff <= k + 1 {
        return Err(Error::InsufficientData(format!(
            "order {order} has {k} parameters for {n_eff} observations"
        )));
    }

    let mean0 = w.iter().sum::<f64>() / n_eff as f64;
    let sd = (w.iter().map(|v| (v - mean0).powi(2)).sum::<f64>() / n_eff as f64).sqrt();
    let mean_scale = if sd > 0.0 { sd / (n_eff as f64).sqrt() } else { 1.0 };
    let layout = Layout {
        p,
        q,
        constant,
        invertible: opts.enforce_invertibility,
        mean0,
        mean_scale,
    };
    let dim = layout.dim();

    let objective = |x: &[f64]| -> f64 {
        let (ar, ma, mu) = layout.decode(x);
        neg_concentrated_loglik(&ar, &ma, mu.unwrap_or(0.0), &w)
    };

    let mut starts = css_starts(&layout, &w, opts);
    starts.push(vec![0.0; dim]);
    for ws in warm {
        if ws.ar.len() > p || ws.ma.len() > q {
            continue;
        }
        let mut ar = ws.ar.clone();
        ar.resize(p, 0.0);
        let mut ma = ws.ma.clone();
        ma.resize(q, 0.0);
        starts.extend(layout.encode(&ar, &ma, ws.constant));
    }

    // Seeded from the order so repeated fits are bit-identical.
    let mut rng = ChaCha8Rng::seed_from_u64(
        opts.seed.rotate_left(48) ^ ((p as u64) << 32) ^ ((q as u64) << 16) ^ d as u64,
    );
    if p + q > 0 {
        for _ in 0..opts.random_starts {
            let mut x: Vec<f64> = (0..p + q).map(|_| rng.random_range(-2.0..2.0)).collect();
            if constant {
                x.push(0.0);
            }
            starts.push(x);
        }
    }
    let mut evaluations = 0usize;
    let mut best: Option<(Vec<f64>, f64, bool)> = None;
    for start in starts {
        let mut nm = NelderMeadOptions {
            rel_tol: opts.rel_tol,
            max_evals: opts.max_evals,
            step: vec![0.3; dim],
        };
        let mut res = nelder_mead(objective, &start, &nm);
        evaluations += res.evals;
        for _ in 0..opts.restarts {
            nm.step = (0..dim).map(|_| rng.random_range(0.05..0.15)).collect();
            let again = nelder_mead(objective, &res.x, &nm);
            evaluations += again.evals;
            let improved = res.f - again.f > opts.rel_tol * (res.f.abs() + 1.0);
            if again.f <= res.f {
                res = again;
            }
            if !improved {
                break;
            }
        }
        let better = match &best {
            None => true,
            Some((_, f, _)) => res.f < *f,
        };
        if better {
            best = Some((res.x, res.f, res.converged));
        }
    }
    let (x, f, converged) = best.expect("at least one start");
    if !f.is_finite() {
        return Err(Error::Domain(format!(
            "likelihood could not be evaluated for order {order}"
        )));
    }

    let (ar, ma, constant_value) = layout.decode(&x);
    let model = build_model(series, order, ar, ma, constant_value, &w, evaluations, opts)?;
    if !converged {
        return Err(Error::Convergence {
            restarts: opts.restarts,
            best_objective: f,
            best: Box::new(model),
        });
    }
    Ok(model)
}

fn css_starts(layout: &Layout, w: &[f64], opts: &FitOptions) -> Vec<Vec<f64>> {
    let (p, q) = (layout.p, layout.q);
    if p + q == 0 {
        return Vec::new();
    }
    let dim = p + q + usize::from(layout.constant);
    let css = |x: &[f64]| -> f64 {
        let mu = if layout.constant {
            layout.mean0 + layout.mean_scale * x[p + q]
        } else {
            0.0
        };
        css_residuals(&x[..p], &x[p..p + q], mu, w)
            .iter()
            .map(|e| e * e)
            .sum()
    };
    let res = nelder_mead(
        css,
        &vec![0.0; dim],
        &NelderMeadOptions {
            rel_tol: opts.rel_tol,
            max_evals: opts.max_evals,
            step: vec![0.1; dim],
        },
    );
    let mu = layout
        .constant
        .then(|| layout.mean0 + layout.mean_scale * res.x[p + q]);
    let ar = &res.x[..p];
    let ma_raw = &res.x[p..p + q];
    let ar_start = if transform::ar_to_free(ar, ROOT_RADIUS).is_some() {
        ar.to_vec()
    } else {
        vec![0.0; p]
    };
    let admissible = |ma: &[f64]| !layout.invertible || transform::ma_to_free(ma, ROOT_RADIUS).is_some();
    let mut starts = Vec::new();
    if admissible(ma_raw) {
        starts.extend(layout.encode(&ar_start, ma_raw, mu));
    } else {
        // Both the reflected MA part and a zero MA part seed the search.
        let reflected = poly::invert_ma(ma_raw);
        if admissible(&reflected) {
            starts.extend(layout.encode(&ar_start, &reflected, mu));
        }
        starts.extend(layout.encode(&ar_start, &vec![0.0; q], mu));
    }
    starts
}

#[allow(clippy::too_many_arguments)]
fn build_model(
    series: &TimeSeries,
    order: ArimaOrder,
    ar: Vec<f64>,
    ma: Vec<f64>,
    constant: Option<f64>,
    w: &[f64],
    evaluations: usize,
    opts: &FitOptions,
) -> Result<ArimaModel> {
    let ss = StateSpace::new(&ar, &ma)
        .ok_or_else(|| Error::Domain("fitted AR part is not stationary".into()))?;
    let mu = constant.unwrap_or(0.0);
    let centred: Vec<f64> = w.iter().map(|v| v - mu).collect();
    let out = ss.filter(&centred);
    let sigma2 = out.sigma2_hat();
    if !(sigma2 > 0.0) {
        return Err(Error::DegenerateSeries(
            "fitted innovation variance is zero".into(),
        ));
    }
    let loglik = out.concentrated_log_likelihood();
    let k = parameter_count(order, constant.is_some());
    let n_eff = w.len();
    let fitted = w
        .iter()
        .zip(&out.innovations)
        .map(|(y, v)| y - v)
        .collect();
    let stderr = standard_errors(&ar, &ma, constant, w, opts.enforce_invertibility);
    let min_root = poly::min_ar_root(&ar).min(if opts.enforce_invertibility {
        poly::min_ma_root(&ma)
    } else {
        f64::INFINITY
    });
    Ok(ArimaModel {
        order,
        ar,
        ma,
        constant,
        sigma2,
        loglik,
        aic: aic(loglik, k),
        aicc: aicc(loglik, k, n_eff)?,
        n_effective: n_eff,
        residuals: out.innovations,
        fitted,
        stderr,
        near_boundary: min_root < ROOT_RADIUS * 1.001,
        evaluations,
        series: series.clone(),
    })
}

/// Standard errors from the inverse central-difference Hessian of the
/// negative concentrated log-likelihood in the raw coefficients.
fn standard_errors(
    ar: &[f64],
    ma: &[f64],
    constant: Option<f64>,
    w: &[f64],
    _invertible: bool,
) -> Vec<Option<f64>> {
    let p = ar.len();
    let q = ma.len();
    let mut theta: Vec<f64> = ar.iter().chain(ma).copied().collect();
    if let Some(c) = constant {
        theta.push(c);
    }
    let dim = theta.len();
    if dim == 0 {
        return Vec::new();
    }
    let sd = {
        let m = w.iter().sum::<f64>() / w.len() as f64;
        (w.iter().map(|v| (v - m).powi(2)).sum::<f64>() / w.len() as f64).sqrt()
    };
    let f = |x: &[f64]| -> f64 {
        let mu = if constant.is_some() { x[p + q] } else { 0.0 };
        neg_concentrated_loglik(&x[..p], &x[p..p + q], mu, w)
    };
    let h: Vec<f64> = (0..dim)
        .map(|i| {
            if i < p + q {
                1e-4
            } else {
                1e-4 * sd.max(1e-8)
            }
        })
        .collect();
    let f0 = f(&theta);
    let mut hess = DMatrix::<f64>::zeros(dim, dim);
    let mut x = theta.clone();
    for i in 0..dim {
        x[i] = theta[i] + h[i];
        let fp = f(&x);
        x[i] = theta[i] - h[i];
        let fm = f(&x);
        x[i] = theta[i];
        hess[(i, i)] = (fp - 2.0 * f0 + fm) / (h[i] * h[i]);
        for j in 0..i {
            let mut corner = |si: f64, sj: f64| {
                x[i] = theta[i] + si * h[i];
                x[j] = theta[j] + sj * h[j];
                let v = f(&x);
                x[i] = theta[i];
                x[j] = theta[j];
                v
            };
            let v = (corner(1.0, 1.0) - corner(1.0, -1.0) - corner(-1.0, 1.0)
                + corner(-1.0, -1.0))
                / (4.0 * h[i] * h[j]);
            hess[(i, j)] = v;
            hess[(j, i)] = v;
        }
    }
    if hess.iter().any(|v| !v.is_finite()) {
        return vec![None; dim];
    }
    match hess.try_inverse() {
        Some(cov) => (0..dim)
            .map(|i| {
                let v = cov[(i, i)];
                (v > 0.0 && v.is_finite()).then(|| v.sqrt())
            })
            .collect(),
        None => vec![None; dim],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::NaiveDate;

    fn series(values: Vec<f64>) -> TimeSeries {
        TimeSeries::from_values(NaiveDate::from_ymd_opt(2020, 1, 1).unwrap(), values, "t").unwrap()
    }

    #[test]
    fn aicc_hand_value() {
        let v = aicc(-10.0, 2, 20).unwrap();
        assert!((v - (24.0 + 12.0 / 17.0)).abs() < 1e-12);
        assert!(aicc(-10.0, 3, 4).is_err());
        let big = aicc(-10.0, 2, 1_000_000).unwrap();
        assert!((big - aic(-10.0, 2)).abs() < 1e-4);
    }

    #[test]
    fn order_parsing() {
        assert_eq!("4,2,4".parse::<ArimaOrder>().unwrap(), ArimaOrder::new(4, 2, 4));
        assert_eq!("(1, 2, 1)".parse::<ArimaOrder>().unwrap(), ArimaOrder::new(1, 2, 1));
        assert!("1,2".parse::<ArimaOrder>().is_err());
        assert_eq!(ArimaOrder::new(6, 2, 3).to_string(), "(6,2,3)");
    }

    #[test]
    fn white_noise_likelihood_closed_form() {
        let y = [0.3, -1.2, 0.8, 2.0, -0.4];
        let s2 = 1.7;
        let ll = log_likelihood(ArimaOrder::new(0, 0, 0), &[], &[], None, s2, &y).unwrap();
        let expect: f64 = y
            .iter()
            .map(|v| -0.5 * (2.0 * std::f64::consts::PI * s2).ln() - v * v / (2.0 * s2))
            .sum();
        assert!((ll - expect).abs() < 1e-12);
    }

    #[test]
    fn ar1_likelihood_closed_form() {
        // Exact AR(1): y1 ~ N(0, s2/(1-phi^2)), y_t | y_{t-1} ~ N(phi y_{t-1}, s2).
        let y = [0.5, 1.1, -0.3, 0.2, 0.9];
        let (phi, s2) = (0.5, 1.3);
        let ll = log_likelihood(ArimaOrder::new(1, 0, 0), &[phi], &[], None, s2, &y).unwrap();
        let ln2pi = (2.0 * std::f64::consts::PI).ln();
        let v1 = s2 / (1.0 - phi * phi);
        let mut expect = -0.5 * (ln2pi + v1.ln() + y[0] * y[0] / v1);
        for t in 1..y.len() {
            let e = y[t] - phi * y[t - 1];
            expect += -0.5 * (ln2pi + s2.ln() + e * e / s2);
        }
        assert!((ll - expect).abs() < 1e-12, "{ll} vs {expect}");
    }

    #[test]
    fn nonstationary_likelihood_is_domain_error() {
        let r = log_likelihood(ArimaOrder::new(1, 0, 0), &[1.01], &[], None, 1.0, &[1.0, 2.0]);
        assert!(matches!(r, Err(Error::Domain(_))));
    }

    #[test]
    fn css_examples() {
        let y = [1.0, 3.0, 2.0, 5.0];
        let white = css_objective(ArimaOrder::new(0, 0, 0), &[], &[], None, &y).unwrap();
        assert_eq!(white, 1.0 + 9.0 + 4.0 + 25.0);
        // AR(1) with unit coefficient: residuals are first differences.
        let rw = css_objective(ArimaOrder::new(1, 0, 0), &[1.0], &[], None, &y).unwrap();
        assert_eq!(rw, 4.0 + 1.0 + 9.0);
    }

    #[test]
    fn pure_differencing_has_closed_form_variance() {
        let y: Vec<f64> = (0..30).map(|i| ((i * i) as f64 * 0.37).sin() * 5.0 + i as f64).collect();
        let m = fit(&series(y.clone()), ArimaOrder::new(0, 2, 0), false).unwrap();
        let w = difference(&y, 2).unwrap();
        let s2 = w.iter().map(|v| v * v).sum::<f64>() / w.len() as f64;
        assert!((m.sigma2 - s2).abs() < 1e-10 * s2);
        assert!(m.stderr.is_empty());
        assert_eq!(m.n_effective, 28);
        assert_eq!(m.residuals.len(), 28);
    }

    #[test]
    fn insufficient_data() {
        let r = fit(&series(vec![1.0, 2.0, 4.0, 3.0, 5.0, 6.0, 9.0, 8.0, 7.0]), ArimaOrder::new(1, 2, 1), false);
        assert!(matches!(r, Err(Error::InsufficientData(_))));
    }

    #[test]
    fn aicc_exceeds_aic() {
        let s = simulate(ArimaOrder::new(1, 0, 0), &[0.4], &[], 0.0, 1.0, 80, 3).unwrap();
        let m = fit(&s, ArimaOrder::new(1, 0, 0), true).unwrap();
        assert!(m.aicc > m.aic);
        assert_eq!(m.n_params(), 3);
        assert_eq!(m.stderr.len(), 2);
    }
}
