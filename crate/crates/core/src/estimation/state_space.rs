//! ARMA(p, q) in state-space form and the exact-likelihood Kalman filter.
//!
//! The state has dimension `r = max(p, q + 1)`; the observation is the first
//! state element. Covariances are kept in units of the innovation variance so
//! that the variance can be concentrated out of the likelihood.

use std::f64::consts::PI;

use super::poly::arma_autocovariance;

/// Transition and initial covariance of a stationary ARMA process.
#[derive(Debug, Clone)]
pub struct StateSpace {
    r: usize,
    /// AR coefficients padded to length `r`.
    phi: Vec<f64>,
    /// `(1, ma_1, .., ma_{r-1})`, zero padded.
    theta: Vec<f64>,
    /// Stationary state covariance, row-major `r x r`.
    p0: Vec<f64>,
}

impl StateSpace {
    /// Returns `None` when the AR part is not stationary.
    pub fn new(ar: &[f64], ma: &[f64]) -> Option<Self> {
        let p = ar.len();
        let q = ma.len();
        let r = p.max(q + 1);
        let mut phi = vec![0.0; r];
        phi[..p].copy_from_slice(ar);
        let mut theta = vec![0.0; r];
        theta[0] = 1.0;
        theta[1..=q].copy_from_slice(ma);

        if !super::transform::is_stationary(ar) {
            return None;
        }
        let gamma = arma_autocovariance(ar, ma, r)?;
        let psi = super::poly::psi_weights(ar, ma, r + 1);
        let p0 = initial_covariance(&phi, &theta, &gamma, &psi);
        if p0.iter().any(|v| !v.is_finite()) || p0[0] <= 0.0 {
            return None;
        }
        Some(Self { r, phi, theta, p0 })
    }

    pub fn dim(&self) -> usize {
        self.r
    }

    /// Stationary covariance of the state vector.
    pub fn initial_covariance(&self) -> &[f64] {
        &self.p0
    }

    /// `T a` for the companion-style transition.
    fn transition(&self, a: &[f64], out: &mut [f64]) {
        let r = self.r;
        for i in 0..r {
            let next = if i + 1 < r { a[i + 1] } else { 0.0 };
            out[i] = self.phi[i] * a[0] + next;
        }
    }

    /// `T M T' + R R'` exploiting the sparse transition.
    fn propagate(&self, m: &[f64], scratch: &mut [f64], out: &mut [f64]) {
        let r = self.r;
        // scratch = T M
        for i in 0..r {
            for j in 0..r {
                let below = if i + 1 < r { m[(i + 1) * r + j] } else { 0.0 };
                scratch[i * r + j] = self.phi[i] * m[j] + below;
            }
        }
        // out = scratch T' + R R'
        for i in 0..r {
            for j in 0..r {
                let right = if j + 1 < r { scratch[i * r + j + 1] } else { 0.0 };
                out[i * r + j] =
                    self.phi[j] * scratch[i * r] + right + self.theta[i] * self.theta[j];
            }
        }
    }

    /// Runs the prediction-error decomposition over mean-adjusted data.
    pub fn filter(&self, centred: &[f64]) -> FilterOutput {
        let r = self.r;
        let mut a = vec![0.0; r];
        let mut p = self.p0.clone();
        let mut a_upd = vec![0.0; r];
        let mut p_upd = vec![0.0; r * r];
        let mut scratch = vec![0.0; r * r];
        let mut p_next = vec![0.0; r * r];
        let mut innovations = Vec::with_capacity(centred.len());
        let mut variances = Vec::with_capacity(centred.len());
        let mut steady = false;

        for &y in centred {
            let v = y - a[0];
            let f = p[0];
            innovations.push(v);
            variances.push(f);
            for i in 0..r {
                a_upd[i] = a[i] + p[i * r] * v / f;
            }
            self.transition(&a_upd, &mut a);
            if steady {
                continue;
            }
            for i in 0..r {
                for j in 0..r {
                    p_upd[i * r + j] = p[i * r + j] - p[i * r] * p[j * r] / f;
                }
            }
            self.propagate(&p_upd, &mut scratch, &mut p_next);
            let scale = p_next.iter().fold(1.0_f64, |m, v| m.max(v.abs()));
            let change = p_next
                .iter()
                .zip(&p)
                .fold(0.0_f64, |m, (x, y)| m.max((x - y).abs()));
            std::mem::swap(&mut p, &mut p_next);
            if change <= 1e-15 * scale {
                steady = true;
            }
        }
        FilterOutput {
            innovations,
            variances,
            next_state: a,
            next_covariance: p,
        }
    }
}

/// Stationary covariance of the state, built from the process
/// autocovariances and the innovation/observation cross-covariances.
fn initial_covariance(phi: &[f64], theta: &[f64], gamma: &[f64], psi: &[f64]) -> Vec<f64> {
    let r = phi.len();
    let g = |k: usize| gamma[k];
    // Cov(y_{t-1-m}, eps_{t-n}) = psi_{n-1-m} when n > m.
    let cross = |m: usize, n: usize| if n > m { psi[n - 1 - m] } else { 0.0 };
    let mut out = vec![0.0; r * r];
    for i in 0..r {
        for j in i..r {
            let mut s = 0.0;
            for m in 0..(r - i) {
                for n in 0..(r - j) {
                    let (pi, pj) = (phi[i + m], phi[j + n]);
                    let (ti, tj) = (theta[i + m], theta[j + n]);
                    s += pi * pj * g(m.abs_diff(n));
                    s += pi * tj * cross(m, n);
                    s += ti * pj * cross(n, m);
                    if m == n {
                        s += ti * tj;
                    }
                }
            }
            out[i * r + j] = s;
            out[j * r + i] = s;
        }
    }
    out
}

/// Innovations `v_t`, their relative variances `F_t` (in units of the
/// innovation variance) and the one-step-ahead predicted state after the
/// last observation.
#[derive(Debug, Clone)]
pub struct FilterOutput {
    pub innovations: Vec<f64>,
    pub variances: Vec<f64>,
    pub next_state: Vec<f64>,
    pub next_covariance: Vec<f64>,
}

impl FilterOutput {
    /// `sum v_t^2 / F_t`.
    pub fn weighted_ssq(&self) -> f64 {
        self.innovations
            .iter()
            .zip(&self.variances)
            .map(|(v, f)| v * v / f)
            .sum()
    }

    pub fn sum_log_variances(&self) -> f64 {
        self.variances.iter().map(|f| f.ln()).sum()
    }

    /// Gaussian log-likelihood at a given innovation variance.
    pub fn log_likelihood(&self, sigma2: f64) -> f64 {
        let n = self.innovations.len() as f64;
        -0.5 * (n * (2.0 * PI * sigma2).ln() + self.sum_log_variances() + self.weighted_ssq() / sigma2)
    }

    /// Maximum-likelihood innovation variance.
    pub fn sigma2_hat(&self) -> f64 {
        self.weighted_ssq() / self.innovations.len() as f64
    }

    /// Log-likelihood with the innovation variance concentrated out.
    pub fn concentrated_log_likelihood(&self) -> f64 {
        let n = self.innovations.len() as f64;
        let s2 = self.sigma2_hat();
        -0.5 * (n * ((2.0 * PI * s2).ln() + 1.0) + self.sum_log_variances())
    }
}
