use chrono::NaiveDate;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::transform::{is_invertible, is_stationary};
use super::ArimaOrder;
use crate::error::{Error, Result};
use crate::series::{integrate, TimeSeries};

/// Observations discarded before the returned sample starts.
pub const BURN_IN: usize = 200;

/// Simulates an ARIMA process with Gaussian innovations.
///
/// `constant` is the mean of the stationary (differenced) component. The
/// ARMA part runs for [`BURN_IN`] steps before the sample is kept, then the
/// sample is integrated `d` times from zero. Dates start on 2020-01-01.
pub fn simulate(
    order: ArimaOrder,
    ar: &[f64],
    ma: &[f64],
    constant: f64,
    sigma2: f64,
    n: usize,
    seed: u64,
) -> Result<TimeSeries> {
    order.check_coefficients(ar, ma)?;
    if n == 0 {
        return Err(Error::Validation("simulation length must be positive".into()));
    }
    if !(sigma2 >= 0.0 && sigma2.is_finite()) {
        return Err(Error::Domain(format!("innovation variance {sigma2} is invalid")));
    }
    if !is_stationary(ar) {
        return Err(Error::Domain("AR coefficients are not stationary".into()));
    }
    if !is_invertible(ma) {
        return Err(Error::Domain("MA coefficients are not invertible".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sd = sigma2.sqrt();
    let total = BURN_IN + n;
    let mut eps = Vec::with_capacity(total);
    let mut x = Vec::with_capacity(total);
    for t in 0..total {
        let z: f64 = StandardNormal.sample(&mut rng);
        let e = sd * z;
        let mut v = e;
        for (i, a) in ar.iter().enumerate() {
            if t > i {
                v += a * x[t - i - 1];
            }
        }
        for (j, m) in ma.iter().enumerate() {
            if t > j {
                v += m * eps[t - j - 1];
            }
        }
        eps.push(e);
        x.push(v);
    }
    let w: Vec<f64> = x[BURN_IN..].iter().map(|v| v + constant).collect();
    let values = integrate(&w, &vec![0.0; order.d], order.d)?;
    let start = NaiveDate::from_ymd_opt(2020, 1, 1).expect("valid date");
    TimeSeries::from_values(start, values, "simulated")
}
