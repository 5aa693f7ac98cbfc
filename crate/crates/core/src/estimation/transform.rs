//! Unconstrained reparameterisation of AR and MA polynomials.
//!
//! Each free parameter passes through `tanh` to a partial autocorrelation in
//! (-1, 1); the Durbin-Levinson step-up recursion then yields a polynomial
//! with all roots outside the unit circle. Rescaling coefficient `k` by
//! `radius^-k` pushes the roots outside `radius`.

/// Roots of fitted polynomials are kept outside this modulus.
pub const ROOT_RADIUS: f64 = 1.001;

fn step_up(partials: &[f64]) -> Vec<f64> {
    let p = partials.len();
    let mut coef = vec![0.0; p];
    let mut work = vec![0.0; p];
    for k in 0..p {
        let a = partials[k];
        coef[k] = a;
        for j in 0..k {
            work[j] = coef[j] - a * coef[k - j - 1];
        }
        coef[..k].copy_from_slice(&work[..k]);
    }
    coef
}

/// Inverse of [`step_up`]; `None` if any partial falls outside (-1, 1).
fn step_down(coef: &[f64]) -> Option<Vec<f64>> {
    let p = coef.len();
    let mut a = coef.to_vec();
    let mut partials = vec![0.0; p];
    for k in (0..p).rev() {
        let pk = a[k];
        if !pk.is_finite() || pk.abs() >= 1.0 {
            return None;
        }
        partials[k] = pk;
        let denom = 1.0 - pk * pk;
        let prev: Vec<f64> = (0..k).map(|j| (a[j] + pk * a[k - j - 1]) / denom).collect();
        a[..k].copy_from_slice(&prev);
    }
    Some(partials)
}

/// AR coefficients (`1 - c_1 B - ...` convention) from free parameters.
pub fn ar_from_free(free: &[f64], radius: f64) -> Vec<f64> {
    let partials: Vec<f64> = free.iter().map(|u| u.tanh()).collect();
    step_up(&partials)
        .into_iter()
        .enumerate()
        .map(|(k, c)| c / radius.powi(k as i32 + 1))
        .collect()
}

/// Free parameters reproducing `ar`, or `None` if its roots are not outside `radius`.
pub fn ar_to_free(ar: &[f64], radius: f64) -> Option<Vec<f64>> {
    let scaled: Vec<f64> = ar
        .iter()
        .enumerate()
        .map(|(k, c)| c * radius.powi(k as i32 + 1))
        .collect();
    let partials = step_down(&scaled)?;
    Some(partials.iter().map(|p| p.atanh()).collect())
}

/// MA coefficients (`1 + c_1 B + ...` convention) from free parameters.
pub fn ma_from_free(free: &[f64], radius: f64) -> Vec<f64> {
    ar_from_free(free, radius).into_iter().map(|c| -c).collect()
}

pub fn ma_to_free(ma: &[f64], radius: f64) -> Option<Vec<f64>> {
    let neg: Vec<f64> = ma.iter().map(|c| -c).collect();
    ar_to_free(&neg, radius)
}

/// All roots of `1 - ar_1 z - ...` strictly outside the unit circle.
pub fn is_stationary(ar: &[f64]) -> bool {
    step_down(ar).is_some()
}

/// All roots of `1 + ma_1 z + ...` strictly outside the unit circle.
pub fn is_invertible(ma: &[f64]) -> bool {
    let neg: Vec<f64> = ma.iter().map(|c| -c).collect();
    step_down(&neg).is_some()
}

#[cfg(test)]
mod tests {
    use super::super::poly::{min_ar_root, min_ma_root};
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn ar1_is_tanh() {
        let ar = ar_from_free(&[0.3], 1.0);
        assert!((ar[0] - 0.3f64.tanh()).abs() < 1e-15);
    }

    #[test]
    fn stationarity_checks() {
        assert!(is_stationary(&[0.5]));
        assert!(!is_stationary(&[1.0]));
        assert!(!is_stationary(&[0.5, 0.6]));
        assert!(is_invertible(&[-0.9]));
        assert!(!is_invertible(&[1.2]));
    }

    proptest! {
        #[test]
        fn mapped_roots_stay_outside_radius(free in proptest::collection::vec(-4.0f64..4.0, 1..7)) {
            let ar = ar_from_free(&free, ROOT_RADIUS);
            prop_assert!(min_ar_root(&ar) > ROOT_RADIUS - 1e-9);
            let ma = ma_from_free(&free, ROOT_RADIUS);
            prop_assert!(min_ma_root(&ma) > ROOT_RADIUS - 1e-9);
        }

        #[test]
        fn free_round_trip(free in proptest::collection::vec(-2.5f64..2.5, 1..7)) {
            let ar = ar_from_free(&free, ROOT_RADIUS);
            let back = ar_to_free(&ar, ROOT_RADIUS).unwrap();
            for (a, b) in free.iter().zip(&back) {
                prop_assert!((a - b).abs() < 1e-6);
            }
        }
    }
}
