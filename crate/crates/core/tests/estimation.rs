use nalgebra::{DMatrix, DVector};

use epiarima::correlogram::acf;
use epiarima::estimation::optim::{nelder_mead, NelderMeadOptions};
use epiarima::estimation::{aic, aicc, css_objective, fit, log_likelihood, simulate, ArimaOrder};
use epiarima::ingest::Country;
use epiarima::TimeSeries;

#[test]
fn ma1_matches_dense_covariance() {
    let theta = 0.3;
    let x = [0.4, -1.1, 0.7, 2.0];
    let sigma2 = 1.5;
    let cov: DMatrix<f64> = DMatrix::from_fn(4, 4, |i, j| match i.abs_diff(j) {
        0 => sigma2 * (1.0 + theta * theta),
        1 => sigma2 * theta,
        _ => 0.0,
    });
    let chol = cov.clone().cholesky().unwrap();
    let xv = DVector::from_column_slice(&x);
    let quad = xv.dot(&chol.solve(&xv));
    let dense = -0.5 * (4.0 * (2.0 * std::f64::consts::PI).ln() + cov.determinant().ln() + quad);
    let ours = log_likelihood(ArimaOrder::new(0, 0, 1), &[], &[theta], None, sigma2, &x).unwrap();
    assert!((ours - dense).abs() < 1e-10);
}

#[test]
fn differencing_consistency() {
    let order = ArimaOrder::new(1, 1, 1);
    let s = simulate(order, &[0.4], &[0.3], 0.0, 1.0, 300, 21).unwrap();
    let diffed = s.differenced(1).unwrap();
    let a = fit(&s, order, false).unwrap();
    let b = fit(&diffed, ArimaOrder::new(1, 0, 1), false).unwrap();
    assert!((a.ar[0] - b.ar[0]).abs() < 1e-4, "{} vs {}", a.ar[0], b.ar[0]);
    assert!((a.ma[0] - b.ma[0]).abs() < 1e-4, "{} vs {}", a.ma[0], b.ma[0]);
}

#[test]
fn hessian_stderr_matches_asymptotics() {
    let phi = 0.6;
    let n = 2000;
    let s = simulate(ArimaOrder::new(1, 0, 0), &[phi], &[], 0.0, 1.0, n, 22).unwrap();
    let m = fit(&s, ArimaOrder::new(1, 0, 0), false).unwrap();
    let se = m.stderr[0].expect("standard error available");
    let theory = ((1.0 - phi * phi) / n as f64).sqrt();
    assert!((se / theory - 1.0).abs() < 0.25, "{se} vs {theory}");
}

#[test]
fn residual_mean_small_with_constant() {
    let s = simulate(ArimaOrder::new(1, 0, 1), &[0.5], &[0.2], 10.0, 4.0, 400, 23).unwrap();
    let m = fit(&s, ArimaOrder::new(1, 0, 1), true).unwrap();
    let mean = m.residuals.iter().sum::<f64>() / m.residuals.len() as f64;
    assert!(mean.abs() <= 0.1 * m.sigma2.sqrt());
    assert!((m.constant.unwrap() - 10.0).abs() < 0.5);
    assert_eq!(m.residuals.len(), m.n_effective);
}

#[test]
fn residuals_are_observed_minus_fitted_on_differenced_scale() {
    let s = simulate(ArimaOrder::new(2, 1, 0), &[0.5, -0.3], &[], 0.0, 1.0, 120, 24).unwrap();
    let m = fit(&s, ArimaOrder::new(2, 1, 0), false).unwrap();
    let w = m.differenced();
    for ((r, f), y) in m.residuals.iter().zip(&m.fitted).zip(&w) {
        assert!((r - (y - f)).abs() < 1e-9);
    }
}

fn options(n: usize) -> NelderMeadOptions {
    NelderMeadOptions {
        rel_tol: 1e-12,
        max_evals: 20_000,
        step: vec![0.1; n],
    }
}

#[test]
fn css_start_lies_in_mle_basin() {
    let order = ArimaOrder::new(1, 0, 1);
    for seed in 0..20 {
        let s = simulate(order, &[0.5], &[0.4], 0.0, 1.0, 200, 100 + seed).unwrap();
        let y = s.values();
        let css = nelder_mead(
            |x| css_objective(order, &x[..1], &x[1..], None, y).unwrap(),
            &[0.0, 0.0],
            &options(2),
        );
        // Refine the exact likelihood from the CSS optimum alone.
        let start = [css.x[0], css.x[1], (css.f / y.len() as f64).ln()];
        let nll = |x: &[f64]| {
            if x[0].abs() >= 1.0 || x[1].abs() >= 1.0 {
                return f64::INFINITY;
            }
            -log_likelihood(order, &x[..1], &x[1..2], None, x[2].exp(), y).unwrap()
        };
        let local = nelder_mead(nll, &start, &options(3));
        let global = fit(&s, order, false).unwrap();
        assert!((local.f + global.loglik).abs() < 1e-4, "seed {seed}: {} vs {}", -local.f, global.loglik);
    }
}

#[test]
fn information_criteria() {
    assert!((aicc(-10.0, 2, 20).unwrap() - (24.0 + 12.0 / 17.0)).abs() < 1e-12);
    for n in [5usize, 10, 100, 10_000] {
        assert!(aicc(-3.0, 3, n).unwrap() > aic(-3.0, 3));
    }
    assert!((aicc(-3.0, 3, 10_000_000).unwrap() - aic(-3.0, 3)).abs() < 1e-4);
    assert!(aicc(-3.0, 3, 4).is_err());
}

#[test]
fn simulated_moments() {
    let wn = simulate(ArimaOrder::new(0, 0, 0), &[], &[], 0.0, 1.0, 100_000, 25).unwrap();
    let v = wn.values();
    let mean = v.iter().sum::<f64>() / v.len() as f64;
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / v.len() as f64;
    assert!((var - 1.0).abs() < 0.02);

    let ar = simulate(ArimaOrder::new(1, 0, 0), &[0.9], &[], 0.0, 1.0, 100_000, 26).unwrap();
    assert!((acf(ar.values(), 1).unwrap().coefficients[0] - 0.9).abs() < 0.03);
}

#[test]
fn noise_free_simulation_is_constant() {
    let s = simulate(ArimaOrder::new(1, 0, 1), &[0.3], &[0.2], 4.5, 0.0, 30, 0).unwrap();
    assert!(s.values().iter().all(|v| *v == 4.5));
}

#[test]
fn italy_coefficients_near_published() {
    let m = fit(&Country::Italy.window().series, ArimaOrder::new(4, 2, 4), false).unwrap();
    assert!((m.ar[0] - 0.9029).abs() <= 0.15, "{}", m.ar[0]);
    assert!((m.ma[0] - -2.0183).abs() <= 0.15, "{}", m.ma[0]);
    assert!((m.aicc - 787.78).abs() <= 2.0, "{}", m.aicc);
}

#[test]
fn fits_are_deterministic() {
    let s: TimeSeries = Country::Russia.window().series;
    let a = fit(&s, ArimaOrder::new(2, 2, 2), false).unwrap();
    let b = fit(&s, ArimaOrder::new(2, 2, 2), false).unwrap();
    assert_eq!(a, b);
}
