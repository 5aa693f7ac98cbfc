use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use epiarima::estimation::{simulate, ArimaOrder};
use epiarima::stationarity::{choose_d, kpss_test, NullKind};
use epiarima::TimeSeries;

fn noise(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.sample(StandardNormal)).collect()
}

fn cumsum(x: &[f64]) -> Vec<f64> {
    x.iter()
        .scan(0.0, |s, v| {
            *s += v;
            Some(*s)
        })
        .collect()
}

#[test]
fn noise_is_rarely_rejected() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let accepted = (0..500)
        .filter(|_| !kpss_test(&noise(&mut rng, 200), NullKind::Level).unwrap().reject_at_5pct)
        .count();
    assert!(accepted >= 450, "{accepted}");
}

#[test]
fn random_walk_is_usually_rejected() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let rejected = (0..500)
        .filter(|_| kpss_test(&cumsum(&noise(&mut rng, 200)), NullKind::Level).unwrap().reject_at_5pct)
        .count();
    assert!(rejected >= 450, "{rejected}");
}

#[test]
fn trend_null_accepts_a_trend() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let x: Vec<f64> = noise(&mut rng, 200).iter().enumerate().map(|(t, e)| 0.5 * t as f64 + e).collect();
    assert!(!kpss_test(&x, NullKind::Trend).unwrap().reject_at_5pct);
    assert!(kpss_test(&x, NullKind::Level).unwrap().reject_at_5pct);
}

#[test]
fn choose_d_on_simulated_processes() {
    let series = |v: Vec<f64>| TimeSeries::from_values(chrono::NaiveDate::from_ymd_opt(2020, 1, 1).unwrap(), v, "s").unwrap();
    let ar = simulate(ArimaOrder::new(1, 0, 0), &[0.5], &[], 0.0, 1.0, 300, 5).unwrap();
    assert_eq!(choose_d(&ar, 2, 0.05).unwrap(), 0);
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let walk = cumsum(&noise(&mut rng, 300));
    assert_eq!(choose_d(&series(walk.clone()), 2, 0.05).unwrap(), 1);
    let twice = cumsum(&cumsum(&noise(&mut rng, 300)));
    assert_eq!(choose_d(&series(twice), 2, 0.05).unwrap(), 2);
}

#[test]
fn reject_flag_matches_critical_value() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for _ in 0..50 {
        let r = kpss_test(&cumsum(&noise(&mut rng, 60)), NullKind::Level).unwrap();
        assert!(r.statistic >= 0.0);
        assert_eq!(r.reject_at_5pct, r.statistic > 0.463);
        assert_eq!(r.critical_values["5%"], 0.463);
    }
}

proptest! {
    #[test]
    fn kpss_invariances(x in prop::collection::vec(-50.0..50.0f64, 20..80), c in -1e3..1e3f64, slope in -5.0..5.0f64) {
        let base = kpss_test(&x, NullKind::Level).unwrap().statistic;
        let shifted: Vec<f64> = x.iter().map(|v| v + c).collect();
        prop_assert!((kpss_test(&shifted, NullKind::Level).unwrap().statistic - base).abs() < 1e-10 * base.max(1.0));

        let trend_base = kpss_test(&x, NullKind::Trend).unwrap().statistic;
        let tilted: Vec<f64> = x.iter().enumerate().map(|(t, v)| v + c + slope * t as f64).collect();
        prop_assert!((kpss_test(&tilted, NullKind::Trend).unwrap().statistic - trend_base).abs() < 1e-10 * trend_base.max(1.0));
    }

    #[test]
    fn choose_d_stays_within_max(x in prop::collection::vec(-50.0..50.0f64, 30..60), max_d in 0usize..=2) {
        let s = TimeSeries::from_values(chrono::NaiveDate::from_ymd_opt(2020, 1, 1).unwrap(), cumsum(&x), "s").unwrap();
        prop_assert!(choose_d(&s, max_d, 0.05).unwrap() <= max_d);
    }
}
