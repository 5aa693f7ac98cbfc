//! Thin wrappers over `statrs` distributions.

use statrs::distribution::{ChiSquared, ContinuousCDF, Normal};

/// Upper-tail probability of a chi-square variate with `df` degrees of freedom.
pub fn chi_square_sf(stat: f64, df: usize) -> f64 {
    if stat <= 0.0 {
        return 1.0;
    }
    let dist = ChiSquared::new(df as f64).expect("df is positive");
    dist.sf(stat).clamp(0.0, 1.0)
}

/// Standard normal quantile.
pub fn normal_quantile(p: f64) -> f64 {
    Normal::new(0.0, 1.0).expect("unit normal").inverse_cdf(p)
}
