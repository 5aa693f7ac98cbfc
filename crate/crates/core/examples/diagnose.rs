//! Residual diagnostics: Ljung-Box over the standard lag schedule, ARCH LM
//! and the correlogram whiteness verdict.

use epiarima::diagnostics::diagnose;
use epiarima::estimation::{fit, ArimaOrder};
use epiarima::ingest::Country;

fn main() -> epiarima::Result<()> {
    let model = fit(&Country::Italy.window().series, ArimaOrder::new(4, 2, 4), false)?;
    let report = diagnose(&model, None)?;

    println!("Ljung-Box, fitdf = {}", report.fitdf);
    for lb in &report.ljung_box {
        println!(
            "  {:<18} Q = {:>7.3}  df = {:>2}  p = {:.3}",
            lb.label, lb.result.statistic, lb.result.df, lb.result.p_value
        );
    }
    for a in &report.arch_lm {
        println!("ARCH LM lag {:>2}: {:>7.3}  p = {:.3}", a.lag, a.statistic, a.p_value);
    }
    let w = &report.whiteness;
    println!("whiteness {}; ACF outside band at {:?}", if w.pass { "passes" } else { "fails" }, w.offending_acf_lags);
    Ok(())
}
