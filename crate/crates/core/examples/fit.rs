//! Fit a fixed ARIMA order to the bundled Italy window and print the
//! coefficient block.
//!
//! ```text
//! cargo run --example fit
//! ```

use epiarima::estimation::{fit, ArimaOrder};
use epiarima::ingest::Country;

fn main() -> epiarima::Result<()> {
    let window = Country::Italy.window();
    let model = fit(&window.series, ArimaOrder::new(4, 2, 4), false)?;

    println!("{} ARIMA{} on {} days", window.label, model.order, window.series.len());
    for (name, est, se) in model.coefficient_table() {
        let se = se.map(|s| format!("{s:.4}")).unwrap_or_else(|| "NA".into());
        println!("  {name:<6} {est:>9.4}  (se {se})");
    }
    println!("sigma2 = {:.1}", model.sigma2);
    println!("loglik = {:.3}, AIC = {:.3}, AICc = {:.3}", model.loglik, model.aic, model.aicc);
    println!("optimizer evaluations: {}", model.evaluations);
    Ok(())
}
