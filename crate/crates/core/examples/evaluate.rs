//! Compare a forecast with the observed days after the window.

use epiarima::estimation::{fit, ArimaOrder};
use epiarima::forecast::forecast;
use epiarima::ingest::Country;
use epiarima::report::checkpoint_deviations;

fn main() -> epiarima::Result<()> {
    let country = Country::Italy;
    let model = fit(&country.window().series, ArimaOrder::new(4, 2, 4), false)?;
    let actuals = country.holdout();
    let fc = forecast(&model, actuals.len(), &[0.95])?;

    for d in checkpoint_deviations(&fc, &actuals, &[10, 20, 30])? {
        println!(
            "{:<17} predicted {:>7.0}  actual {:>7.0}  deviation {:>+6.2}%",
            d.label, d.predicted_total, d.actual_total, d.overall_pct_deviation
        );
    }
    Ok(())
}
