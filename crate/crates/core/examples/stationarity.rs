//! KPSS tests on a bundled series and its differences, and the resulting
//! differencing order.

use epiarima::ingest::Country;
use epiarima::series::difference;
use epiarima::stationarity::{choose_d, kpss_test, NullKind};

fn main() -> epiarima::Result<()> {
    let series = Country::Usa.window().series;
    for d in 0..=2 {
        let w = difference(series.values(), d)?;
        let level = kpss_test(&w, NullKind::Level)?;
        let trend = kpss_test(&w, NullKind::Trend)?;
        println!(
            "d = {d}: level {:.3} (reject {}), trend {:.3} (reject {})",
            level.statistic, level.reject_at_5pct, trend.statistic, trend.reject_at_5pct
        );
    }
    println!("chosen d = {}", choose_d(&series, 2, 0.05)?);
    Ok(())
}
