//! Thirty-day forecast with 80% and 95% intervals, the first near-zero day
//! and the projected final size.

use epiarima::estimation::{fit, ArimaOrder};
use epiarima::forecast::{final_size, forecast};
use epiarima::ingest::Country;

fn main() -> epiarima::Result<()> {
    let window = Country::Russia.window();
    let model = fit(&window.series, ArimaOrder::new(1, 2, 1), false)?;
    let fc = forecast(&model, 30, &[0.8, 0.95])?;
    let i95 = fc.interval(0.95).expect("requested level");

    println!("{:<12} {:>9} {:>19}", "date", "mean", "95% interval");
    for j in (0..fc.horizon).step_by(5) {
        println!(
            "{:<12} {:>9.0} [{:>8.0}, {:>8.0}]",
            fc.dates[j], fc.mean[j], i95.lower[j], i95.upper[j]
        );
    }

    let observed: f64 = window.series.values().iter().sum();
    let size = final_size(&model, observed, 1.0, 365)?;
    match size.crossing_date {
        Some(d) => println!("mean falls below one case on {d}"),
        None => println!("mean stays above one case for {} days", size.days),
    }
    println!("projected final size: {:.0}", size.projected_total);
    Ok(())
}
