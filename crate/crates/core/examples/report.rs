//! Full run report for a bundled dataset, as JSON and long-format CSV.

use epiarima::estimation::ArimaOrder;
use epiarima::ingest::Country;
use epiarima::report::{build_report, OrderChoice, RunConfig};

fn main() -> epiarima::Result<()> {
    let country = Country::Usa;
    let config = RunConfig {
        order: OrderChoice::Fixed {
            order: ArimaOrder::new(2, 2, 4),
        },
        ..RunConfig::default()
    };
    let report = build_report(&country.window(), &config, Some(&country.holdout()))?;

    let json = report.to_json()?;
    println!("JSON report: {} bytes, window sha256 {}", json.len(), report.manifest.window_sha256);
    let csv = report.to_csv()?;
    for line in csv.lines().filter(|l| l.starts_with("deviations,")).take(8) {
        println!("{line}");
    }
    Ok(())
}
