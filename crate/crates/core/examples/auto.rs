//! Order selection by AICc: a stepwise walk with `d` picked by KPSS, then a
//! small exhaustive grid with `d` fixed at 2.

use epiarima::ingest::Country;
use epiarima::selection::{grid_search, stepwise_search, SearchConfig};

fn main() -> epiarima::Result<()> {
    let window = Country::Russia.window();
    let series = &window.series;

    let sw = stepwise_search(series, &SearchConfig::default())?;
    println!("stepwise: ARIMA{} AICc {:.2} after {} fits", sw.best.order, sw.best.aicc, sw.visited.len());

    let config = SearchConfig {
        max_p: 3,
        max_q: 3,
        fixed_d: Some(2),
        ..SearchConfig::default()
    };
    let grid = grid_search(series, &config)?;
    println!("grid (p, q <= 3, d = 2), {} fits:", grid.rows.len());
    for row in grid.top(5) {
        println!(
            "  ARIMA{}  AICc {:>8.2}  MAPE {:>6.2}%  MASE {:.3}",
            row.order,
            row.aicc,
            row.mape.unwrap_or(f64::NAN),
            row.mase.unwrap_or(f64::NAN)
        );
    }
    Ok(())
}
