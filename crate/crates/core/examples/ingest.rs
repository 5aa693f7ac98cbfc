//! Load a cumulative CSV, convert it to daily counts, cut a window and write
//! it back out.

use std::io::Write;

use epiarima::ingest::{cumulative_to_daily, load_csv, write_csv, DatasetWindow};

fn main() -> epiarima::Result<()> {
    let dir = std::env::temp_dir().join("epiarima-ingest-example");
    std::fs::create_dir_all(&dir)?;
    let path = dir.join("cumulative.csv");
    let mut f = std::fs::File::create(&path)?;
    writeln!(f, "day,total")?;
    let mut total = 0.0;
    for i in 0..60u32 {
        total += (i as f64 * 0.3).exp().min(500.0).round();
        let date = chrono::NaiveDate::from_ymd_opt(2020, 3, 1).unwrap() + chrono::Days::new(i.into());
        writeln!(f, "{date},{total}")?;
    }
    drop(f);

    let cumulative = load_csv(&path, "day", "total", "%Y-%m-%d")?;
    let conv = cumulative_to_daily(&cumulative);
    println!("{} daily values, {} negative", conv.daily.len(), conv.negative_days.len());

    let window = DatasetWindow::new(&path, &conv.daily, conv.daily.start(), conv.daily.end())?;
    for w in &window.warnings {
        println!("warning: {w}");
    }
    let out = dir.join("daily.csv");
    write_csv(&window.series, &out)?;
    println!("wrote {}", out.display());
    Ok(())
}
