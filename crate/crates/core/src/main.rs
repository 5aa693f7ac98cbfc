use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use chrono::NaiveDate;
use clap::{Args, Parser, Subcommand};

use epiarima::diagnostics::diagnose;
use epiarima::estimation::{fit_with, ArimaModel, ArimaOrder};
use epiarima::forecast::{final_size, forecast_with, ForecastOptions};
use epiarima::ingest::{load_csv, Country, DatasetWindow, DEFAULT_DATE_FORMAT};
use epiarima::report::{
    build_report, checkpoint_deviations, correlogram_csv, forecast_csv, overlay_csv, select_model,
    Manifest, OrderChoice, RunConfig,
};
use epiarima::selection::{grid_search, stepwise_search, SearchConfig};
use epiarima::{Error, Result, TimeSeries};

#[derive(Parser)]
#[command(name = "epiarima", version, about = "ARIMA modelling of daily case counts")]
struct Cli {
    #[command(flatten)]
    input: InputArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct InputArgs {
    /// CSV file with `date,value` columns.
    #[arg(long, global = true, conflicts_with = "dataset")]
    input: Option<PathBuf>,
    /// Bundled dataset: italy, russia or usa.
    #[arg(long, global = true)]
    dataset: Option<Country>,
    #[arg(long, global = true, default_value = "date")]
    date_column: String,
    #[arg(long, global = true, default_value = "value")]
    value_column: String,
    #[arg(long, global = true, default_value = DEFAULT_DATE_FORMAT)]
    date_format: String,
    /// First day of the modelling window.
    #[arg(long, global = true)]
    start: Option<NaiveDate>,
    /// Last day of the modelling window.
    #[arg(long, global = true)]
    end: Option<NaiveDate>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Directory for CSV outputs and the run manifest.
    #[arg(long, global = true, default_value = "epiarima-out")]
    out_dir: PathBuf,
}

#[derive(Args, Clone)]
struct ModelArgs {
    /// Fixed order `p,d,q`; without it the order is searched.
    #[arg(long)]
    order: Option<ArimaOrder>,
    /// Force (`true`) or forbid (`false`) a constant in a fixed-order fit.
    #[arg(long)]
    constant: Option<bool>,
    #[command(flatten)]
    search: SearchArgs,
}

#[derive(Args, Clone)]
struct SearchArgs {
    /// Stepwise search (the default).
    #[arg(long, conflicts_with = "grid")]
    stepwise: bool,
    /// Exhaustive search over every (p, q).
    #[arg(long)]
    grid: bool,
    #[arg(long, default_value_t = 8)]
    max_p: usize,
    #[arg(long, default_value_t = 8)]
    max_q: usize,
    #[arg(long, default_value_t = 2)]
    max_d: usize,
    #[arg(long)]
    fixed_d: Option<usize>,
    /// Ranked candidates to print.
    #[arg(long, default_value_t = 4)]
    top: usize,
}

#[derive(Args, Clone)]
struct ForecastArgs {
    #[arg(long, default_value_t = 30)]
    horizon: usize,
    /// Interval levels in percent.
    #[arg(long, value_delimiter = ',', default_value = "80,95")]
    levels: Vec<f64>,
    /// Floor means and bounds at zero.
    #[arg(long)]
    clamp_zero: bool,
    #[arg(long, default_value_t = 1.0)]
    near_zero_threshold: f64,
    /// Longest projection used for the final-size figure.
    #[arg(long, default_value_t = 365)]
    final_size_cap: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Fit one order and print its coefficients.
    Fit {
        #[command(flatten)]
        model: ModelArgs,
    },
    /// Rank candidate orders by AICc.
    Auto {
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Forecast with prediction intervals.
    Forecast {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        forecast: ForecastArgs,
    },
    /// Residual tests and correlograms.
    Diagnose {
        #[command(flatten)]
        model: ModelArgs,
        /// Parameters subtracted from Ljung-Box degrees of freedom (default p+q).
        #[arg(long)]
        fitdf: Option<usize>,
    },
    /// Compare forecasts with observed values.
    Evaluate {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        forecast: ForecastArgs,
        /// Observed values after the window; defaults to the bundled holdout.
        #[arg(long)]
        actuals: Option<PathBuf>,
        #[arg(long, value_delimiter = ',', default_value = "10,20,30")]
        checkpoints: Vec<usize>,
    },
    /// Full run report on stdout.
    Report {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        forecast: ForecastArgs,
        #[arg(long)]
        actuals: Option<PathBuf>,
        #[arg(long, value_delimiter = ',', default_value = "10,20,30")]
        checkpoints: Vec<usize>,
        #[arg(long)]
        fitdf: Option<usize>,
        #[arg(long, conflicts_with = "csv")]
        json: bool,
        #[arg(long)]
        csv: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

impl InputArgs {
    fn window(&self) -> Result<DatasetWindow> {
        let (full, source, bounds) = match (&self.input, self.dataset) {
            (Some(path), _) => {
                let s = load_csv(path, &self.date_column, &self.value_column, &self.date_format)?;
                let b = (s.start(), s.end());
                (s, path.display().to_string(), b)
            }
            (None, Some(c)) => (c.series(), format!("bundled:{}", c.name().to_lowercase()), c.window_bounds()),
            (None, None) => {
                return Err(Error::Validation("one of --input or --dataset is required".into()))
            }
        };
        let start = self.start.unwrap_or(bounds.0);
        let end = self.end.unwrap_or(bounds.1);
        DatasetWindow::new(source, &full, start, end)
    }

    fn actuals(&self, path: Option<&Path>, window: &DatasetWindow) -> Result<Option<TimeSeries>> {
        if let Some(p) = path {
            return load_csv(p, &self.date_column, &self.value_column, &self.date_format).map(Some);
        }
        let full = match (&self.input, self.dataset) {
            (Some(p), _) => load_csv(p, &self.date_column, &self.value_column, &self.date_format)?,
            (None, Some(c)) => c.series(),
            (None, None) => return Ok(None),
        };
        let from = window.end.succ_opt().expect("valid date");
        if full.end() < from {
            return Ok(None);
        }
        full.slice(from, full.end()).map(Some)
    }
}

impl SearchArgs {
    fn config(&self, seed: u64) -> SearchConfig {
        let mut c = SearchConfig {
            max_p: self.max_p,
            max_q: self.max_q,
            max_d: self.max_d,
            stepwise: !self.grid,
            fixed_d: self.fixed_d,
            ..SearchConfig::default()
        };
        c.fit.seed = seed;
        c
    }
}

fn run_config(seed: u64, model: &ModelArgs, fc: Option<&ForecastArgs>) -> RunConfig {
    let order = match (model.order, model.search.grid) {
        (Some(order), _) => OrderChoice::Fixed { order },
        (None, true) => OrderChoice::Grid,
        (None, false) => OrderChoice::Stepwise,
    };
    let mut c = RunConfig {
        order,
        search: model.search.config(seed),
        include_constant: model.constant,
        top_n: model.search.top,
        seed,
        ..RunConfig::default()
    };
    if let Some(f) = fc {
        c.horizon = f.horizon;
        c.levels = f.levels.iter().map(|l| if *l > 1.0 { l / 100.0 } else { *l }).collect();
        c.clamp_zero = f.clamp_zero;
        c.near_zero_threshold = f.near_zero_threshold;
        c.final_size_cap = f.final_size_cap;
    }
    c
}

struct Output {
    dir: PathBuf,
}

impl Output {
    fn new(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir)?;
        Ok(Self { dir: dir.to_path_buf() })
    }

    fn write(&self, name: &str, contents: &str) -> Result<()> {
        fs::write(self.dir.join(name), contents)?;
        Ok(())
    }

    fn manifest(&self, m: &Manifest) -> Result<()> {
        let mut s = serde_json::to_string_pretty(m)?;
        s.push('\n');
        self.write("manifest.json", &s)
    }
}

fn print_model(m: &ArimaModel) {
    println!("ARIMA{}", m.order);
    println!("{:<10} {:>14} {:>12}", "term", "estimate", "std.err");
    for (name, est, se) in m.coefficient_table() {
        let se = se.map(|v| format!("{v:.6}")).unwrap_or_else(|| "NA".into());
        println!("{name:<10} {est:>14.6} {se:>12}");
    }
    println!("sigma2 {:.4}  loglik {:.3}  AIC {:.3}  AICc {:.3}", m.sigma2, m.loglik, m.aic, m.aicc);
    if m.near_boundary {
        println!("note: a root lies near the unit circle");
    }
}

fn fit_model(window: &DatasetWindow, cfg: &RunConfig) -> Result<ArimaModel> {
    if let OrderChoice::Fixed { order } = cfg.order {
        let mut opts = cfg.search.fit.clone();
        opts.include_constant = cfg.include_constant;
        return fit_with(&window.series, order, &opts);
    }
    let (m, _) = select_model(&window.series, cfg)?;
    println!("selected ARIMA{} (constant: {})", m.order, m.constant.is_some());
    Ok(m)
}

fn run(cli: Cli) -> Result<()> {
    let input = &cli.input;
    let seed = input.seed;
    let window = input.window()?;
    for w in &window.warnings {
        eprintln!("warning: {w}");
    }
    let out = Output::new(&input.out_dir)?;

    match &cli.command {
        Command::Fit { model } => {
            if model.order.is_none() {
                return Err(Error::Validation("fit needs --order p,d,q".into()));
            }
            let cfg = run_config(seed, model, None);
            out.manifest(&Manifest::new(&window, &cfg, None)?)?;
            print_model(&fit_model(&window, &cfg)?);
        }
        Command::Auto { search } => {
            let model = ModelArgs {
                order: None,
                constant: None,
                search: search.clone(),
            };
            let cfg = run_config(seed, &model, None);
            out.manifest(&Manifest::new(&window, &cfg, None)?)?;
            let sc = search.config(seed);
            let mut table = String::from("order,constant,aicc,mae,mape,mase,rmse,adj_r2,near_boundary,converged\n");
            let rows = if search.grid {
                let g = grid_search(&window.series, &sc)?;
                for f in &g.failures {
                    eprintln!("skipped {}: {}", f.order, f.error.as_deref().unwrap_or("failed"));
                }
                g.rows
            } else {
                vec![stepwise_search(&window.series, &sc)?.best]
            };
            let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
            println!("{:<10} {:>5} {:>12} {:>10} {:>8} {:>7}", "order", "const", "AICc", "MAE", "MAPE%", "MASE");
            for (i, r) in rows.iter().enumerate() {
                table.push_str(&format!(
                    "\"{}\",{},{},{},{},{},{},{},{},{}\n",
                    r.order, r.constant, r.aicc, r.mae, opt(r.mape), opt(r.mase), r.rmse,
                    opt(r.adj_r2), r.near_boundary, r.converged
                ));
                if i < search.top {
                    let f = |v: Option<f64>, w: usize| {
                        v.map(|x| format!("{x:>w$.3}")).unwrap_or_else(|| format!("{:>w$}", "NA"))
                    };
                    println!(
                        "{:<10} {:>5} {:>12.3} {:>10.2} {} {}",
                        r.order.to_string(), r.constant, r.aicc, r.mae, f(r.mape, 8), f(r.mase, 7)
                    );
                }
            }
            out.write("candidates.csv", &table)?;
        }
        Command::Forecast { model, forecast } => {
            let cfg = run_config(seed, model, Some(forecast));
            out.manifest(&Manifest::new(&window, &cfg, None)?)?;
            let m = fit_model(&window, &cfg)?;
            let fc = forecast_with(&m, cfg.horizon, &cfg.levels, ForecastOptions { clamp_zero: cfg.clamp_zero })?;
            out.write("forecast.csv", &forecast_csv(&fc))?;
            let observed: f64 = window.series.values().iter().sum();
            let size = final_size(&m, observed, cfg.near_zero_threshold, cfg.final_size_cap)?;
            println!("{} forecast rows written to {}", fc.horizon, out.dir.join("forecast.csv").display());
            match fc.first_below(cfg.near_zero_threshold) {
                Some(d) => println!("mean first below {} on {d}", cfg.near_zero_threshold),
                None => println!("mean stays above {} within the horizon", cfg.near_zero_threshold),
            }
            println!(
                "final size {:.0} ({:.0} observed + {} projected days{})",
                size.projected_total,
                size.observed_total,
                size.days,
                size.crossing_date.map(|d| format!(", crossing {d}")).unwrap_or_default()
            );
        }
        Command::Diagnose { model, fitdf } => {
            let mut cfg = run_config(seed, model, None);
            cfg.fitdf = *fitdf;
            out.manifest(&Manifest::new(&window, &cfg, None)?)?;
            let m = fit_model(&window, &cfg)?;
            let d = diagnose(&m, *fitdf)?;
            println!("Ljung-Box (fitdf = {})", d.fitdf);
            for lb in &d.ljung_box {
                let r = &lb.result;
                println!("  {:<18} lag {:>2} Q {:>8.3} df {:>2} p {:.3}  {}", lb.label, r.lag, r.statistic, r.df, r.p_value, r.decision);
            }
            println!("ARCH LM");
            for a in &d.arch_lm {
                println!("  lag {:>2} LM {:>8.3} p {:.3}  {}", a.lag, a.statistic, a.p_value, a.decision);
            }
            let w = &d.whiteness;
            println!(
                "whiteness: {} (ACF outside band at {:?}, PACF at {:?})",
                if w.pass { "pass" } else { "fail" },
                w.offending_acf_lags,
                w.offending_pacf_lags
            );
            out.write("correlogram.csv", &correlogram_csv(&d))?;
            let mut s = serde_json::to_string_pretty(&d)?;
            s.push('\n');
            out.write("diagnostics.json", &s)?;
        }
        Command::Evaluate { model, forecast, actuals, checkpoints } => {
            let mut cfg = run_config(seed, model, Some(forecast));
            cfg.checkpoints = checkpoints.clone();
            let actual = input
                .actuals(actuals.as_deref(), &window)?
                .ok_or_else(|| Error::Validation("no actuals after the window; pass --actuals".into()))?;
            out.manifest(&Manifest::new(&window, &cfg, Some(&actual))?)?;
            let m = fit_model(&window, &cfg)?;
            let h = cfg.horizon.max(actual.len()).max(checkpoints.iter().copied().max().unwrap_or(0));
            let fc = forecast_with(&m, h, &cfg.levels, ForecastOptions { clamp_zero: cfg.clamp_zero })?;
            let devs = checkpoint_deviations(&fc, &actual, checkpoints)?;
            println!("{:<18} {:>12} {:>12} {:>10} {:>8} {:>8}", "window", "predicted", "actual", "dev", "dev%", "MAPE%");
            let mut table = String::from("label,n_days,predicted_total,actual_total,overall_deviation,overall_pct_deviation,mape_pct,mae\n");
            for d in &devs {
                println!(
                    "{:<18} {:>12.0} {:>12.0} {:>10.0} {:>8.2} {:>8.2}",
                    d.label, d.predicted_total, d.actual_total, d.overall_deviation, d.overall_pct_deviation, d.mape_pct
                );
                table.push_str(&format!(
                    "{},{},{},{},{},{},{},{}\n",
                    d.label, d.n_days, d.predicted_total, d.actual_total, d.overall_deviation,
                    d.overall_pct_deviation, d.mape_pct, d.mae
                ));
            }
            out.write("deviations.csv", &table)?;
            out.write("overlay.csv", &overlay_csv(&m, &fc, Some(&actual)))?;
        }
        Command::Report { model, forecast, actuals, checkpoints, fitdf, json: _, csv } => {
            let mut cfg = run_config(seed, model, Some(forecast));
            cfg.checkpoints = checkpoints.clone();
            cfg.fitdf = *fitdf;
            let actual = input.actuals(actuals.as_deref(), &window)?;
            let report = build_report(&window, &cfg, actual.as_ref())?;
            out.manifest(&report.manifest)?;
            if *csv {
                print!("{}", report.to_csv()?);
            } else {
                print!("{}", report.to_json()?);
            }
        }
    }
    Ok(())
}
