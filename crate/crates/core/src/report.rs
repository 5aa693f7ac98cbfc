//! End-to-end run: model choice, fit, diagnostics, forecast and evaluation,
//! collected in a serialisable [`RunReport`].

use std::collections::BTreeMap;
use std::fmt::Write as _;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::accuracy::{deviation_report, in_sample_accuracy, AccuracyReport, DeviationReport};
use crate::diagnostics::{diagnose, DiagnosticsReport};
use crate::error::{Error, Result};
use crate::estimation::{fit_with, ArimaModel, ArimaOrder};
use crate::forecast::{final_size, fitted_values, forecast_with, FinalSize, Forecast, ForecastOptions};
use crate::ingest::{to_csv_string, DatasetWindow};
use crate::selection::{grid_search, stepwise_search, CandidateRow, SearchConfig};
use crate::series::TimeSeries;

pub const SCHEMA_VERSION: &str = "1";

/// Embedded copy of `schema/run_report.schema.json`.
pub const RUN_REPORT_SCHEMA: &str = include_str!("../schema/run_report.schema.json");

/// How the model order is chosen.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum OrderChoice {
    Fixed { order: ArimaOrder },
    Stepwise,
    Grid,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub order: OrderChoice,
    pub search: SearchConfig,
    /// Constant for fixed-order fits; `None` uses the default rule.
    pub include_constant: Option<bool>,
    pub horizon: usize,
    pub levels: Vec<f64>,
    pub clamp_zero: bool,
    pub near_zero_threshold: f64,
    pub final_size_cap: usize,
    /// Forecast-day counts at which predicted and actual totals are compared.
    pub checkpoints: Vec<usize>,
    /// Ljung-Box fitted-parameter adjustment; `None` uses `p + q`.
    pub fitdf: Option<usize>,
    /// Number of ranked candidates kept in the report.
    pub top_n: usize,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            order: OrderChoice::Grid,
            search: SearchConfig::default(),
            include_constant: None,
            horizon: 30,
            levels: vec![0.8, 0.95],
            clamp_zero: false,
            near_zero_threshold: 1.0,
            final_size_cap: 365,
            checkpoints: vec![10, 20, 30],
            fitdf: None,
            top_n: 4,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub schema_version: String,
    pub source: String,
    pub label: String,
    /// SHA-256 of the window as written by the CSV serializer.
    pub window_sha256: String,
    pub window_start: NaiveDate,
    pub window_end: NaiveDate,
    pub n_observations: usize,
    pub actuals_sha256: Option<String>,
    pub config: RunConfig,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientRow {
    pub name: String,
    pub estimate: f64,
    pub stderr: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSummary {
    pub order: ArimaOrder,
    pub coefficients: Vec<CoefficientRow>,
    pub sigma2: f64,
    pub loglik: f64,
    pub aic: f64,
    pub aicc: f64,
    pub n_effective: usize,
    pub near_boundary: bool,
}

impl From<&ArimaModel> for ModelSummary {
    fn from(m: &ArimaModel) -> Self {
        Self {
            order: m.order,
            coefficients: m
                .coefficient_table()
                .into_iter()
                .map(|(name, estimate, stderr)| CoefficientRow {
                    name,
                    estimate,
                    stderr,
                })
                .collect(),
            sigma2: m.sigma2,
            loglik: m.loglik,
            aic: m.aic,
            aicc: m.aicc,
            n_effective: m.n_effective,
            near_boundary: m.near_boundary,
        }
    }
}

/// One line of the ranked candidate table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateSummary {
    pub order: ArimaOrder,
    pub constant: bool,
    pub aicc: f64,
    pub mae: f64,
    pub mape: Option<f64>,
    pub mase: Option<f64>,
    pub rmse: f64,
    pub adj_r2: Option<f64>,
    pub near_boundary: bool,
    pub converged: bool,
}

impl From<&CandidateRow> for CandidateSummary {
    fn from(r: &CandidateRow) -> Self {
        Self {
            order: r.order,
            constant: r.constant,
            aicc: r.aicc,
            mae: r.mae,
            mape: r.mape,
            mase: r.mase,
            rmse: r.rmse,
            adj_r2: r.adj_r2,
            near_boundary: r.near_boundary,
            converged: r.converged,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntervalBounds {
    pub level: f64,
    pub lower: f64,
    pub upper: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForecastRow {
    pub date: NaiveDate,
    pub mean: f64,
    pub sd: f64,
    pub intervals: Vec<IntervalBounds>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForecastBlock {
    pub rows: Vec<ForecastRow>,
    pub near_zero_date: Option<NaiveDate>,
    pub final_size: FinalSize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub manifest: Manifest,
    pub model: ModelSummary,
    pub candidates: Vec<CandidateSummary>,
    /// `None` when a measure is undefined (for example a zero actual).
    pub accuracy: Option<AccuracyReport>,
    pub diagnostics: DiagnosticsReport,
    pub forecast: ForecastBlock,
    pub deviations: Vec<DeviationReport>,
}

impl Manifest {
    /// Describes the inputs of a run. Contains no timestamps, so equal inputs
    /// give equal manifests.
    pub fn new(
        window: &DatasetWindow,
        config: &RunConfig,
        actuals: Option<&TimeSeries>,
    ) -> Result<Self> {
        Ok(Self {
            tool: env!("CARGO_PKG_NAME").into(),
            version: env!("CARGO_PKG_VERSION").into(),
            schema_version: SCHEMA_VERSION.into(),
            source: window.source.display().to_string(),
            label: window.label.clone(),
            window_sha256: sha256_hex(&to_csv_string(&window.series)?),
            window_start: window.start,
            window_end: window.end,
            n_observations: window.series.len(),
            actuals_sha256: actuals.map(to_csv_string).transpose()?.map(|s| sha256_hex(&s)),
            config: config.clone(),
            warnings: window.warnings.clone(),
        })
    }
}

fn sha256_hex(text: &str) -> String {
    Sha256::digest(text.as_bytes())
        .iter()
        .fold(String::with_capacity(64), |mut s, b| {
            let _ = write!(s, "{b:02x}");
            s
        })
}

/// Chooses or fits the model named by `config.order`. Returns the model and
/// the ranked candidates considered. `config.seed` overrides the fit seed.
pub fn select_model(
    series: &TimeSeries,
    config: &RunConfig,
) -> Result<(ArimaModel, Vec<CandidateRow>)> {
    let mut search = config.search.clone();
    search.fit.seed = config.seed;
    match &config.order {
        OrderChoice::Fixed { order } => {
            let mut opts = search.fit.clone();
            opts.include_constant = config.include_constant;
            Ok((fit_with(series, *order, &opts)?, Vec::new()))
        }
        OrderChoice::Grid => {
            let g = grid_search(series, &search)?;
            let model = g.rows[0].model.clone();
            Ok((model, g.rows.into_iter().take(config.top_n).collect()))
        }
        OrderChoice::Stepwise => {
            let r = stepwise_search(series, &search)?;
            Ok((r.best.model.clone(), vec![r.best]))
        }
    }
}

/// Runs the full pipeline on `window`. `actuals` (typically observations
/// after the window) feed the checkpoint comparisons.
pub fn build_report(
    window: &DatasetWindow,
    config: &RunConfig,
    actuals: Option<&TimeSeries>,
) -> Result<RunReport> {
    let series = &window.series;
    let (model, candidates) = select_model(series, config)?;
    let max_checkpoint = config.checkpoints.iter().copied().max().unwrap_or(0);
    let horizon = config.horizon.max(max_checkpoint);
    let fc = forecast_with(
        &model,
        horizon,
        &config.levels,
        ForecastOptions {
            clamp_zero: config.clamp_zero,
        },
    )?;
    let observed_total: f64 = series.values().iter().sum();
    let size = final_size(&model, observed_total, config.near_zero_threshold, config.final_size_cap)?;

    let deviations = match actuals {
        Some(a) => checkpoint_deviations(&fc, a, &config.checkpoints)?,
        None => Vec::new(),
    };

    let mut warnings = Vec::new();
    let accuracy = match in_sample_accuracy(&model) {
        Ok(a) => Some(a),
        Err(e) => {
            warnings.push(format!("in-sample accuracy unavailable: {e}"));
            None
        }
    };

    let mut manifest = Manifest::new(window, config, actuals)?;
    manifest.warnings.extend(warnings);

    let rows = (0..config.horizon)
        .map(|j| ForecastRow {
            date: fc.dates[j],
            mean: fc.mean[j],
            sd: fc.sd[j],
            intervals: fc
                .intervals
                .iter()
                .map(|i| IntervalBounds {
                    level: i.level,
                    lower: i.lower[j],
                    upper: i.upper[j],
                })
                .collect(),
        })
        .collect();

    Ok(RunReport {
        manifest,
        model: ModelSummary::from(&model),
        candidates: candidates.iter().map(CandidateSummary::from).collect(),
        accuracy,
        diagnostics: diagnose(&model, config.fitdf)?,
        forecast: ForecastBlock {
            rows,
            near_zero_date: fc.first_below(config.near_zero_threshold),
            final_size: size,
        },
        deviations,
    })
}

/// Predicted-versus-actual totals over the first `k` forecast days for each
/// checkpoint `k`, plus one over all available actuals. Actuals must start
/// on the first forecast date.
pub fn checkpoint_deviations(
    fc: &Forecast,
    actuals: &TimeSeries,
    checkpoints: &[usize],
) -> Result<Vec<DeviationReport>> {
    if actuals.start() != fc.dates[0] {
        return Err(Error::Validation(format!(
            "actuals start {} but the forecast starts {}",
            actuals.start(),
            fc.dates[0]
        )));
    }
    let available = actuals.len().min(fc.horizon);
    let mut ks: Vec<usize> = checkpoints
        .iter()
        .copied()
        .filter(|k| *k >= 1 && *k <= available)
        .collect();
    if !ks.contains(&available) {
        ks.push(available);
    }
    ks.sort_unstable();
    ks.dedup();
    ks.into_iter()
        .map(|k| {
            let label = format!("until {}", fc.dates[k - 1]);
            deviation_report(&actuals.values()[..k], &fc.mean[..k], label)
        })
        .collect()
}

impl RunReport {
    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    /// Long-format CSV (`section,item,field,value`) covering every block.
    pub fn to_csv(&self) -> Result<String> {
        let value = serde_json::to_value(self)?;
        let mut rows: BTreeMap<usize, (String, String, String, String)> = BTreeMap::new();
        let mut next = 0usize;
        if let serde_json::Value::Object(map) = &value {
            for (section, v) in map {
                flatten(section, "", v, &mut |item, field, val| {
                    rows.insert(next, (section.clone(), item, field, val));
                    next += 1;
                });
            }
        }
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["section", "item", "field", "value"])
            .map_err(|e| Error::Io(std::io::Error::other(e)))?;
        for (_, (a, b, c, d)) in rows {
            w.write_record([a, b, c, d])
                .map_err(|e| Error::Io(std::io::Error::other(e)))?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
    }
}

fn flatten(
    section: &str,
    path: &str,
    v: &serde_json::Value,
    out: &mut dyn FnMut(String, String, String),
) {
    use serde_json::Value;
    match v {
        Value::Object(m) => {
            for (k, v) in m {
                let p = if path.is_empty() { k.clone() } else { format!("{path}.{k}") };
                flatten(section, &p, v, out);
            }
        }
        Value::Array(a) => {
            for (i, v) in a.iter().enumerate() {
                let p = if path.is_empty() { i.to_string() } else { format!("{path}.{i}") };
                flatten(section, &p, v, out);
            }
        }
        other => {
            let (item, field) = match path.rsplit_once('.') {
                Some((a, b)) => (a.to_string(), b.to_string()),
                None => (String::new(), path.to_string()),
            };
            let val = match other {
                Value::String(s) => s.clone(),
                Value::Null => String::new(),
                x => x.to_string(),
            };
            out(item, field, val);
        }
    }
}

/// Fan-chart CSV: `date,mean,lower_<L>,upper_<L>...` with `L` in percent.
pub fn forecast_csv(fc: &Forecast) -> String {
    let mut s = String::from("date,mean,sd");
    for i in &fc.intervals {
        let pct = level_pct(i.level);
        let _ = write!(s, ",lower_{pct},upper_{pct}");
    }
    s.push('\n');
    for j in 0..fc.horizon {
        let _ = write!(s, "{},{},{}", fc.dates[j], fc.mean[j], fc.sd[j]);
        for i in &fc.intervals {
            let _ = write!(s, ",{},{}", i.lower[j], i.upper[j]);
        }
        s.push('\n');
    }
    s
}

fn level_pct(level: f64) -> String {
    let p = level * 100.0;
    if (p - p.round()).abs() < 1e-9 {
        format!("{}", p.round() as i64)
    } else {
        format!("{p}")
    }
}

/// Residual correlogram CSV: `lag,acf,pacf,band`.
pub fn correlogram_csv(diag: &DiagnosticsReport) -> String {
    let w = &diag.whiteness;
    let mut s = String::from("lag,acf,pacf,band\n");
    for (i, lag) in w.acf.lags.iter().enumerate() {
        let _ = writeln!(
            s,
            "{lag},{},{},{}",
            w.acf.coefficients[i], w.pacf.coefficients[i], w.acf.band_halfwidth
        );
    }
    s
}

/// Observed, fitted and forecast values on one date axis:
/// `date,actual,fitted,forecast`. Empty cells mark missing values.
pub fn overlay_csv(model: &ArimaModel, fc: &Forecast, actuals: Option<&TimeSeries>) -> String {
    let mut s = String::from("date,actual,fitted,forecast\n");
    let fitted = fitted_values(model);
    for ((d, y), f) in model.series.dates().iter().zip(model.series.values()).zip(&fitted) {
        let f = f.map(|v| v.to_string()).unwrap_or_default();
        let _ = writeln!(s, "{d},{y},{f},");
    }
    for (j, d) in fc.dates.iter().enumerate() {
        let a = actuals
            .and_then(|a| a.dates().iter().position(|x| x == d).map(|i| a.values()[i]))
            .map(|v| v.to_string())
            .unwrap_or_default();
        let _ = writeln!(s, "{d},{a},,{}", fc.mean[j]);
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimation::simulate;

    fn window() -> DatasetWindow {
        let s = simulate(ArimaOrder::new(1, 1, 0), &[0.5], &[], 0.0, 1.0, 70, 4).unwrap();
        let (a, b) = (s.start(), s.end() - chrono::Days::new(15));
        DatasetWindow::new("sim", &s, a, b).unwrap()
    }

    #[test]
    fn checkpoints_include_all_available() {
        let w = window();
        let cfg = RunConfig {
            order: OrderChoice::Fixed { order: ArimaOrder::new(1, 1, 0) },
            checkpoints: vec![5, 10, 40],
            horizon: 20,
            ..RunConfig::default()
        };
        let full = simulate(ArimaOrder::new(1, 1, 0), &[0.5], &[], 0.0, 1.0, 70, 4).unwrap();
        let after = full.slice(w.end.succ_opt().unwrap(), full.end()).unwrap();
        let shifted: Vec<f64> = after.values().iter().map(|v| v + 1000.0).collect();
        let actuals = TimeSeries::new(after.dates().to_vec(), shifted, "a").unwrap();
        // The fit runs on the raw window; checkpoints only need matching dates.
        let shifted_window = {
            let vals: Vec<f64> = w.series.values().iter().map(|v| v + 1000.0).collect();
            let s = TimeSeries::new(w.series.dates().to_vec(), vals, "s").unwrap();
            DatasetWindow::new("sim", &s, w.start, w.end).unwrap()
        };
        let r = build_report(&shifted_window, &cfg, Some(&actuals)).unwrap();
        let days: Vec<usize> = r.deviations.iter().map(|d| d.n_days).collect();
        assert_eq!(days, vec![5, 10, 15]);
        assert_eq!(r.forecast.rows.len(), 20);
    }

    #[test]
    fn csv_and_json_render() {
        let cfg = RunConfig {
            order: OrderChoice::Fixed { order: ArimaOrder::new(1, 1, 0) },
            ..RunConfig::default()
        };
        let w = {
            let vals: Vec<f64> = window().series.values().iter().map(|v| v + 500.0).collect();
            let s = TimeSeries::new(window().series.dates().to_vec(), vals, "s").unwrap();
            DatasetWindow::new("sim", &s, s.start(), s.end()).unwrap()
        };
        let r = build_report(&w, &cfg, None).unwrap();
        let json = r.to_json().unwrap();
        let back: RunReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back.model.order, ArimaOrder::new(1, 1, 0));
        let csv = r.to_csv().unwrap();
        assert!(csv.starts_with("section,item,field,value\n"));
        assert!(csv.contains("model,order,p,1"));
        assert_eq!(level_pct(0.8), "80");
        assert_eq!(level_pct(0.975), "97.5");
    }
}
