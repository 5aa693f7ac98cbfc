//! AICc-driven order search: a stepwise walk and an exhaustive grid.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::accuracy::in_sample_accuracy;
use crate::error::{Error, Result};
use crate::estimation::{fit_from, min_effective_length, ArimaModel, ArimaOrder, FitOptions, WarmStart};
use crate::series::TimeSeries;
use crate::stationarity::choose_d;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub max_p: usize,
    pub max_q: usize,
    pub max_d: usize,
    pub stepwise: bool,
    /// Allow a constant when `d <= 1`.
    pub allow_constant: bool,
    pub fixed_d: Option<usize>,
    /// KPSS level used when `d` is chosen from the data.
    pub kpss_alpha: f64,
    /// The stepwise walk passes over candidates with an AR or MA root
    /// modulus below this while an alternative exists. Grid rows are kept.
    pub min_root_modulus: f64,
    pub fit: FitOptions,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            max_p: 8,
            max_q: 8,
            max_d: 2,
            stepwise: true,
            allow_constant: true,
            fixed_d: None,
            kpss_alpha: 0.05,
            min_root_modulus: 1.01,
            fit: FitOptions::default(),
        }
    }
}

impl SearchConfig {
    fn validate(&self) -> Result<()> {
        if let Some(d) = self.fixed_d {
            if d > self.max_d {
                return Err(Error::Validation(format!(
                    "fixed d = {d} exceeds max_d = {}",
                    self.max_d
                )));
            }
        }
        Ok(())
    }

    fn resolve_d(&self, series: &TimeSeries) -> Result<usize> {
        self.validate()?;
        match self.fixed_d {
            Some(d) => Ok(d),
            None => choose_d(series, self.max_d, self.kpss_alpha),
        }
    }

    fn constant_allowed(&self, d: usize) -> bool {
        self.allow_constant && d <= 1
    }
}

/// A fitted candidate with its in-sample accuracy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateRow {
    pub order: ArimaOrder,
    pub constant: bool,
    pub aicc: f64,
    pub mae: f64,
    /// `None` when an actual value is zero.
    pub mape: Option<f64>,
    pub mase: Option<f64>,
    pub rmse: f64,
    pub adj_r2: Option<f64>,
    pub near_boundary: bool,
    /// False when the optimizer stopped at its evaluation budget; the row
    /// then holds the best parameters found.
    pub converged: bool,
    pub model: ArimaModel,
}

impl CandidateRow {
    fn from_model(model: ArimaModel, converged: bool) -> Self {
        let d = model.order.d;
        let y = model.series.values();
        let predicted: Vec<f64> = crate::forecast::fitted_values(&model)
            .into_iter()
            .flatten()
            .collect();
        let actual = &y[d..];
        let report = in_sample_accuracy(&model).ok();
        let mae = crate::accuracy::mae(actual, &predicted).unwrap_or(f64::NAN);
        let rmse = crate::accuracy::rmse(actual, &predicted).unwrap_or(f64::NAN);
        Self {
            order: model.order,
            constant: model.constant.is_some(),
            aicc: model.aicc,
            mae,
            mape: crate::accuracy::mape(actual, &predicted).ok(),
            mase: crate::accuracy::mase(actual, &predicted, y).ok(),
            rmse,
            adj_r2: report.and_then(|r| r.adj_r2),
            near_boundary: model.near_boundary,
            converged,
            model,
        }
    }

    fn sort_key(&self) -> (usize, usize, bool) {
        (self.order.p + self.order.q, self.order.p, self.constant)
    }
}

/// Orders by AICc, then fewer coefficients, then lower `p`, then no constant.
fn compare(a: &CandidateRow, b: &CandidateRow) -> std::cmp::Ordering {
    a.aicc
        .total_cmp(&b.aicc)
        .then_with(|| a.sort_key().cmp(&b.sort_key()))
}

fn admissible(row: &CandidateRow, min_root: f64) -> bool {
    crate::estimation::poly::min_ar_root(&row.model.ar) >= min_root
        && crate::estimation::poly::min_ma_root(&row.model.ma) >= min_root
}

/// Stepwise preference: admissible rows first, then [`compare`].
fn compare_step(a: &CandidateRow, b: &CandidateRow, min_root: f64) -> std::cmp::Ordering {
    admissible(b, min_root)
        .cmp(&admissible(a, min_root))
        .then_with(|| compare(a, b))
}

/// Outcome of one attempted fit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Visit {
    pub order: ArimaOrder,
    pub constant: bool,
    pub aicc: Option<f64>,
    /// Roots clear the stepwise modulus floor.
    pub admissible: bool,
    pub error: Option<String>,
}

fn try_fit(
    series: &TimeSeries,
    order: ArimaOrder,
    constant: bool,
    opts: &FitOptions,
    warm: &[WarmStart],
) -> std::result::Result<CandidateRow, String> {
    if series.len() < order.d + min_effective_length(order) {
        return Err(format!("{order}: too few observations"));
    }
    let opts = FitOptions {
        include_constant: Some(constant),
        ..opts.clone()
    };
    match fit_from(series, order, &opts, warm) {
        Ok(m) => Ok(CandidateRow::from_model(m, true)),
        Err(Error::Convergence { best, .. }) => Ok(CandidateRow::from_model(*best, false)),
        Err(e) => Err(format!("{order}: {e}")),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepwiseResult {
    pub best: CandidateRow,
    pub visited: Vec<Visit>,
}

/// Greedy neighbourhood search from the usual seed orders.
pub fn stepwise_search(series: &TimeSeries, config: &SearchConfig) -> Result<StepwiseResult> {
    let d = config.resolve_d(series)?;
    let with_const = config.constant_allowed(d);
    let min_root = config.min_root_modulus;
    let mut cache: BTreeMap<(usize, usize, bool), std::result::Result<CandidateRow, String>> =
        BTreeMap::new();
    let mut visited = Vec::new();
    let mut evaluate = |p: usize, q: usize, c: bool, warm: &[WarmStart], visited: &mut Vec<Visit>| {
        cache
            .entry((p, q, c))
            .or_insert_with(|| {
                let r = try_fit(series, ArimaOrder::new(p, d, q), c, &config.fit, warm);
                visited.push(Visit {
                    order: ArimaOrder::new(p, d, q),
                    constant: c,
                    aicc: r.as_ref().ok().map(|row| row.aicc),
                    admissible: r.as_ref().is_ok_and(|row| admissible(row, min_root)),
                    error: r.as_ref().err().cloned(),
                });
                r
            })
            .clone()
            .ok()
    };

    let seeds = [(2, 2), (0, 0), (1, 0), (0, 1)];
    let mut best: Option<CandidateRow> = None;
    for (p, q) in seeds {
        if p > config.max_p || q > config.max_q {
            continue;
        }
        if let Some(row) = evaluate(p, q, with_const, &[], &mut visited) {
            if best.as_ref().is_none_or(|b| compare_step(&row, b, min_root).is_lt()) {
                best = Some(row);
            }
        }
    }
    let Some(mut best) = best else {
        return Err(Error::SearchFailure {
            causes: visited.iter().filter_map(|v| v.error.clone()).collect(),
        });
    };

    loop {
        let (p, q, c) = (best.order.p as i64, best.order.q as i64, best.constant);
        let mut moves = Vec::new();
        for dp in -1..=1i64 {
            for dq in -1..=1i64 {
                if dp == 0 && dq == 0 {
                    continue;
                }
                let (np, nq) = (p + dp, q + dq);
                if np < 0 || nq < 0 || np > config.max_p as i64 || nq > config.max_q as i64 {
                    continue;
                }
                moves.push((np as usize, nq as usize, c));
            }
        }
        if with_const {
            moves.push((p as usize, q as usize, !c));
        }
        let mut step: Option<CandidateRow> = None;
        let incumbent = [WarmStart::from(&best.model)];
        for (np, nq, nc) in moves {
            let warm: &[WarmStart] = if nc == c { &incumbent } else { &[] };
            if let Some(row) = evaluate(np, nq, nc, warm, &mut visited) {
                let improves = match (admissible(&row, min_root), admissible(&best, min_root)) {
                    (true, false) => true,
                    (a, b) => a == b && row.aicc < best.aicc,
                };
                if improves && step.as_ref().is_none_or(|s| compare_step(&row, s, min_root).is_lt()) {
                    step = Some(row);
                }
            }
        }
        match step {
            Some(row) => best = row,
            None => break,
        }
    }
    Ok(StepwiseResult { best, visited })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridResult {
    pub d: usize,
    /// Successful fits, ascending AICc.
    pub rows: Vec<CandidateRow>,
    pub failures: Vec<Visit>,
}

impl GridResult {
    pub fn top(&self, n: usize) -> &[CandidateRow] {
        &self.rows[..n.min(self.rows.len())]
    }

    pub fn find(&self, order: ArimaOrder) -> Option<&CandidateRow> {
        self.rows.iter().find(|r| r.order == order)
    }
}

/// Fits every `(p, q)` with `p <= max_p`, `q <= max_q` at the chosen `d`.
pub fn grid_search(series: &TimeSeries, config: &SearchConfig) -> Result<GridResult> {
    let d = config.resolve_d(series)?;
    let orders: Vec<ArimaOrder> = (0..=config.max_p)
        .flat_map(|p| (0..=config.max_q).map(move |q| ArimaOrder::new(p, d, q)))
        .collect();
    grid_over(series, &orders, config)
}

/// Fits an explicit candidate list, each at its own `d`.
///
/// Candidates are fitted in waves of equal `p + q`. Each fit is also seeded
/// from the already-fitted `(p - 1, q)` and `(p, q - 1)` models, so adding a
/// term never lowers the attained likelihood. Cells within a wave run in
/// parallel; the result does not depend on scheduling.
pub fn grid_over(
    series: &TimeSeries,
    orders: &[ArimaOrder],
    config: &SearchConfig,
) -> Result<GridResult> {
    config.validate()?;
    let d = orders.first().map_or(0, |o| o.d);
    let mut waves: BTreeMap<usize, Vec<ArimaOrder>> = BTreeMap::new();
    for o in orders {
        waves.entry(o.p + o.q).or_default().push(*o);
    }
    let mut fitted: BTreeMap<ArimaOrder, WarmStart> = BTreeMap::new();
    let mut outcomes: Vec<(ArimaOrder, bool, std::result::Result<CandidateRow, String>)> =
        Vec::new();
    for wave in waves.values() {
        let results: Vec<_> = wave
            .par_iter()
            .map(|&o| {
                let c = config.constant_allowed(o.d);
                let mut warm = Vec::new();
                if o.p > 0 {
                    warm.extend(fitted.get(&ArimaOrder::new(o.p - 1, o.d, o.q)).cloned());
                }
                if o.q > 0 {
                    warm.extend(fitted.get(&ArimaOrder::new(o.p, o.d, o.q - 1)).cloned());
                }
                (o, c, try_fit(series, o, c, &config.fit, &warm))
            })
            .collect();
        for (o, _, r) in &results {
            if let Ok(row) = r {
                fitted.insert(*o, WarmStart::from(&row.model));
            }
        }
        outcomes.extend(results);
    }
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for (order, constant, r) in outcomes {
        match r {
            Ok(row) => rows.push(row),
            Err(e) => failures.push(Visit {
                order,
                constant,
                aicc: None,
                admissible: false,
                error: Some(e),
            }),
        }
    }
    if rows.is_empty() {
        return Err(Error::SearchFailure {
            causes: failures.into_iter().filter_map(|v| v.error).collect(),
        });
    }
    rows.sort_by(compare);
    Ok(GridResult { d, rows, failures })
}
