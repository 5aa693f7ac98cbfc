//! CSV ingestion, cumulative-to-daily conversion and the bundled country
//! datasets.

use std::fmt;
use std::io::Read;
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::TimeSeries;

pub const DEFAULT_DATE_FORMAT: &str = "%Y-%m-%d";

/// Windows shorter than this are rejected.
pub const MIN_WINDOW: usize = 40;
/// Windows shorter than this load with a warning.
pub const RECOMMENDED_WINDOW: usize = 50;

/// Column and date-format settings for [`load_csv`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CsvLayout {
    pub date_column: String,
    pub value_column: String,
    pub date_format: String,
}

impl Default for CsvLayout {
    fn default() -> Self {
        Self {
            date_column: "date".into(),
            value_column: "value".into(),
            date_format: DEFAULT_DATE_FORMAT.into(),
        }
    }
}

/// Reads a daily series from a CSV file with a header row.
pub fn load_csv(
    path: impl AsRef<Path>,
    date_column: &str,
    value_column: &str,
    date_format: &str,
) -> Result<TimeSeries> {
    let path = path.as_ref();
    let file = std::fs::File::open(path)?;
    let label = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let layout = CsvLayout {
        date_column: date_column.into(),
        value_column: value_column.into(),
        date_format: date_format.into(),
    };
    read_csv(file, path, &layout, label)
}

/// [`load_csv`] over any reader; `source` is only used in error messages.
pub fn read_csv<R: Read>(
    reader: R,
    source: &Path,
    layout: &CsvLayout,
    label: impl Into<String>,
) -> Result<TimeSeries> {
    let parse_err = |line: usize, message: String| Error::Parse {
        path: source.to_path_buf(),
        line,
        message,
    };
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr
        .headers()
        .map_err(|e| parse_err(1, e.to_string()))?
        .clone();
    let column = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| parse_err(1, format!("missing column {name:?}")))
    };
    let date_idx = column(&layout.date_column)?;
    let value_idx = column(&layout.value_column)?;

    let mut dates: Vec<NaiveDate> = Vec::new();
    let mut values = Vec::new();
    let mut lines = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            parse_err(line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        let raw_date = record
            .get(date_idx)
            .ok_or_else(|| parse_err(line, "missing date field".into()))?;
        let raw_value = record
            .get(value_idx)
            .ok_or_else(|| parse_err(line, "missing value field".into()))?;
        let date = NaiveDate::parse_from_str(raw_date, &layout.date_format)
            .map_err(|e| parse_err(line, format!("bad date {raw_date:?}: {e}")))?;
        let value: f64 = raw_value
            .parse()
            .map_err(|_| parse_err(line, format!("bad value {raw_value:?}")))?;
        if !value.is_finite() {
            return Err(parse_err(line, format!("non-finite value {raw_value:?}")));
        }
        if let Some(prev) = dates.last() {
            if date <= *prev {
                return Err(Error::DataIntegrity(format!(
                    "line {line}: date {date} does not follow {prev} (line {})",
                    lines.last().copied().unwrap_or(0)
                )));
            }
            if let Some(next) = prev.succ_opt() {
                if date != next {
                    return Err(Error::DataIntegrity(format!(
                        "line {line}: missing date {next} (jump from {prev} to {date})"
                    )));
                }
            }
        }
        dates.push(date);
        values.push(value);
        lines.push(line);
    }
    if dates.is_empty() {
        return Err(parse_err(1, "no data rows".into()));
    }
    TimeSeries::new(dates, values, label)
}

/// Writes `date,value` rows with ISO dates. Values use the shortest
/// representation that parses back to the same `f64`.
pub fn write_csv(series: &TimeSeries, path: impl AsRef<Path>) -> Result<()> {
    let mut w = csv::Writer::from_path(path.as_ref()).map_err(csv_io)?;
    write_records(series, &mut w)?;
    w.flush()?;
    Ok(())
}

/// CSV text of [`write_csv`].
pub fn to_csv_string(series: &TimeSeries) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    write_records(series, &mut w)?;
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

fn write_records<W: std::io::Write>(series: &TimeSeries, w: &mut csv::Writer<W>) -> Result<()> {
    w.write_record(["date", "value"]).map_err(csv_io)?;
    for (d, v) in series.dates().iter().zip(series.values()) {
        w.write_record([d.format(DEFAULT_DATE_FORMAT).to_string(), v.to_string()])
            .map_err(csv_io)?;
    }
    Ok(())
}

fn csv_io(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

/// Daily counts derived from a cumulative series.
#[derive(Debug, Clone, PartialEq)]
pub struct DailyConversion {
    pub daily: TimeSeries,
    /// Dates whose derived count is negative (downward revisions).
    pub negative_days: Vec<NaiveDate>,
}

/// First differences of a cumulative series; the first day is kept as is.
/// Negative daily values are reported, not altered.
pub fn cumulative_to_daily(series: &TimeSeries) -> DailyConversion {
    let v = series.values();
    let mut daily = Vec::with_capacity(v.len());
    daily.push(v[0]);
    daily.extend(v.windows(2).map(|w| w[1] - w[0]));
    let negative_days = series
        .dates()
        .iter()
        .zip(&daily)
        .filter(|(_, x)| **x < 0.0)
        .map(|(d, _)| *d)
        .collect();
    let daily = TimeSeries::new(series.dates().to_vec(), daily, series.label())
        .expect("same dates as a valid series");
    DailyConversion {
        daily,
        negative_days,
    }
}

/// A date-bounded slice of a source series used for modelling.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetWindow {
    pub source: PathBuf,
    pub label: String,
    pub start: NaiveDate,
    pub end: NaiveDate,
    pub series: TimeSeries,
    pub warnings: Vec<String>,
}

impl DatasetWindow {
    /// Slices `full` to `[start, end]` and applies the length policy.
    pub fn new(
        source: impl Into<PathBuf>,
        full: &TimeSeries,
        start: NaiveDate,
        end: NaiveDate,
    ) -> Result<Self> {
        let series = full.slice(start, end)?;
        let n = series.len();
        if n < MIN_WINDOW {
            return Err(Error::InsufficientData(format!(
                "window {start}..{end} has {n} observations; at least {MIN_WINDOW} are required"
            )));
        }
        let mut warnings = Vec::new();
        if n < RECOMMENDED_WINDOW {
            warnings.push(format!(
                "window has {n} observations; {RECOMMENDED_WINDOW} or more are recommended"
            ));
        }
        Ok(Self {
            source: source.into(),
            label: full.label().to_string(),
            start,
            end,
            series,
            warnings,
        })
    }
}

/// Country series shipped with the crate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Country {
    Italy,
    Russia,
    Usa,
}

impl Country {
    pub const ALL: [Country; 3] = [Country::Italy, Country::Russia, Country::Usa];

    pub fn name(self) -> &'static str {
        match self {
            Country::Italy => "Italy",
            Country::Russia => "Russia",
            Country::Usa => "USA",
        }
    }

    fn file(self) -> &'static str {
        match self {
            Country::Italy => "italy.csv",
            Country::Russia => "russia.csv",
            Country::Usa => "usa.csv",
        }
    }

    fn contents(self) -> &'static str {
        match self {
            Country::Italy => include_str!("../data/italy.csv"),
            Country::Russia => include_str!("../data/russia.csv"),
            Country::Usa => include_str!("../data/usa.csv"),
        }
    }

    /// Daily new cases from the window start to the last evaluation date.
    pub fn series(self) -> TimeSeries {
        read_csv(
            self.contents().as_bytes(),
            Path::new(self.file()),
            &CsvLayout::default(),
            self.name(),
        )
        .expect("bundled data is valid")
    }

    /// Default modelling window (inclusive).
    pub fn window_bounds(self) -> (NaiveDate, NaiveDate) {
        let d = |m, day| NaiveDate::from_ymd_opt(2020, m, day).expect("valid date");
        match self {
            Country::Italy => (d(2, 22), d(4, 14)),
            Country::Russia => (d(3, 22), d(5, 22)),
            Country::Usa => (d(3, 9), d(5, 16)),
        }
    }

    pub fn window(self) -> DatasetWindow {
        let (start, end) = self.window_bounds();
        DatasetWindow::new(format!("bundled:{}", self.file()), &self.series(), start, end)
            .expect("bundled window is long enough")
    }

    /// Observations after the modelling window, used as forecast actuals.
    pub fn holdout(self) -> TimeSeries {
        let full = self.series();
        let (_, end) = self.window_bounds();
        let from = end.succ_opt().expect("valid date");
        full.slice(from, full.end()).expect("bundled data extends past the window")
    }
}

impl fmt::Display for Country {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Country {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "italy" => Ok(Country::Italy),
            "russia" => Ok(Country::Russia),
            "usa" | "us" => Ok(Country::Usa),
            other => Err(Error::Validation(format!("unknown bundled dataset {other:?}"))),
        }
    }
}
