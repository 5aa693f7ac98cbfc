pub mod correlogram;
pub mod dist;
pub mod error;
pub mod estimation;
pub mod series;
pub mod stationarity;

pub use error::{Error, Result};
pub use series::TimeSeries;
pub mod accuracy;
pub mod diagnostics;
pub mod forecast;
pub mod selection;
pub mod ingest;
pub mod report;
