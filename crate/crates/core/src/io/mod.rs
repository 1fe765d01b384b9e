//! Data ingestion and document output for the command-line tool.

pub mod curve;
pub mod report;
pub mod series;

pub use curve::{run_curve, Curve, CurveKind, CurveParams, CurvePoint, Grid, PointStatus};
pub use report::{mc_report, McReport};
pub use series::{max_log_return, max_log_return_index, BoundReport, PriceRecord, PriceSeries};

/// Output document format.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// Formats a float with 17 significant digits so it parses back exactly.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}
