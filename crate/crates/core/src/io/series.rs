//! Historical close prices and the largest one-step log-return.

use std::io::Read;
use std::path::Path;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PriceRecord {
    pub date: NaiveDate,
    pub close: f64,
}

/// Closes ordered by strictly increasing date, all positive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PriceSeries {
    records: Vec<PriceRecord>,
}

#[derive(Deserialize)]
struct Row {
    #[serde(alias = "Date", alias = "DATE")]
    date: String,
    #[serde(alias = "Close", alias = "CLOSE")]
    close: f64,
}

impl PriceSeries {
    pub fn new(records: Vec<PriceRecord>) -> Result<Self> {
        for (i, r) in records.iter().enumerate() {
            if !(r.close.is_finite() && r.close > 0.0) {
                return Err(Error::Input(format!(
                    "close on {} is {}, expected a positive price",
                    r.date, r.close
                )));
            }
            if i > 0 && records[i - 1].date >= r.date {
                return Err(Error::Input(format!(
                    "dates must be strictly increasing: {} follows {}",
                    r.date,
                    records[i - 1].date
                )));
            }
        }
        Ok(Self { records })
    }

    /// Reads a headered CSV with `date` (ISO-8601 day) and `close` columns.
    /// Other columns are ignored.
    pub fn from_reader<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let mut records = Vec::new();
        for (line, row) in rdr.deserialize::<Row>().enumerate() {
            let row = row.map_err(|e| Error::Input(format!("row {}: {e}", line + 1)))?;
            let date = NaiveDate::parse_from_str(&row.date, "%Y-%m-%d")
                .map_err(|e| Error::Input(format!("row {}: bad date {:?}: {e}", line + 1, row.date)))?;
            records.push(PriceRecord {
                date,
                close: row.close,
            });
        }
        Self::new(records)
    }

    pub fn from_path<P: AsRef<Path>>(path: P) -> Result<Self> {
        let path = path.as_ref();
        let file = std::fs::File::open(path)
            .map_err(|e| Error::Input(format!("{}: {e}", path.display())))?;
        Self::from_reader(file)
    }

    pub fn records(&self) -> &[PriceRecord] {
        &self.records
    }

    /// Every close multiplied by `factor`, as after a split adjustment.
    pub fn rescaled(&self, factor: f64) -> Result<Self> {
        Self::new(
            self.records
                .iter()
                .map(|r| PriceRecord {
                    date: r.date,
                    close: r.close * factor,
                })
                .collect(),
        )
    }
}

/// The consecutive pair of closes with the largest absolute log-return.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub max_abs_log_return: f64,
    /// `ln(move_to/move_from)`, with its sign.
    pub log_return: f64,
    /// Date of the `move_to` close.
    pub at_date: NaiveDate,
    pub move_from: f64,
    pub move_to: f64,
}

impl BoundReport {
    /// Log-speed bound implied by this move taking `dt` years.
    pub fn speed_bound(&self, dt: f64) -> Result<f64> {
        crate::error::require(dt.is_finite() && dt > 0.0, "dt", dt, "finite and > 0")?;
        Ok(self.max_abs_log_return / dt)
    }
}

/// Scans consecutive closes for the largest `|ln(c[i+1]/c[i])|`; ties go to
/// the earliest date.
pub fn max_log_return(series: &PriceSeries) -> Result<BoundReport> {
    let recs = series.records();
    let closes: Vec<f64> = recs.iter().map(|r| r.close).collect();
    let (i, log_return) = max_log_return_index(&closes)?;
    Ok(BoundReport {
        max_abs_log_return: log_return.abs(),
        log_return,
        at_date: recs[i].date,
        move_from: recs[i - 1].close,
        move_to: recs[i].close,
    })
}

/// Index `i` of the close ending the largest move and its signed
/// `ln(c[i]/c[i-1])`. Ties go to the smallest index.
pub fn max_log_return_index(closes: &[f64]) -> Result<(usize, f64)> {
    if closes.len() < 2 {
        return Err(Error::Input(format!(
            "need at least two closes, got {}",
            closes.len()
        )));
    }
    if let Some(c) = closes.iter().find(|c| !(c.is_finite() && **c > 0.0)) {
        return Err(Error::Input(format!("close {c} is not a positive price")));
    }
    let mut best = (1, (closes[1] / closes[0]).ln());
    for (i, w) in closes.windows(2).enumerate().skip(1) {
        let lr = (w[1] / w[0]).ln();
        if lr.abs() > best.1.abs() {
            best = (i + 1, lr);
        }
    }
    Ok(best)
}
