use std::io::Write;

use serde::Serialize;

use super::{RateFit, WitnessRecord};
use crate::error::LabError;

/// Render `v` rounded to 12 significant digits, without an exponent.
pub fn format_sig(v: f64) -> String {
    if !v.is_finite() || v == 0.0 {
        return format!("{}", if v == 0.0 { 0.0 } else { v });
    }
    let rounded: f64 = format!("{v:.11e}").parse().expect("formatted float parses");
    format!("{rounded}")
}

/// One line of the convergence CSV.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CsvRow {
    pub family: String,
    pub index: u32,
    pub pair_id: usize,
    pub px: f64,
    pub py: f64,
    pub qx: f64,
    pub qy: f64,
    pub d_metric: f64,
    pub d_base: f64,
    pub gap: f64,
}

/// Write rows with the header `family,index,pair_id,px,py,qx,qy,d_metric,d_base,gap`.
pub fn write_csv<W: Write>(rows: &[CsvRow], out: W) -> Result<(), LabError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["family", "index", "pair_id", "px", "py", "qx", "qy", "d_metric", "d_base", "gap"])?;
    for r in rows {
        let nums = [r.px, r.py, r.qx, r.qy, r.d_metric, r.d_base, r.gap].map(format_sig);
        let mut record = vec![r.family.clone(), r.index.to_string(), r.pair_id.to_string()];
        record.extend(nums);
        w.write_record(&record)?;
    }
    w.flush()?;
    Ok(())
}

/// JSON summary of a convergence run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub family: String,
    pub indices: Vec<u32>,
    pub sup_gaps: Vec<f64>,
    /// `None` when fewer than three indices or a gap is exactly zero.
    pub fitted_rate: Option<RateFit>,
    pub witnesses: Vec<WitnessRecord>,
}
