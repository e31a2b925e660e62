//! Per-run metric traces as CSV.
//!
//! Floats are written in scientific notation with 17 significant digits, which
//! round-trips every `f64` exactly.

use std::io::{Read, Write};

use thiserror::Error;

use crate::trainer::{EpochRecord, MetricTrace};

pub const TRACE_HEADER: [&str; 13] = [
    "run_id",
    "seed",
    "algorithm",
    "eta",
    "loss_family",
    "epoch",
    "gen_iter",
    "mmd",
    "weight_var",
    "mean_d_real",
    "mean_d_fake",
    "disc_loss",
    "gen_loss",
];

#[derive(Debug, Error)]
pub enum TraceCsvError {
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("unexpected header {0:?}")]
    Header(Vec<String>),
    #[error("row {row}: column `{column}` has invalid value {value:?}")]
    Field { row: usize, column: &'static str, value: String },
}

/// Formats a float with 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// One parsed trace row.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub run_id: String,
    pub seed: u64,
    pub algorithm: String,
    pub eta: Option<f64>,
    pub loss_family: String,
    pub record: EpochRecord,
}

/// Labels shared by every row of one run.
#[derive(Debug, Clone)]
pub struct RunLabels<'a> {
    pub run_id: &'a str,
    pub seed: u64,
    pub algorithm: &'a str,
    pub eta: Option<f64>,
    pub loss_family: &'a str,
}

pub fn write_trace_csv<W: Write>(out: W, labels: &RunLabels<'_>, trace: &MetricTrace) -> Result<(), TraceCsvError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(TRACE_HEADER)?;
    let eta = labels.eta.map(fmt_f64).unwrap_or_default();
    for r in &trace.records {
        w.write_record([
            labels.run_id.to_string(),
            labels.seed.to_string(),
            labels.algorithm.to_string(),
            eta.clone(),
            labels.loss_family.to_string(),
            r.epoch.to_string(),
            r.gen_iter.to_string(),
            fmt_f64(r.mmd),
            fmt_f64(r.weight_var),
            fmt_f64(r.mean_d_real),
            fmt_f64(r.mean_d_fake),
            fmt_f64(r.disc_loss),
            fmt_f64(r.gen_loss),
        ])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn read_trace_csv<R: Read>(input: R) -> Result<Vec<TraceRow>, TraceCsvError> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(input);
    let header = reader.headers()?.clone();
    if header.iter().ne(TRACE_HEADER.iter().copied()) {
        return Err(TraceCsvError::Header(header.iter().map(str::to_string).collect()));
    }
    let mut rows = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec?;
        let row = i + 1;
        let field = |c: usize| rec.get(c).unwrap_or("");
        let bad = |c: usize| TraceCsvError::Field {
            row,
            column: TRACE_HEADER[c],
            value: field(c).to_string(),
        };
        let int = |c: usize| field(c).parse::<u64>().map_err(|_| bad(c));
        let float = |c: usize| field(c).parse::<f64>().map_err(|_| bad(c));
        let eta = match field(3) {
            "" => None,
            _ => Some(float(3)?),
        };
        let epoch = usize::try_from(int(5)?).map_err(|_| bad(5))?;
        let gen_iter = usize::try_from(int(6)?).map_err(|_| bad(6))?;
        rows.push(TraceRow {
            run_id: field(0).to_string(),
            seed: int(1)?,
            algorithm: field(2).to_string(),
            eta,
            loss_family: field(4).to_string(),
            record: EpochRecord {
                epoch,
                gen_iter,
                mmd: float(7)?,
                weight_var: float(8)?,
                mean_d_real: float(9)?,
                mean_d_fake: float(10)?,
                disc_loss: float(11)?,
                gen_loss: float(12)?,
            },
        });
    }
    Ok(rows)
}
