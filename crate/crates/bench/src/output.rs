//! CSV and JSON reports.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::runner::RunRecord;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// CSV header, in column order.
pub const CSV_COLUMNS: [&str; 13] = [
    "scenario",
    "N",
    "d_eff",
    "D_G",
    "epsilon",
    "mean_D",
    "stderr",
    "bound_thm5",
    "bound_thm3",
    "suff_thm1",
    "nec_thm2",
    "verdict",
    "seed",
];

const NA: &str = "NA";

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map_or_else(|| NA.to_string(), |x| x.to_string())
}

fn csv_row(r: &RunRecord) -> [String; 13] {
    let report = r.report.as_ref();
    [
        r.scenario.clone(),
        opt(r.outcomes),
        opt(r.d_eff),
        opt(r.gap_degeneracy),
        r.epsilon.to_string(),
        opt(report.map(|x| x.mean_distinguishability)),
        opt(report.map(|x| x.standard_error)),
        opt(r.bounds.thm5.value),
        opt(r.bounds.thm3.value),
        r.bounds.thm1.status.as_str().to_string(),
        r.bounds.thm2.status.as_str().to_string(),
        report.map_or("error", |x| x.verdict.as_str()).to_string(),
        r.seed.to_string(),
    ]
}

/// Writes `records` in `format`. CSV has one row per record under
/// [`CSV_COLUMNS`]; JSON is the record list itself.
pub fn emit_report<W: Write>(records: &[RunRecord], format: Format, mut writer: W) -> Result<()> {
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(writer);
            w.write_record(CSV_COLUMNS)?;
            for r in records {
                w.write_record(csv_row(r))?;
            }
            w.flush()?;
        }
        Format::Json => {
            serde_json::to_writer_pretty(&mut writer, records)?;
            writeln!(writer)?;
        }
    }
    Ok(())
}

pub fn read_json<R: Read>(reader: R) -> Result<Vec<RunRecord>> {
    Ok(serde_json::from_reader(reader)?)
}
