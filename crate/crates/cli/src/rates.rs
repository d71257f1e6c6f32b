use std::io::Write;

use anyhow::{Context, Result};
use smd_core::evt_theory::{format_sig1, rate_table};

use crate::{RatesArgs, Status};

pub const HEADER: [&str; 10] = ["block", "family", "params", "first", "second", "m", "pe", "ne", "length_l", "length_l_sig1"];

/// The rate table as CSV text. Hyphenated cells become empty fields.
pub fn render(n: u64) -> Result<Vec<u8>> {
    let rows = rate_table(n)?;
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(HEADER)?;
    for row in &rows {
        for cell in &row.cells {
            let l = cell.rates.length_l;
            w.write_record([
                row.block.to_string(),
                row.family.name().to_string(),
                row.params.clone(),
                row.first.clone(),
                row.second.clone(),
                cell.m.to_string(),
                label(cell.rates.pe),
                label(cell.rates.ne),
                l.map(|v| format!("{v:e}")).unwrap_or_default(),
                l.map(format_sig1).unwrap_or_default(),
            ])?;
        }
    }
    Ok(w.into_inner()?)
}

fn label<T: ToString>(e: Option<T>) -> String {
    e.map(|q| q.to_string()).unwrap_or_default()
}

pub fn run(a: &RatesArgs) -> Result<Status> {
    let bytes = render(a.n)?;
    match &a.out {
        Some(path) => std::fs::write(path, &bytes).with_context(|| format!("writing {}", path.display()))?,
        None => std::io::stdout().write_all(&bytes)?,
    }
    Ok(Status::Ok)
}
