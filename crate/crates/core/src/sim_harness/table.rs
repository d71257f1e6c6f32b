use std::fmt::Write as _;

use super::{run_cell, Estimator, ExperimentConfig, MiseReport};
use crate::error::Error;
use crate::par::Workers;

/// Column names of the CSV form of a [`TableReport`].
pub const CSV_HEADER: [&str; 10] =
    ["family", "params", "n", "m", "k", "estimator", "mean_x100", "sd_x100", "reps", "failures"];

/// One cell of a table run.
#[derive(Debug, Clone, PartialEq)]
pub struct CellOutcome {
    pub config: ExperimentConfig,
    pub result: std::result::Result<MiseReport, Error>,
}

/// Cells in the order they were configured.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TableReport {
    pub cells: Vec<CellOutcome>,
}

/// Runs every cell; a failing cell is recorded, not propagated.
pub fn run_table(configs: &[ExperimentConfig], workers: Workers) -> TableReport {
    let cells = configs
        .iter()
        .map(|c| CellOutcome { config: c.clone(), result: run_cell(c, workers) })
        .collect();
    TableReport { cells }
}

fn x100(v: f64) -> String {
    format!("{:.3}", 100.0 * v)
}

impl TableReport {
    pub fn failed_cells(&self) -> usize {
        self.cells.iter().filter(|c| c.result.is_err()).count()
    }

    /// One record per (cell, estimator), matching [`CSV_HEADER`].
    pub fn records(&self) -> Vec<Vec<String>> {
        let mut out = Vec::new();
        for cell in &self.cells {
            let c = &cell.config;
            let k = c.block_size();
            let mut estimators = c.estimators.clone();
            estimators.sort();
            estimators.dedup();
            for e in estimators {
                let k_field = if e == Estimator::Pe { k.to_string() } else { String::new() };
                let (mean, sd, failures) = match &cell.result {
                    Ok(report) => match report.summary(e) {
                        Some(s) => (x100(s.mean), x100(s.sd), s.failures),
                        None => (String::new(), String::new(), report.failures(e)),
                    },
                    Err(_) => (String::new(), String::new(), c.reps),
                };
                out.push(vec![
                    c.family.name().to_string(),
                    c.family.params_label(),
                    c.n.to_string(),
                    c.m.to_string(),
                    k_field,
                    e.label().to_string(),
                    mean,
                    sd,
                    c.reps.to_string(),
                    failures.to_string(),
                ]);
            }
        }
        out
    }

    /// Fixed-width text rendering, values scaled by 100 to three decimals.
    pub fn render_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "{:<12} {:<10} {:>6} {:>5} {:>5} {:<3} {:>10} {:>10} {:>6} {:>8}",
            "family", "params", "n", "m", "k", "est", "MISEx100", "sdx100", "reps", "failures"
        );
        for r in self.records() {
            let _ = writeln!(
                s,
                "{:<12} {:<10} {:>6} {:>5} {:>5} {:<3} {:>10} {:>10} {:>6} {:>8}",
                r[0], r[1], r[2], r[3], r[4], r[5],
                if r[6].is_empty() { "failed" } else { &r[6] },
                r[7], r[8], r[9]
            );
        }
        for cell in &self.cells {
            if let Err(e) = &cell.result {
                let c = &cell.config;
                let _ = writeln!(s, "# {} ({}), n={}, m={}: {e}", c.family.name(), c.family.params_label(), c.n, c.m);
            }
        }
        s
    }
}
