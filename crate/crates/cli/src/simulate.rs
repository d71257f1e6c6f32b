use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use smd_core::par::Workers;
use smd_core::sim_harness::{run_table, Estimator, Sweep, TableConfig, CSV_HEADER, LONG_RUN_REPS};
use smd_core::TailFamily;

use crate::{SimulateArgs, Status};

/// Parses `3`, `-1/2` or `0.25`.
pub fn parse_number(s: &str) -> Result<f64> {
    let s = s.trim();
    let v = match s.split_once('/') {
        Some((a, b)) => {
            let (a, b): (f64, f64) = (a.trim().parse()?, b.trim().parse()?);
            if b == 0.0 {
                bail!("zero denominator in '{s}'");
            }
            a / b
        }
        None => s.parse()?,
    };
    if !v.is_finite() {
        bail!("'{s}' is not finite");
    }
    Ok(v)
}

/// Builds a family from its machine name and a comma-separated parameter list.
pub fn parse_family(name: &str, shape: &str) -> Result<TailFamily> {
    let params: Vec<f64> = shape
        .split(',')
        .map(|p| parse_number(p).with_context(|| format!("bad --shape value '{p}'")))
        .collect::<Result<_>>()?;
    let want = |k: usize| -> Result<()> {
        if params.len() != k {
            bail!("family '{name}' takes {k} parameter(s) in --shape, got {}", params.len());
        }
        Ok(())
    };
    let family = match name {
        "pareto" => {
            want(1)?;
            TailFamily::pareto(params[0])?
        }
        "t" | "student_t" => {
            want(1)?;
            TailFamily::student_t(params[0])?
        }
        "burr" => {
            want(2)?;
            TailFamily::burr(params[0], params[1])?
        }
        "frechet" => {
            want(1)?;
            TailFamily::frechet(params[0])?
        }
        "gev_frechet" => {
            want(1)?;
            TailFamily::gev_frechet(params[0])?
        }
        "weibull" => match params.len() {
            1 => TailFamily::weibull_class(params[0], 1.0)?,
            _ => {
                want(2)?;
                TailFamily::weibull_class(params[0], params[1])?
            }
        },
        "rev_burr" => {
            want(2)?;
            TailFamily::reversed_burr(params[0], params[1])?
        }
        other => bail!("unknown family '{other}' (pareto, t, burr, frechet, gev_frechet, weibull, rev_burr)"),
    };
    Ok(family)
}

fn table_from_args(a: &SimulateArgs) -> Result<TableConfig> {
    let mut table = match &a.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("cannot read config {}", path.display()))?;
            TableConfig::from_toml_str(&text).with_context(|| format!("invalid config {}", path.display()))?
        }
        None => {
            let (Some(family), Some(n), Some(m)) = (&a.family, a.n, a.m) else {
                bail!("give --config, or all of --family, --n and --m");
            };
            let family = parse_family(family, a.shape.as_deref().unwrap_or(""))?;
            let mut t = TableConfig::from_toml_str("")?;
            t.sweep.push(Sweep { families: vec![family], n: vec![n], p: Vec::new(), m: vec![m] });
            t
        }
    };
    if let Some(seed) = a.seed {
        table.master_seed = seed;
    }
    if let Some(reps) = a.reps {
        table.reps = reps;
    }
    if a.long_run {
        table.reps = LONG_RUN_REPS;
    }
    if let Some(g) = a.grid {
        table.grid_points = g;
    }
    if let Some(e) = &a.estimators {
        table.estimators = match e.trim() {
            "both" => vec![Estimator::Pe, Estimator::Ne],
            list => list.split(',').map(str::parse).collect::<smd_core::Result<_>>()?,
        };
    }
    if let Some(b) = &a.block {
        table.block = b.parse()?;
    }
    if let Some(h) = &a.bandwidth {
        table.bandwidth = h.parse()?;
    }
    Ok(table)
}

fn output_paths(prefix: &std::path::Path) -> (PathBuf, PathBuf) {
    let base = prefix.as_os_str().to_string_lossy();
    let base = base.strip_suffix(".csv").unwrap_or(&base);
    (PathBuf::from(format!("{base}.csv")), PathBuf::from(format!("{base}.txt")))
}

pub fn run(a: &SimulateArgs) -> Result<Status> {
    let table = table_from_args(a)?;
    let cells = table.cells()?;
    if cells.is_empty() {
        bail!("config defines no cells");
    }
    let report = run_table(&cells, Workers(a.workers));
    let text = report.render_text();
    match &a.out {
        Some(prefix) => {
            let (csv_path, txt_path) = output_paths(prefix);
            let mut w = csv::Writer::from_path(&csv_path).with_context(|| format!("writing {}", csv_path.display()))?;
            w.write_record(CSV_HEADER)?;
            for r in report.records() {
                w.write_record(&r)?;
            }
            w.flush()?;
            std::fs::write(&txt_path, &text).with_context(|| format!("writing {}", txt_path.display()))?;
        }
        None => print!("{text}"),
    }
    let failed = report.failed_cells();
    if failed > 0 {
        eprintln!("warning: {failed} of {} cells failed", cells.len());
    }
    if failed == cells.len() {
        bail!("every cell failed");
    }
    Ok(Status::Ok)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_and_fractions() {
        assert_eq!(parse_number("1/2").unwrap(), 0.5);
        assert_eq!(parse_number(" -1/3 ").unwrap(), -1.0 / 3.0);
        assert_eq!(parse_number("2.5").unwrap(), 2.5);
        assert!(parse_number("1/0").is_err());
        assert!(parse_number("x").is_err());
    }

    #[test]
    fn families_from_flags() {
        assert_eq!(parse_family("pareto", "3").unwrap(), TailFamily::Pareto { shape: 3.0 });
        assert_eq!(parse_family("weibull", "1/2").unwrap(), TailFamily::WeibullClass { kappa: 0.5, c: 1.0 });
        assert_eq!(parse_family("rev_burr", "-1,-1/3").unwrap(), TailFamily::ReversedBurr { c: -1.0, ell: -1.0 / 3.0 });
        assert!(parse_family("burr", "1").is_err());
        assert!(parse_family("pareto", "-1").is_err());
        assert!(parse_family("gumbel", "1").is_err());
    }
}
