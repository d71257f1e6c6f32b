use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::Serialize;
use smd_core::gev_fit::{FitOptions, PeEstimator};
use smd_core::kernel_est::{bandwidth_plugin, BandwidthMethod, KernelCdf};
use smd_core::{Bandwidth, KernelSpec};

use crate::ingest::ingest_csv;
use crate::{FitArgs, KernelArg, Status};

/// Fewest blocks the data fit accepts. Lower than the library default so that
/// a century of annual values with k = round(sqrt n) still fits.
const MIN_BLOCKS: usize = 5;
/// Upper level of the SMD that the curve grid reaches.
const TOP: f64 = 0.999;

#[derive(Serialize)]
struct PeSummary {
    gamma: f64,
    scale: f64,
    loc: f64,
    /// Parameters of the horizon-m law `G^{m/k}`.
    smd_scale: f64,
    smd_loc: f64,
    loglik: f64,
    converged: bool,
}

#[derive(Serialize)]
struct NeSummary {
    bandwidth: f64,
    method: BandwidthMethod,
    kernel: &'static str,
}

#[derive(Serialize)]
struct Exceedance {
    x: f64,
    pe: Option<f64>,
    ne: Option<f64>,
}

#[derive(Serialize)]
struct Summary {
    input: String,
    column: String,
    n: usize,
    min: f64,
    max: f64,
    m: u32,
    k: Option<usize>,
    n_blocks: Option<usize>,
    pe: Option<PeSummary>,
    ne: Option<NeSummary>,
    exceedance: Vec<Exceedance>,
    warnings: Vec<String>,
}

fn parse_estimators(s: &str) -> Result<(bool, bool)> {
    match s.trim().to_ascii_lowercase().as_str() {
        "both" | "pe,ne" | "ne,pe" => Ok((true, true)),
        "pe" => Ok((true, false)),
        "ne" => Ok((false, true)),
        other => bail!("--estimators must be pe, ne or both, got '{other}'"),
    }
}

fn block_size(s: &str, n: usize) -> Result<usize> {
    if s == "auto" {
        return Ok(((n as f64).sqrt().round() as usize).max(2));
    }
    match s.parse::<usize>() {
        Ok(k) if k >= 2 => Ok(k),
        _ => bail!("--block must be auto or an integer >= 2, got '{s}'"),
    }
}

fn bandwidth(s: &str, data: &[f64], kernel: &KernelSpec) -> Result<Bandwidth> {
    if s == "auto" || s == "plug-in" {
        return Ok(bandwidth_plugin(data, kernel)?);
    }
    let h: f64 = s.parse().with_context(|| format!("--bandwidth must be auto or a number, got '{s}'"))?;
    Ok(Bandwidth::fixed(h)?)
}

/// Smallest grid point where `F̂^m` reaches `level`, by bisection on `F̂`.
fn ne_quantile(est: &KernelCdf, m: f64, level: f64, lo: f64, hi: f64) -> f64 {
    let target = level.powf(1.0 / m);
    let width = est.bandwidth();
    let mut hi = hi;
    while est.cdf(hi) < target {
        hi += 10.0 * width;
    }
    let mut lo = lo;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if est.cdf(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

/// Shortest round-trip text, in exponent form for tiny magnitudes.
fn num(v: f64) -> String {
    if v != 0.0 && v.abs() < 1e-4 {
        format!("{v:e}")
    } else {
        v.to_string()
    }
}

pub fn output_paths(prefix: &Path) -> (PathBuf, PathBuf) {
    let base = prefix.as_os_str().to_string_lossy();
    (PathBuf::from(format!("{base}_curve.csv")), PathBuf::from(format!("{base}_summary.json")))
}

pub fn run(a: &FitArgs) -> Result<Status> {
    let series = ingest_csv(&a.input, a.column.as_deref())?;
    let data = &series.values;
    let n = data.len();
    eprintln!("{}: {} values of '{}', min {}, max {}", a.input.display(), n, series.label, series.min(), series.max());
    let (want_pe, want_ne) = parse_estimators(&a.estimators)?;
    if a.m == 0 {
        bail!("--m must be >= 1");
    }
    if a.grid < 2 {
        bail!("--grid must be >= 2");
    }
    let m = f64::from(a.m);
    let mut warnings = Vec::new();

    let mut k = None;
    let mut pe = None;
    if want_pe {
        if n < 50 {
            bail!("the parametric fit needs at least 50 values, got {n}");
        }
        let size = block_size(&a.block, n)?;
        k = Some(size);
        let opts = FitOptions { min_blocks: MIN_BLOCKS, ..FitOptions::default() };
        match PeEstimator::fit(data, size, Some(m), &opts) {
            Ok(est) if est.fit.converged => pe = Some(est),
            Ok(_) => warnings.push("GEV fit did not converge; SMD_pe omitted".to_string()),
            Err(e) => warnings.push(format!("GEV fit failed ({e}); SMD_pe omitted")),
        }
    }
    let mut ne_method = BandwidthMethod::PlugIn;
    let ne = if want_ne {
        let kernel = match a.kernel {
            KernelArg::Gaussian => KernelSpec::gaussian(),
            KernelArg::Epanechnikov => KernelSpec::epanechnikov(),
        };
        let h = bandwidth(&a.bandwidth, data, &kernel)?;
        ne_method = h.method;
        Some(KernelCdf::new(data, kernel, h)?)
    } else {
        None
    };
    if pe.is_none() && ne.is_none() {
        bail!("no estimator could be computed: {}", warnings.join("; "));
    }

    let (lo, mut hi) = (series.min(), series.max());
    if let Some(p) = &pe {
        if let Ok(q) = p.params.quantile(TOP) {
            hi = hi.max(q);
        }
    }
    if let Some(est) = &ne {
        hi = hi.max(ne_quantile(est, m, TOP, lo, series.max()));
    }
    let xs: Vec<f64> = (0..a.grid).map(|i| lo + (hi - lo) * i as f64 / (a.grid - 1) as f64).collect();

    let (curve_path, summary_path) = output_paths(&a.out);
    let mut w = csv::Writer::from_path(&curve_path).with_context(|| format!("writing {}", curve_path.display()))?;
    let mut header = vec!["x"];
    if pe.is_some() {
        header.push("SMD_pe");
    }
    if ne.is_some() {
        header.push("SMD_ne");
    }
    w.write_record(&header)?;
    for &x in &xs {
        let mut rec = vec![num(x)];
        if let Some(p) = &pe {
            rec.push(num(p.cdf(x)));
        }
        if let Some(est) = &ne {
            rec.push(num(est.smd(m, x)));
        }
        w.write_record(&rec)?;
    }
    w.flush()?;

    let exceedance = a
        .threshold
        .iter()
        .map(|&x| Exceedance { x, pe: pe.as_ref().map(|p| 1.0 - p.cdf(x)), ne: ne.as_ref().map(|e| 1.0 - e.smd(m, x)) })
        .collect();
    let summary = Summary {
        input: a.input.display().to_string(),
        column: series.label.clone(),
        n,
        min: series.min(),
        max: series.max(),
        m: a.m,
        k,
        n_blocks: k.map(|k| n / k),
        pe: pe.as_ref().map(|p| PeSummary {
            gamma: p.fit.params.gamma,
            scale: p.fit.params.scale,
            loc: p.fit.params.loc,
            smd_scale: p.params.scale,
            smd_loc: p.params.loc,
            loglik: p.fit.loglik,
            converged: p.fit.converged,
        }),
        ne: ne.as_ref().map(|e| NeSummary {
            bandwidth: e.bandwidth(),
            method: ne_method,
            kernel: e.kernel().name(),
        }),
        exceedance,
        warnings: warnings.clone(),
    };
    std::fs::write(&summary_path, serde_json::to_string_pretty(&summary)? + "\n")
        .with_context(|| format!("writing {}", summary_path.display()))?;

    for msg in &warnings {
        eprintln!("warning: {msg}");
    }
    Ok(if warnings.is_empty() { Status::Ok } else { Status::Partial })
}
