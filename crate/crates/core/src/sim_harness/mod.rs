//! Replicated Monte Carlo MISE experiments comparing PE and NE.

mod config;
mod table;

pub use config::{
    BandwidthRule, BlockRule, Estimator, ExperimentConfig, KernelRule, Sweep, TableConfig, DESK_REPS,
    LONG_RUN_REPS,
};
pub use table::{run_table, CellOutcome, TableReport, CSV_HEADER};

use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::distributions::SmdSpec;
use crate::error::{Error, Result};
use crate::gev_fit::{FitOptions, PeEstimator};
use crate::kernel_est::{bandwidth_oracle, bandwidth_plugin, Bandwidth, KernelCdf};
use crate::par::{map_indexed, Workers};
use crate::special::pairwise_sum;

/// The integration grid `[Q_m(0.1), Q_m(0.9)]` with the true SMD on it.
#[derive(Debug, Clone)]
pub struct MiseGrid {
    xs: Vec<f64>,
    truth: Vec<f64>,
}

impl MiseGrid {
    pub fn new(spec: &SmdSpec, grid_points: usize) -> Result<Self> {
        if grid_points < 2 {
            return Err(Error::InvalidParameter(format!("grid_points must be >= 2, got {grid_points}")));
        }
        let lo = spec.quantile(0.1)?;
        let hi = spec.quantile(0.9)?;
        let step = (hi - lo) / (grid_points - 1) as f64;
        let xs: Vec<f64> = (0..grid_points)
            .map(|i| if i + 1 == grid_points { hi } else { lo + step * i as f64 })
            .collect();
        let truth = xs.iter().map(|&x| spec.cdf(x)).collect();
        Ok(Self { xs, truth })
    }

    pub fn points(&self) -> &[f64] {
        &self.xs
    }

    /// `L_m⁻¹ ∫ (estimate - F^m)²` by the trapezoidal rule. Because the grid
    /// spans exactly `L_m`, this is a weighted average of the squared errors.
    pub fn mise<F: Fn(f64) -> f64>(&self, estimate: F) -> f64 {
        let last = self.xs.len() - 1;
        let terms: Vec<f64> = self
            .xs
            .iter()
            .zip(&self.truth)
            .enumerate()
            .map(|(i, (&x, &t))| {
                let d = estimate(x) - t;
                if i == 0 || i == last {
                    0.5 * d * d
                } else {
                    d * d
                }
            })
            .collect();
        pairwise_sum(&terms) / last as f64
    }
}

/// MISE of `estimate` against `F^m` of `spec` over `grid_points` points.
pub fn mise<F: Fn(f64) -> f64>(estimate: F, spec: &SmdSpec, grid_points: usize) -> Result<f64> {
    Ok(MiseGrid::new(spec, grid_points)?.mise(estimate))
}

/// Mean and population standard deviation of one estimator's MISE.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimatorSummary {
    pub mean: f64,
    pub sd: f64,
    /// Replicates that entered the mean.
    pub used: usize,
    /// Replicates excluded because the estimator could not be built.
    pub failures: usize,
}

impl EstimatorSummary {
    fn from_values(values: &[f64], failures: usize) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let n = values.len() as f64;
        let mean = pairwise_sum(values) / n;
        let dev: Vec<f64> = values.iter().map(|v| (v - mean).powi(2)).collect();
        let sd = (pairwise_sum(&dev) / n).sqrt();
        Some(Self { mean, sd, used: values.len(), failures })
    }
}

/// Result of one experiment cell. Equality ignores the wall time.
#[derive(Debug, Clone)]
pub struct MiseReport {
    pub config: ExperimentConfig,
    pub block_size: usize,
    pub pe: Option<EstimatorSummary>,
    pub ne: Option<EstimatorSummary>,
    pub pe_failures: usize,
    pub ne_failures: usize,
    pub wall_time: Duration,
}

impl PartialEq for MiseReport {
    fn eq(&self, other: &Self) -> bool {
        self.config == other.config
            && self.block_size == other.block_size
            && self.pe == other.pe
            && self.ne == other.ne
            && self.pe_failures == other.pe_failures
            && self.ne_failures == other.ne_failures
    }
}

impl MiseReport {
    pub fn summary(&self, e: Estimator) -> Option<&EstimatorSummary> {
        match e {
            Estimator::Pe => self.pe.as_ref(),
            Estimator::Ne => self.ne.as_ref(),
        }
    }

    pub fn failures(&self, e: Estimator) -> usize {
        match e {
            Estimator::Pe => self.pe_failures,
            Estimator::Ne => self.ne_failures,
        }
    }
}

/// The random stream of replicate `r`: one ChaCha key per run, one stream
/// per replicate.
pub fn replicate_rng(master_seed: u64, r: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(r as u64);
    rng
}

struct Replicate {
    pe: Option<f64>,
    ne: Option<f64>,
}

/// Runs all replicates of one cell. The output depends only on the config
/// (including its seed), not on `workers`.
pub fn run_cell(config: &ExperimentConfig, workers: Workers) -> Result<MiseReport> {
    config.validate()?;
    let started = Instant::now();
    let spec = SmdSpec::new(config.family, config.m)?;
    let grid = MiseGrid::new(&spec, config.grid_points)?;
    let k = config.block_size();
    let kernel = config.kernel_spec();
    let m = f64::from(config.m);
    let fit_opts = FitOptions { min_blocks: config.min_blocks, ..FitOptions::default() };
    let oracle = match config.bandwidth {
        crate::sim_harness::BandwidthRule::Oracle => {
            let x = spec.quantile(0.5)?;
            Some(bandwidth_oracle(&config.family.class_params(), &kernel, x, config.n as f64)?)
        }
        _ => None,
    };
    let rescale = config.rescale_pe.then_some(m);

    let one = |r: usize| -> Replicate {
        let mut rng = replicate_rng(config.master_seed, r);
        let data = config.family.sample(config.n, &mut rng);
        let pe = if config.wants(Estimator::Pe) {
            match PeEstimator::fit(&data, k, rescale, &fit_opts) {
                Ok(est) if est.fit.converged => Some(grid.mise(|x| est.cdf(x))),
                _ => None,
            }
        } else {
            None
        };
        let ne = if config.wants(Estimator::Ne) {
            let h = match config.bandwidth {
                BandwidthRule::PlugIn => bandwidth_plugin(&data, &kernel),
                BandwidthRule::Oracle => Ok(oracle.expect("computed above")),
                BandwidthRule::Fixed(h) => Bandwidth::fixed(h),
            };
            h.and_then(|h| KernelCdf::new(&data, kernel, h))
                .ok()
                .map(|est| grid.mise(|x| est.smd(m, x)))
        } else {
            None
        };
        Replicate { pe, ne }
    };
    let results = map_indexed(config.reps, workers, one);

    let pe_vals: Vec<f64> = results.iter().filter_map(|r| r.pe).collect();
    let ne_vals: Vec<f64> = results.iter().filter_map(|r| r.ne).collect();
    let pe_failures = if config.wants(Estimator::Pe) { config.reps - pe_vals.len() } else { 0 };
    let ne_failures = if config.wants(Estimator::Ne) { config.reps - ne_vals.len() } else { 0 };
    let pe = EstimatorSummary::from_values(&pe_vals, pe_failures);
    let ne = EstimatorSummary::from_values(&ne_vals, ne_failures);
    if pe.is_none() && ne.is_none() {
        return Err(Error::AllReplicatesFailed(config.reps));
    }
    Ok(MiseReport {
        config: config.clone(),
        block_size: k,
        pe,
        ne,
        pe_failures,
        ne_failures,
        wall_time: started.elapsed(),
    })
}
