//! Kernel distribution function estimation, the nonparametric estimator
//! `NE = F̂^m`, and bandwidth selection.

mod kernels;
mod plugin;

pub use kernels::{epanechnikov, gaussian, KernelKind, KernelSpec};
pub use plugin::{bandwidth_plugin, density_functional};

use serde::{Deserialize, Serialize};

use crate::distributions::TailClassParams;
use crate::error::{Error, Result};
use crate::evt_theory;

/// How a bandwidth was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BandwidthMethod {
    PlugIn,
    TheoryOracle,
    Fixed,
}

/// A bandwidth value with its provenance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bandwidth {
    pub value: f64,
    pub method: BandwidthMethod,
}

impl Bandwidth {
    pub fn new(value: f64, method: BandwidthMethod) -> Result<Self> {
        if value > 0.0 && value.is_finite() {
            Ok(Self { value, method })
        } else {
            Err(Error::InvalidParameter(format!("bandwidth must be finite and > 0, got {value}")))
        }
    }

    pub fn fixed(value: f64) -> Result<Self> {
        Self::new(value, BandwidthMethod::Fixed)
    }
}

/// The theory-optimal bandwidth for a known class (see
/// [`evt_theory::optimal_bandwidth`]).
pub fn bandwidth_oracle(class: &TailClassParams, kernel: &KernelSpec, x: f64, n: f64) -> Result<Bandwidth> {
    Bandwidth::new(evt_theory::optimal_bandwidth(class, kernel, x, n)?, BandwidthMethod::TheoryOracle)
}

/// A kernel distribution estimate over sorted data, ready for repeated
/// evaluation. Immutable once built.
#[derive(Debug, Clone)]
pub struct KernelCdf {
    sorted: Vec<f64>,
    kernel: KernelSpec,
    h: f64,
}

impl KernelCdf {
    pub fn new(data: &[f64], kernel: KernelSpec, h: Bandwidth) -> Result<Self> {
        if data.is_empty() {
            return Err(Error::EmptyData);
        }
        if data.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidParameter("data must be finite".into()));
        }
        let mut sorted = data.to_vec();
        sorted.sort_by(f64::total_cmp);
        Ok(Self { sorted, kernel, h: h.value })
    }

    pub fn bandwidth(&self) -> f64 {
        self.h
    }

    pub fn kernel(&self) -> &KernelSpec {
        &self.kernel
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    /// Indices bounding the points whose kernel contribution at `x` is
    /// neither 0 nor 1.
    fn window(&self, x: f64) -> (usize, usize) {
        let reach = self.kernel.cutoff() * self.h;
        let lo = self.sorted.partition_point(|&v| v <= x - reach);
        let hi = self.sorted.partition_point(|&v| v < x + reach);
        (lo, hi.max(lo))
    }

    /// `F̂(x) = n⁻¹ Σ K((x - X_i)/h)`.
    pub fn cdf(&self, x: f64) -> f64 {
        let (lo, hi) = self.window(x);
        let inner: f64 = self.sorted[lo..hi]
            .iter()
            .map(|&v| self.kernel.integrated((x - v) / self.h))
            .sum();
        ((lo as f64 + inner) / self.sorted.len() as f64).clamp(0.0, 1.0)
    }

    /// `1 - F̂(x)`, summed directly so it keeps relative accuracy near 0.
    pub fn survival(&self, x: f64) -> f64 {
        let (lo, hi) = self.window(x);
        let inner: f64 = self.sorted[lo..hi]
            .iter()
            .map(|&v| self.kernel.integrated((v - x) / self.h))
            .sum();
        let above = (self.sorted.len() - hi) as f64;
        ((above + inner) / self.sorted.len() as f64).clamp(0.0, 1.0)
    }

    pub fn log_cdf(&self, x: f64) -> f64 {
        let f = self.cdf(x);
        if f > 0.5 {
            (-self.survival(x)).ln_1p()
        } else {
            f.ln()
        }
    }

    /// `F̂^m(x)`.
    pub fn smd(&self, m: f64, x: f64) -> f64 {
        if m == 1.0 {
            return self.cdf(x);
        }
        crate::special::pow_from_log(self.log_cdf(x), m)
    }
}

pub fn kernel_cdf(data: &[f64], kernel: &KernelSpec, h: &Bandwidth, x: f64) -> Result<f64> {
    Ok(KernelCdf::new(data, *kernel, *h)?.cdf(x))
}

pub fn ne_estimate(data: &[f64], kernel: &KernelSpec, h: &Bandwidth, m: u32, x: f64) -> Result<f64> {
    if m == 0 {
        return Err(Error::InvalidParameter("horizon m must be >= 1".into()));
    }
    Ok(KernelCdf::new(data, *kernel, *h)?.smd(f64::from(m), x))
}
