//! The generalized extreme value law, block maxima, maximum-likelihood
//! fitting, and the parametric estimator `PE = G_{γ̂_k}(x)`.

mod mle;
pub mod optim;

pub use mle::{fit_block_maxima, fit_mle, fit_mle_with, init_params, FitOptions, FitResult};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Below this |γ| the Gumbel limit (with a first-order correction) is used.
pub const GUMBEL_SWITCH: f64 = 1e-7;

/// Shape, scale and location of a GEV law.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GevParams {
    pub gamma: f64,
    pub scale: f64,
    pub loc: f64,
}

impl GevParams {
    pub fn new(gamma: f64, scale: f64, loc: f64) -> Result<Self> {
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::InvalidParameter(format!("GEV scale must be > 0, got {scale}")));
        }
        if !gamma.is_finite() || !loc.is_finite() {
            return Err(Error::InvalidParameter("GEV shape and location must be finite".into()));
        }
        Ok(Self { gamma, scale, loc })
    }

    /// `u = ln(1 + γz)/γ` at the standardized point, or `None` outside the
    /// support.
    fn reduced(&self, x: f64) -> Option<f64> {
        let z = (x - self.loc) / self.scale;
        let g = self.gamma;
        if g.abs() < GUMBEL_SWITCH {
            // ln(1 + γz)/γ = z - γz²/2 + O(γ²)
            return Some(z - 0.5 * g * z * z);
        }
        let gz = g * z;
        if gz <= -1.0 {
            None
        } else {
            Some(gz.ln_1p() / g)
        }
    }

    /// `G(x) = exp(-(1 + γ(x-b)/a)^{-1/γ})`.
    pub fn cdf(&self, x: f64) -> f64 {
        if x.is_nan() {
            return f64::NAN;
        }
        match self.reduced(x) {
            Some(u) => (-(-u).exp()).exp(),
            None => {
                if self.gamma > 0.0 {
                    0.0
                } else {
                    1.0
                }
            }
        }
    }

    /// Log density; `-inf` outside the support.
    pub fn logpdf(&self, x: f64) -> f64 {
        match self.reduced(x) {
            Some(u) => -self.scale.ln() - (1.0 + self.gamma) * u - (-u).exp(),
            None => f64::NEG_INFINITY,
        }
    }

    /// Quantile `b + a((-ln q)^{-γ} - 1)/γ`.
    pub fn quantile(&self, q: f64) -> Result<f64> {
        if !(q > 0.0 && q < 1.0) {
            return Err(Error::ProbabilityOutOfRange(q));
        }
        let y = -(-q.ln()).ln();
        let g = self.gamma;
        let z = if g.abs() < GUMBEL_SWITCH {
            y + 0.5 * g * y * y
        } else {
            (g * y).exp_m1() / g
        };
        Ok(self.loc + self.scale * z)
    }

    /// Lower (γ > 0) or upper (γ < 0) support endpoint, if finite.
    pub fn endpoint(&self) -> Option<f64> {
        if self.gamma.abs() < GUMBEL_SWITCH {
            None
        } else {
            Some(self.loc - self.scale / self.gamma)
        }
    }

    /// Parameters of `G^r`, which by max-stability is again GEV.
    pub fn power(&self, r: f64) -> Self {
        let g = self.gamma;
        let (scale, shift) = if g.abs() < GUMBEL_SWITCH {
            (self.scale, self.scale * r.ln())
        } else {
            let s = r.powf(g);
            (self.scale * s, self.scale * (s - 1.0) / g)
        };
        Self { gamma: g, scale, loc: self.loc + shift }
    }

    /// Log-likelihood of a sample.
    pub fn loglik(&self, xs: &[f64]) -> f64 {
        let mut total = 0.0;
        for &x in xs {
            let l = self.logpdf(x);
            if l == f64::NEG_INFINITY {
                return l;
            }
            total += l;
        }
        total
    }
}

pub fn gev_cdf(params: &GevParams, x: f64) -> f64 {
    params.cdf(x)
}

pub fn gev_logpdf(params: &GevParams, x: f64) -> f64 {
    params.logpdf(x)
}

/// Maxima of consecutive non-overlapping blocks of length `k`; a trailing
/// partial block is dropped.
pub fn block_maxima(data: &[f64], k: usize) -> Result<Vec<f64>> {
    if k < 2 {
        return Err(Error::InvalidParameter(format!("block size must be >= 2, got {k}")));
    }
    if k > data.len() {
        return Err(Error::BlockTooLarge { block: k, len: data.len() });
    }
    Ok(data
        .chunks_exact(k)
        .map(|c| c.iter().copied().fold(f64::NEG_INFINITY, f64::max))
        .collect())
}

/// A fitted parametric SMD estimator.
#[derive(Debug, Clone, PartialEq)]
pub struct PeEstimator {
    pub fit: FitResult,
    /// Parameters actually used for evaluation (rescaled when requested).
    pub params: GevParams,
}

impl PeEstimator {
    /// Fits on `data` with block size `k`. With `rescale_to = Some(m)` the
    /// estimate is `G^{m/k}` instead of `G` itself.
    pub fn fit(data: &[f64], k: usize, rescale_to: Option<f64>, opts: &FitOptions) -> Result<Self> {
        let fit = fit_block_maxima(data, k, opts)?;
        let params = match rescale_to {
            Some(m) => fit.params.power(m / k as f64),
            None => fit.params,
        };
        Ok(Self { fit, params })
    }

    pub fn cdf(&self, x: f64) -> f64 {
        self.params.cdf(x)
    }
}

/// `G_{γ̂_k}(x)` with parameters fitted to the size-`k` block maxima of
/// `data`.
pub fn pe_estimate(data: &[f64], k: usize, x: f64) -> Result<f64> {
    Ok(PeEstimator::fit(data, k, None, &FitOptions::default())?.cdf(x))
}
