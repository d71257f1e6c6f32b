//! Closed-form asymptotics: norming constants, the bias and rate terms of
//! both estimators, optimal bandwidths, and the convergence-rate table.

mod rates;

pub use rates::{
    format_sig1, rate_exponents, rate_table, round_sig1, RateCell, RateExponents, RateRow,
};

use crate::distributions::{SmdSpec, TailClassParams};
use crate::error::{Error, Result};
use crate::gev_fit::{GevParams, GUMBEL_SWITCH};
use crate::kernel_est::KernelSpec;

/// Norming constants `(γ, a_n, b_n)` for horizon `n`, plus `θ = 1 - 1/κ` in
/// the Weibull class.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormingConstants {
    pub gamma: f64,
    pub a: f64,
    pub b: f64,
    pub theta: Option<f64>,
}

impl NormingConstants {
    /// The GEV law `G_γ((x - b)/a)`.
    pub fn gev(&self) -> GevParams {
        GevParams { gamma: self.gamma, scale: self.a, loc: self.b }
    }
}

pub fn norming_constants(class: &TailClassParams, horizon: f64) -> Result<NormingConstants> {
    if !(horizon >= 1.0) {
        return Err(Error::InvalidParameter(format!("horizon must be >= 1, got {horizon}")));
    }
    let nc = match *class {
        TailClassParams::Hall { alpha, a, .. } => {
            let gamma = 1.0 / alpha;
            let b = (a * horizon).powf(gamma);
            NormingConstants { gamma, a: gamma * b, b, theta: None }
        }
        TailClassParams::WeibullTail { kappa, c } => {
            let lh = horizon.ln();
            if !(lh > 0.0) {
                return Err(Error::InvalidParameter(
                    "Weibull-class norming needs horizon > 1".into(),
                ));
            }
            let theta = 1.0 - 1.0 / kappa;
            NormingConstants {
                gamma: 0.0,
                a: c.powf(-1.0 / kappa) * lh.powf(-theta) / kappa,
                b: (lh / c).powf(1.0 / kappa),
                theta: Some(theta),
            }
        }
        TailClassParams::Bounded { mu, d, x_star, .. } => {
            let gamma = 1.0 / mu;
            let s = (d * horizon).powf(gamma);
            NormingConstants { gamma, a: -gamma * s, b: x_star - s, theta: None }
        }
    };
    Ok(nc)
}

/// `M_n`, the expected number of exceedances of `x` among `m` draws to first
/// order.
pub fn big_m(class: &TailClassParams, x: f64, m: f64) -> Result<f64> {
    class.require_tail(x)?;
    Ok(match *class {
        TailClassParams::Hall { alpha, a, .. } => a * m * x.powf(-alpha),
        TailClassParams::WeibullTail { kappa, c } => m * (-c * x.powf(kappa)).exp(),
        TailClassParams::Bounded { mu, d, x_star, .. } => d * m * (x_star - x).powf(-mu),
    })
}

/// `K_n`, the analogue of `M_n` under the block-`k` norming.
pub fn big_k(class: &TailClassParams, x: f64, k: f64) -> Result<f64> {
    class.require_tail(x)?;
    Ok(match *class {
        TailClassParams::WeibullTail { kappa, c } => {
            let theta = 1.0 - 1.0 / kappa;
            k.powf(kappa) * (-kappa * c.powf(1.0 / kappa) * k.ln().powf(theta) * x).exp()
        }
        _ => big_m(class, x, k)?,
    })
}

/// `λ_n`, the scale of the MLE bias from the tail approximation.
pub fn lambda_n(class: &TailClassParams, k: f64, m: f64) -> f64 {
    match *class {
        TailClassParams::Hall { beta, .. } => k * m.powf(-2.0 * beta),
        TailClassParams::WeibullTail { .. } => k / m.ln().powi(2),
        TailClassParams::Bounded { sigma, .. } => k * m.powf(2.0 * sigma),
    }
}

/// `τ_n = F^m(x) - G_{γ_k}(x)` with the class norming constants at horizon
/// `k`.
pub fn tau_n(spec: &SmdSpec, k: f64, x: f64) -> Result<f64> {
    let nc = norming_constants(&spec.family.class_params(), k)?;
    Ok(spec.cdf(x) - nc.gev().cdf(x))
}

/// `ξ_n`, the curvature term in the NE bias.
pub fn xi_n(class: &TailClassParams, x: f64) -> Result<f64> {
    class.require_tail(x)?;
    Ok(match *class {
        TailClassParams::Hall { alpha, .. } => alpha * (alpha + 1.0) / (x * x),
        TailClassParams::WeibullTail { kappa, c } => (kappa * c).powi(2) * x.powf(2.0 * kappa - 2.0),
        TailClassParams::Bounded { mu, x_star, .. } => mu * (mu + 1.0) / (x_star - x).powi(2),
    })
}

/// `ω_n`, the ratio entering the optimal bandwidth.
pub fn omega_n(class: &TailClassParams, x: f64) -> Result<f64> {
    class.require_tail(x)?;
    Ok(match *class {
        TailClassParams::Hall { alpha, a, .. } => alpha * x.powf(alpha - 1.0) / a,
        TailClassParams::WeibullTail { kappa, c } => {
            kappa * c * x.powf(kappa - 1.0) * (c * x.powf(kappa)).exp()
        }
        TailClassParams::Bounded { mu, d, x_star, .. } => -mu * (x_star - x).powf(mu - 1.0) / d,
    })
}

/// The vector `η_n` of the PE limit law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EtaVector(pub [f64; 3]);

impl EtaVector {
    /// Inner product with the all-ones vector.
    pub fn sum(&self) -> f64 {
        self.0.iter().sum()
    }
}

pub fn eta_vector(gamma: f64, big_k_value: f64) -> EtaVector {
    let k = big_k_value;
    let lk = k.ln();
    let lead = -(-k).exp() * k;
    let kg = (gamma * lk).exp();
    // 1 - K^γ + γ ln K, written to avoid cancellation
    let first = -(gamma * lk).exp_m1() + gamma * lk;
    let second = if gamma.abs() < GUMBEL_SWITCH {
        -lk
    } else {
        kg * (-gamma * lk).exp_m1() / gamma
    };
    EtaVector([lead * first, lead * second, lead * kg])
}

/// Which case of the exceedance count applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// `M_n ∨ K_n → 0`
    Vanishing,
    /// `M_n, K_n → δ > 0`
    Delta,
    /// `M_n ∧ K_n → ∞`
    Diverging,
}

/// `ζ_n`, the estimation-noise term of the PE rate.
pub fn zeta_n(regime: Regime, n_blocks: f64, gamma: f64, big_k_value: f64) -> f64 {
    let k = big_k_value;
    let v = match regime {
        Regime::Vanishing => k * (gamma * k.ln() + 1.0),
        Regime::Delta => 1.0,
        Regime::Diverging => k.powf(1.0 + gamma) * (-k).exp(),
    };
    v / n_blocks.sqrt()
}

/// The three terms of the PE convergence rate and their sum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeRate {
    pub bias: f64,
    pub tau: f64,
    pub zeta: f64,
}

impl PeRate {
    pub fn total(&self) -> f64 {
        self.bias + self.tau + self.zeta
    }
}

/// `N^{-1/2} λ_n η_nᵀ1 + τ_n + ζ_n` at `x` for a spec with horizon `m`
/// and block size `k`.
pub fn pe_rate(spec: &SmdSpec, k: f64, n_blocks: f64, regime: Regime, x: f64) -> Result<PeRate> {
    let class = spec.family.class_params();
    let kk = big_k(&class, x, k)?;
    let gamma = class.gamma();
    let lambda = lambda_n(&class, k, f64::from(spec.horizon));
    Ok(PeRate {
        bias: lambda * eta_vector(gamma, kk).sum() / n_blocks.sqrt(),
        tau: tau_n(spec, k, x)?,
        zeta: zeta_n(regime, n_blocks, gamma, kk),
    })
}

/// `ν₀ = (2 μ₂)^{-1/3} ψ^{2/3}`.
pub fn nu0(kernel: &KernelSpec) -> f64 {
    kernel.nu0()
}

/// The AMSE-optimal NE bandwidth at `x` for sample size `n`.
pub fn optimal_bandwidth(class: &TailClassParams, kernel: &KernelSpec, x: f64, n: f64) -> Result<f64> {
    let xi = xi_n(class, x)?;
    let omega = omega_n(class, x)?;
    let h3 = 2.0 * omega * kernel.psi_half / (xi * xi * n * kernel.mu2 * kernel.mu2);
    if !(h3 > 0.0 && h3.is_finite()) {
        return Err(Error::InvalidParameter(format!("no finite optimal bandwidth at x={x}")));
    }
    Ok(h3.cbrt())
}

/// Asymptotic bias of `F^m - F̂^m` at `x` under the optimal bandwidth.
pub fn ne_bias(class: &TailClassParams, kernel: &KernelSpec, smd_value: f64, x: f64, m: f64, n: f64) -> Result<f64> {
    let xi = xi_n(class, x)?;
    let omega = omega_n(class, x)?;
    let mm = big_m(class, x, m)?;
    Ok(kernel.nu0() * smd_value * mm * n.powf(-2.0 / 3.0) * xi.cbrt().recip() * omega.powf(2.0 / 3.0))
}

fn check_delta(class: &TailClassParams, m: f64, delta: f64) -> Result<()> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::InvalidParameter(format!("delta must be > 0, got {delta}")));
    }
    if !(m >= 2.0) {
        return Err(Error::InvalidParameter(format!("horizon must be >= 2, got {m}")));
    }
    if matches!(class, TailClassParams::WeibullTail { .. }) && m <= delta {
        return Err(Error::InvalidParameter("Weibull class needs m > delta".into()));
    }
    Ok(())
}

/// Optimal bandwidth in the case `M_n → δ`.
pub fn optimal_bandwidth_delta(
    class: &TailClassParams,
    kernel: &KernelSpec,
    m: f64,
    n: f64,
    delta: f64,
) -> Result<f64> {
    check_delta(class, m, delta)?;
    let gamma = class.gamma();
    let base = (2.0 * (m / delta).powf(1.0 + 3.0 * gamma) * kernel.psi_half
        / (n * kernel.mu2 * kernel.mu2))
        .cbrt();
    let factor = match *class {
        TailClassParams::Hall { alpha, a, .. } => {
            a.powf(gamma) * (alpha.sqrt() * (alpha + 1.0)).powf(-2.0 / 3.0)
        }
        TailClassParams::WeibullTail { kappa, c } => {
            let theta = 1.0 - 1.0 / kappa;
            ((m / delta).ln() / c).powf(-theta) / (kappa * c)
        }
        TailClassParams::Bounded { mu, d, .. } => {
            d.powf(gamma) * ((-mu).sqrt() * (mu + 1.0).abs()).powf(-2.0 / 3.0)
        }
    };
    Ok(base * factor)
}

/// Asymptotic NE bias in the case `M_n → δ`.
pub fn ne_bias_delta(
    class: &TailClassParams,
    kernel: &KernelSpec,
    m: f64,
    n: f64,
    delta: f64,
) -> Result<f64> {
    check_delta(class, m, delta)?;
    let factor = match *class {
        TailClassParams::Hall { alpha, .. } => (alpha / (alpha + 1.0)).cbrt(),
        TailClassParams::WeibullTail { .. } => 1.0,
        TailClassParams::Bounded { mu, .. } => (mu / (mu + 1.0)).cbrt(),
    };
    Ok(kernel.nu0() * (-delta).exp() * delta.cbrt() * (m / n).powf(2.0 / 3.0) * factor)
}

/// The point `x` solving `M_n(x) = δ`.
pub fn delta_point(class: &TailClassParams, m: f64, delta: f64) -> Result<f64> {
    check_delta(class, m, delta)?;
    Ok(match *class {
        TailClassParams::Hall { alpha, a, .. } => (a * m / delta).powf(1.0 / alpha),
        TailClassParams::WeibullTail { kappa, c } => ((m / delta).ln() / c).powf(1.0 / kappa),
        TailClassParams::Bounded { mu, d, x_star, .. } => x_star - (d * m / delta).powf(1.0 / mu),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::TailFamily;

    fn hall(alpha: f64, a: f64) -> TailClassParams {
        TailClassParams::Hall { alpha, beta: 1.0, a, b: 0.0 }
    }
    const WB: TailClassParams = TailClassParams::WeibullTail { kappa: 1.0, c: 1.0 };
    const BD: TailClassParams = TailClassParams::Bounded { mu: -3.0, sigma: -1.0, d: 1.0, e: 1.0, x_star: 0.0 };

    #[test]
    fn norming_examples() {
        let n = norming_constants(&hall(1.0, 1.0), 64.0).unwrap();
        assert_eq!((n.gamma, n.a, n.b), (1.0, 64.0, 64.0));
        let n = norming_constants(&WB, std::f64::consts::E).unwrap();
        assert_eq!(n.theta, Some(0.0));
        assert!((n.a - 1.0).abs() < 1e-15 && (n.b - 1.0).abs() < 1e-15);
        let n = norming_constants(&BD, 8.0).unwrap();
        assert!((n.gamma + 1.0 / 3.0).abs() < 1e-15);
        assert!((n.a - 1.0 / 6.0).abs() < 1e-15 && (n.b + 0.5).abs() < 1e-15);
        assert!(norming_constants(&WB, 1.0).is_err());
    }

    #[test]
    fn m_and_k_examples() {
        assert!((big_m(&hall(1.0, 1.0), 10.0, 64.0).unwrap() - 6.4).abs() < 1e-12);
        assert!((big_m(&WB, 2.0, 2f64.exp()).unwrap() - 1.0).abs() < 1e-14);
        assert!((big_m(&BD, -0.5, 8.0).unwrap() - 1.0).abs() < 1e-14);
        assert!(big_m(&BD, 0.5, 8.0).is_err());
        assert!(big_k(&hall(1.0, 1.0), -1.0, 8.0).is_err());
        // κ = 1: K = k e^{-x}
        assert!((big_k(&WB, 2.0, 5.0).unwrap() - 5.0 * (-2f64).exp()).abs() < 1e-14);
    }

    #[test]
    fn lambda_examples() {
        assert!((lambda_n(&hall(1.0, 1.0), 64.0, 64.0) - 1.0 / 64.0).abs() < 1e-15);
        let m = 300.0f64;
        assert_eq!(lambda_n(&WB, m.ln().powi(2), m), 1.0);
        let bd = TailClassParams::Bounded { mu: -3.0, sigma: -2.0, d: 1.0, e: 1.0, x_star: 0.0 };
        assert!((lambda_n(&bd, 16.0, 16.0) - 16f64.powi(-3)).abs() < 1e-18);
    }

    #[test]
    fn xi_omega_examples() {
        assert!((xi_n(&hall(1.0, 1.0), 10.0).unwrap() - 0.02).abs() < 1e-15);
        assert!((omega_n(&hall(1.0, 1.0), 10.0).unwrap() - 1.0).abs() < 1e-15);
        assert!((xi_n(&WB, 3.0).unwrap() - 1.0).abs() < 1e-15);
        assert!((omega_n(&WB, 3.0).unwrap() - 3f64.exp()).abs() < 1e-12);
        assert!((xi_n(&BD, -0.5).unwrap() - 24.0).abs() < 1e-12);
        assert!((omega_n(&BD, -0.5).unwrap() - 48.0).abs() < 1e-12);
    }

    #[test]
    fn eta_at_unit_k() {
        for g in [-0.5, 0.0, 1.0, 2.0] {
            let e = eta_vector(g, 1.0);
            assert_eq!(e.0[0], 0.0);
            assert_eq!(e.0[1], 0.0);
            assert!((e.0[2] + (-1f64).exp()).abs() < 1e-16);
        }
    }

    #[test]
    fn eta_continuous_at_zero() {
        for k in [0.3, 2.0, 7.0] {
            let a = eta_vector(1e-8, k);
            let b = eta_vector(0.0, k);
            assert!((a.0[1] - b.0[1]).abs() < 1e-6);
        }
    }

    #[test]
    fn zeta_examples() {
        assert!((zeta_n(Regime::Delta, 100.0, 0.3, 2.0) - 0.1).abs() < 1e-15);
        assert!(zeta_n(Regime::Vanishing, 1.0, 1.0, 1e-9).abs() < 1e-7);
        assert!((zeta_n(Regime::Diverging, 1.0, 1.0, 10.0) - 100.0 * (-10f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn bandwidth_example_and_scaling() {
        let k = KernelSpec::gaussian();
        let h = optimal_bandwidth(&hall(1.0, 1.0), &k, 10.0, 4096.0).unwrap();
        let expect = (1e4 / (4.0 * std::f64::consts::PI.sqrt() * 4096.0)).cbrt();
        assert!((h - expect).abs() < 1e-12);
        assert!((h - 0.7010).abs() < 1e-4);
        let h2 = optimal_bandwidth(&hall(1.0, 1.0), &k, 10.0, 8192.0).unwrap();
        assert!((h2 / h - 2f64.powf(-1.0 / 3.0)).abs() < 1e-12);
    }

    #[test]
    fn delta_bias_factors() {
        let k = KernelSpec::gaussian();
        let base = k.nu0() * (-1f64).exp() * (64.0f64 / 4096.0).powf(2.0 / 3.0);
        let w = ne_bias_delta(&TailClassParams::WeibullTail { kappa: 2.0, c: 1.5 }, &k, 64.0, 4096.0, 1.0).unwrap();
        assert!((w / base - 1.0).abs() < 1e-12);
        let h = ne_bias_delta(&hall(1.0, 1.0), &k, 64.0, 4096.0, 1.0).unwrap();
        assert!((h / base - 0.5f64.cbrt()).abs() < 1e-12);
        assert!(ne_bias_delta(&WB, &k, 2.0, 4096.0, 3.0).is_err());
    }

    #[test]
    fn delta_bandwidth_matches_general_formula() {
        let k = KernelSpec::epanechnikov();
        let classes = [
            TailClassParams::Hall { alpha: 2.5, beta: 1.0, a: 1.7, b: 0.0 },
            TailClassParams::WeibullTail { kappa: 3.0, c: 0.5 },
            TailClassParams::Bounded { mu: -6.0, sigma: -2.0, d: 1.3, e: 1.0, x_star: 0.5 },
        ];
        for class in classes {
            let x = delta_point(&class, 512.0, 0.7).unwrap();
            let general = optimal_bandwidth(&class, &k, x, 4096.0).unwrap();
            let special = optimal_bandwidth_delta(&class, &k, 512.0, 4096.0, 0.7).unwrap();
            assert!((special / general - 1.0).abs() < 1e-10, "{class:?}");
            let fm = (-0.7f64).exp();
            let b = ne_bias(&class, &k, fm, x, 512.0, 4096.0).unwrap();
            let bd = ne_bias_delta(&class, &k, 512.0, 4096.0, 0.7).unwrap();
            assert!((b / bd - 1.0).abs() < 1e-10, "{class:?}");
        }
    }

    #[test]
    fn frechet_tau_vanishes() {
        let spec = SmdSpec::new(TailFamily::frechet(1.0).unwrap(), 64).unwrap();
        for x in [1.0, 10.0, 100.0] {
            assert!(tau_n(&spec, 64.0, x).unwrap().abs() < 1e-12);
        }
    }
}
