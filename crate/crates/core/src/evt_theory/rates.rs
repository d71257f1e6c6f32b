use num_rational::Ratio;

use crate::distributions::{SmdSpec, TailClassParams, TailFamily};
use crate::error::{Error, Result};
use crate::special::{ratio_label, to_ratio};

type Q = Ratio<i64>;

/// Polynomial MSE exponents of the two estimators at `m = n^p`. `None` marks
/// a case where the estimator is not covered by the theory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateExponents {
    pub pe: Option<Q>,
    pub ne: Option<Q>,
    pub p: Q,
    /// `L_m` at the reference sample size, when computed for a family.
    pub length_l: Option<f64>,
}

fn q(x: f64) -> Q {
    let (n, d) = to_ratio(x, 10_000);
    Q::new(n, d)
}

fn check_grid(p: Q) -> Result<()> {
    let ok = [Q::new(1, 4), Q::new(1, 2), Q::new(3, 4)].contains(&p);
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidRateGrid(p.to_string()))
    }
}

/// Exponents from the tabulated class parameters.
///
/// PE: `max(p-1, p·max(-2βγ, -2))` in the Hall class with `β >= 1/2`, the
/// same with `σ` for `β` in the bounded class with `σ <= -1/2` and `μ < -2`;
/// not covered in the Weibull class. NE: `p-1` in the Hall and Weibull
/// classes; in the bounded class only when `μ` is an integer or `μ < -2`,
/// and `p < 2/(2-3γ)`. Laws outside the bounded class proper (`μ >= -2`) are
/// given an NE rate only on the shortest horizon `p = 1/4`.
pub fn rate_exponents(class: &TailClassParams, p: Q) -> Result<RateExponents> {
    check_grid(p)?;
    let one = Q::from_integer(1);
    let two = Q::from_integer(2);
    let variance = p - one;
    let pe_with = |second: Q, gamma: Q| {
        let bias = (-two * second * gamma).max(-two);
        variance.max(p * bias)
    };
    let (pe, ne) = match *class {
        TailClassParams::Hall { alpha, beta, .. } => {
            let (alpha, beta) = (q(alpha), q(beta));
            let gamma = alpha.recip();
            let pe = (beta >= Q::new(1, 2)).then(|| pe_with(beta, gamma));
            (pe, Some(variance))
        }
        TailClassParams::WeibullTail { .. } => (None, Some(variance)),
        TailClassParams::Bounded { mu, sigma, .. } => {
            let (mu, sigma) = (q(mu), q(sigma));
            let gamma = mu.recip();
            let inside = mu < -two;
            let pe = (inside && sigma <= Q::new(-1, 2)).then(|| pe_with(sigma, gamma));
            let boundary_ok = mu.is_integer() || inside;
            let threshold = two / (two - Q::from_integer(3) * gamma);
            let horizon_ok = p < threshold && (inside || p == Q::new(1, 4));
            (pe, (boundary_ok && horizon_ok).then_some(variance))
        }
    };
    Ok(RateExponents { pe, ne, p, length_l: None })
}

/// One horizon of a rate-table row.
#[derive(Debug, Clone, PartialEq)]
pub struct RateCell {
    pub m: u32,
    pub rates: RateExponents,
}

/// One family row of the rate table.
#[derive(Debug, Clone, PartialEq)]
pub struct RateRow {
    pub family: TailFamily,
    /// Display name of the family block ("Pareto", "T", ...).
    pub block: &'static str,
    pub params: String,
    /// The two tabulated class parameters, `(α, β)` or `(μ, σ)`.
    pub first: String,
    pub second: String,
    pub cells: Vec<RateCell>,
}

fn table_families() -> Vec<(&'static str, TailFamily)> {
    let mut out = Vec::new();
    let shapes = [0.5, 1.0, 3.0, 10.0];
    for l in shapes {
        out.push(("Pareto", TailFamily::Pareto { shape: l }));
    }
    for l in shapes {
        out.push(("T", TailFamily::StudentT { df: l }));
    }
    for ell in [0.5, 1.0, 3.0] {
        for c in [0.5, 1.0, 3.0] {
            out.push(("Burr", TailFamily::Burr { c, ell }));
        }
    }
    for gamma in [5.0, 2.0, 1.0, 0.5, 0.25] {
        out.push(("Frechet", TailFamily::GevFrechet { gamma }));
    }
    for kappa in shapes {
        out.push(("Weibull", TailFamily::WeibullClass { kappa, c: 1.0 }));
    }
    for ell in [-1.0 / 3.0, -1.0, -2.0] {
        for c in [-0.5, -1.0, -3.0] {
            out.push(("rev. Burr", TailFamily::ReversedBurr { c, ell }));
        }
    }
    out
}

/// The full rate table in its printed row order, with `L_m` computed at
/// `reference_n` for `m = n^{1/4}, n^{1/2}, n^{3/4}`.
pub fn rate_table(reference_n: u64) -> Result<Vec<RateRow>> {
    if !reference_n.is_power_of_two() || reference_n < 16 {
        return Err(Error::InvalidParameter(format!(
            "reference n must be a power of two >= 16, got {reference_n}"
        )));
    }
    let log2n = reference_n.trailing_zeros() as f64;
    let ps = [Q::new(1, 4), Q::new(1, 2), Q::new(3, 4)];
    let mut rows = Vec::new();
    for (block, family) in table_families() {
        let class = family.class_params();
        let (first, second) = match class {
            TailClassParams::Hall { alpha, beta, .. } => (ratio_label(alpha), ratio_label(beta)),
            TailClassParams::WeibullTail { .. } => ("0".to_string(), "0".to_string()),
            TailClassParams::Bounded { mu, sigma, .. } => (ratio_label(mu), ratio_label(sigma)),
        };
        let mut cells = Vec::new();
        for p in ps {
            let exponent = log2n * (*p.numer() as f64) / (*p.denom() as f64);
            let m = 2f64.powf(exponent).round() as u32;
            let mut rates = rate_exponents(&class, p)?;
            rates.length_l = Some(SmdSpec::new(family, m)?.length());
            cells.push(RateCell { m, rates });
        }
        rows.push(RateRow { family, block, params: family.params_label(), first, second, cells });
    }
    Ok(rows)
}

/// `x` rounded to one significant figure.
pub fn round_sig1(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    let mut e = x.abs().log10().floor() as i32;
    let mut d = (x.abs() / 10f64.powi(e)).round();
    if d >= 10.0 {
        d = 1.0;
        e += 1;
    }
    // build from the digit and the exponent so the result prints cleanly
    let v = if e >= 0 { d * 10f64.powi(e) } else { d / 10f64.powi(-e) };
    v.copysign(x)
}

/// One-significant-figure rendering in the table style: plain digits in
/// `[0.01, 1000)`, otherwise `de±k`.
pub fn format_sig1(x: f64) -> String {
    let v = round_sig1(x);
    if v == 0.0 {
        return "0".into();
    }
    let a = v.abs();
    if (0.01..1000.0).contains(&a) {
        format!("{v}")
    } else {
        let e = a.log10().floor() as i32;
        let d = (v / 10f64.powi(e)).round() as i64;
        format!("{d}e{e}")
    }
}
