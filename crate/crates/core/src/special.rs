//! Special functions and small numeric helpers shared across modules.

use statrs::function::{beta, gamma};
use std::f64::consts::{FRAC_1_SQRT_2, PI};

/// Standard normal distribution function.
pub fn normal_cdf(z: f64) -> f64 {
    0.5 * libm::erfc(-z * FRAC_1_SQRT_2)
}

/// Standard normal density.
pub fn normal_pdf(z: f64) -> f64 {
    (-0.5 * z * z).exp() / (2.0 * PI).sqrt()
}

pub fn ln_gamma(x: f64) -> f64 {
    gamma::ln_gamma(x)
}

pub fn gamma_fn(x: f64) -> f64 {
    gamma::gamma(x)
}

/// Upper tail `P(T > t)` of Student's t with `df` degrees of freedom, `t >= 0`.
///
/// Uses `P(T > t) = I_{df/(df+t^2)}(df/2, 1/2) / 2`, which keeps full relative
/// accuracy far in the tail.
pub fn student_t_upper(t: f64, df: f64) -> f64 {
    debug_assert!(t >= 0.0);
    if t.is_infinite() {
        return 0.0;
    }
    // df/(df+t^2) written to avoid overflow of t^2.
    let x = if t > 1e150 {
        df / t / t
    } else {
        df / (df + t * t)
    };
    0.5 * beta::beta_reg(0.5 * df, 0.5, x)
}

/// Normalising constant of the Student t density.
pub fn student_t_norm(df: f64) -> f64 {
    (ln_gamma(0.5 * (df + 1.0)) - ln_gamma(0.5 * df)).exp() / (df * PI).sqrt()
}

/// Pairwise summation with a fixed reduction tree: the result depends only on
/// the order of `xs`, never on how the caller produced them.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    const LEAF: usize = 8;
    if xs.len() <= LEAF {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

/// Bisection for a nondecreasing `f` on `[lo, hi]` with `f(lo) <= target <= f(hi)`.
///
/// Stops when the bracket is below `rel_tol` relative to its midpoint (or an
/// absolute `1e-300` floor).
pub fn bisect_increasing<F: Fn(f64) -> f64>(
    f: F,
    target: f64,
    mut lo: f64,
    mut hi: f64,
    rel_tol: f64,
) -> f64 {
    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
        if (hi - lo) <= rel_tol * mid.abs().max(1e-300) {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// `q^m` evaluated as `exp(m ln q)`; `log_q` is the caller's stable `ln q`.
pub fn pow_from_log(log_q: f64, m: f64) -> f64 {
    if log_q == f64::NEG_INFINITY {
        0.0
    } else {
        (m * log_q).exp()
    }
}

/// Nearest rational with denominator at most `max_den`, via continued fractions.
pub fn to_ratio(x: f64, max_den: i64) -> (i64, i64) {
    let sign = if x < 0.0 { -1 } else { 1 };
    let mut v = x.abs();
    let (mut h0, mut h1) = (0i64, 1i64);
    let (mut k0, mut k1) = (1i64, 0i64);
    for _ in 0..64 {
        let a = v.floor();
        if a > i64::MAX as f64 / 4.0 {
            break;
        }
        let a = a as i64;
        let h2 = a.saturating_mul(h1).saturating_add(h0);
        let k2 = a.saturating_mul(k1).saturating_add(k0);
        if k2 > max_den {
            break;
        }
        h0 = h1;
        h1 = h2;
        k0 = k1;
        k1 = k2;
        let frac = v - a as f64;
        if frac < 1e-12 || ((h1 as f64 / k1 as f64) - x.abs()).abs() < 1e-13 * x.abs().max(1.0) {
            break;
        }
        v = 1.0 / frac;
    }
    (sign * h1, k1)
}

/// `v` as `p/q` when it is a small-denominator rational, else in decimal.
pub fn ratio_label(v: f64) -> String {
    let (p, q) = to_ratio(v, 1000);
    if q == 1 && p as f64 == v {
        format!("{p}")
    } else if ((p as f64 / q as f64) - v).abs() < 1e-12 * v.abs().max(1.0) {
        format!("{p}/{q}")
    } else {
        format!("{v}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn normal_cdf_symmetry() {
        assert_eq!(normal_cdf(0.0), 0.5);
        assert_relative_eq!(normal_cdf(1.0) + normal_cdf(-1.0), 1.0, epsilon = 1e-15);
        assert_relative_eq!(normal_cdf(1.959963984540054), 0.975, epsilon = 1e-12);
    }

    #[test]
    fn cauchy_tail() {
        // df = 1 is the Cauchy law: P(T > 1) = 1/4.
        assert_relative_eq!(student_t_upper(1.0, 1.0), 0.25, epsilon = 1e-14);
        assert_relative_eq!(student_t_norm(1.0), 1.0 / PI, epsilon = 1e-14);
    }

    #[test]
    fn ratios() {
        assert_eq!(to_ratio(1.0 / 3.0, 1000), (1, 3));
        assert_eq!(to_ratio(-1.0 / 6.0, 1000), (-1, 6));
        assert_eq!(to_ratio(10.0, 1000), (10, 1));
        assert_eq!(to_ratio(0.75, 1000), (3, 4));
        assert_eq!(to_ratio(-6.0, 1000), (-6, 1));
    }

    #[test]
    fn pairwise_matches_naive_on_small() {
        let xs: Vec<f64> = (0..100).map(|i| i as f64).collect();
        assert_eq!(pairwise_sum(&xs), 4950.0);
    }
}
