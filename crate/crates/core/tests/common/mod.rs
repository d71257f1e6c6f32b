//! Independent numerical oracles shared by the integration tests. Nothing here
//! calls into the library under test.

#![allow(dead_code)]

/// Adaptive Simpson quadrature of `f` over `[a, b]`.
pub fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    fn step<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) + step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
    let (fa, fb) = (f(a), f(b));
    let fm = f(0.5 * (a + b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    step(f, a, b, fa, fm, fb, whole, tol, 50)
}

/// Simpson over consecutive pieces, for integrands with features at known
/// places.
pub fn simpson_pieces<F: Fn(f64) -> f64>(f: &F, knots: &[f64], tol: f64) -> f64 {
    knots.windows(2).map(|w| simpson(f, w[0], w[1], tol)).sum()
}

/// Golden-section minimum of a unimodal `f` on `[a, b]`.
pub fn golden_min<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, rel_tol: f64) -> f64 {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > rel_tol * (c.abs() + d.abs()) {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

pub fn std_normal_cdf(z: f64) -> f64 {
    0.5 * libm::erfc(-z / std::f64::consts::SQRT_2)
}

pub fn epanechnikov_cdf(z: f64) -> f64 {
    if z <= -1.0 {
        0.0
    } else if z >= 1.0 {
        1.0
    } else {
        0.5 + 0.75 * z - 0.25 * z * z * z
    }
}

/// The kernel distribution estimate as a plain n-term average.
pub fn brute_kernel_cdf(data: &[f64], kernel_cdf: fn(f64) -> f64, h: f64, x: f64) -> f64 {
    data.iter().map(|&v| kernel_cdf((x - v) / h)).sum::<f64>() / data.len() as f64
}

/// Right-continuous empirical distribution function.
pub fn ecdf(data: &[f64], x: f64) -> f64 {
    data.iter().filter(|&&v| v <= x).count() as f64 / data.len() as f64
}

/// Kolmogorov distance between the sample and a continuous CDF.
pub fn ks_distance<F: Fn(f64) -> f64>(data: &[f64], cdf: F) -> f64 {
    let mut sorted = data.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

/// Least-squares slope of `ys` on `xs`.
pub fn ols_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

/// Draws from GEV(gamma, scale, loc) by inverting its CDF, written out here
/// rather than borrowed from the library.
pub fn gev_draws<R: rand::Rng>(gamma: f64, scale: f64, loc: f64, count: usize, rng: &mut R) -> Vec<f64> {
    (0..count)
        .map(|_| {
            let u: f64 = rng.sample(rand::distr::Open01);
            let e = -u.ln();
            let z = if gamma == 0.0 { -e.ln() } else { (e.powf(-gamma) - 1.0) / gamma };
            loc + scale * z
        })
        .collect()
}
