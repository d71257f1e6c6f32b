mod common;

use approx::assert_relative_eq;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::{ks_distance, simpson, simpson_pieces};
use smd_core::distributions::{smd_cdf, smd_quantile};
use smd_core::{SmdSpec, TailClassParams, TailFamily};

fn study_families() -> Vec<TailFamily> {
    let mut v = Vec::new();
    for s in [0.5, 1.0, 3.0, 10.0] {
        v.push(TailFamily::Pareto { shape: s });
        v.push(TailFamily::StudentT { df: s });
        v.push(TailFamily::WeibullClass { kappa: s, c: 1.0 });
    }
    for a in [0.5, 1.0, 3.0] {
        for b in [0.5, 1.0, 3.0] {
            v.push(TailFamily::Burr { c: a, ell: b });
        }
    }
    for g in [5.0, 2.0, 1.0, 0.5, 0.25] {
        v.push(TailFamily::GevFrechet { gamma: g });
        v.push(TailFamily::Frechet { gamma: g });
    }
    for ell in [-1.0 / 3.0, -1.0, -2.0] {
        for c in [-0.5, -1.0, -3.0] {
            v.push(TailFamily::ReversedBurr { c, ell });
        }
    }
    v
}

#[test]
fn sampler_matches_cdf_in_kolmogorov_distance() {
    for (i, f) in study_families().into_iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(100 + i as u64);
        let xs = f.sample(100_000, &mut rng);
        let d = ks_distance(&xs, |x| f.cdf(x));
        assert!(d <= 0.01, "{f}: KS distance {d}");
    }
}

#[test]
fn reversed_burr_samples_stay_below_endpoint() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for ell in [-1.0 / 3.0, -2.0] {
        let f = TailFamily::ReversedBurr { c: -3.0, ell };
        assert!(f.sample(10_000, &mut rng).iter().all(|&x| x < 0.0));
        assert_eq!(f.upper_endpoint(), 0.0);
    }
}

#[test]
fn sampling_is_reproducible() {
    for f in [TailFamily::Pareto { shape: 1.0 }, TailFamily::StudentT { df: 3.0 }] {
        let a = f.sample(500, &mut ChaCha8Rng::seed_from_u64(9));
        let b = f.sample(500, &mut ChaCha8Rng::seed_from_u64(9));
        assert_eq!(a, b);
    }
}

#[test]
fn pareto_inverse_transform() {
    assert_eq!(TailFamily::Pareto { shape: 1.0 }.inverse_transform(0.5), 2.0);
}

fn t_density(df: f64, x: f64) -> f64 {
    let ln_c = libm::lgamma(0.5 * (df + 1.0)) - libm::lgamma(0.5 * df) - 0.5 * (df * std::f64::consts::PI).ln();
    (ln_c - 0.5 * (df + 1.0) * (x * x / df).ln_1p()).exp()
}

#[test]
fn student_t_quantile_against_quadrature() {
    let f = TailFamily::StudentT { df: 3.0 };
    let q = f.quantile(0.95).unwrap();
    assert!((q - 2.3534).abs() < 5e-5, "{q}");
    let mass = 0.5 + simpson(&|x| t_density(3.0, x), 0.0, q, 1e-14);
    assert_relative_eq!(mass, 0.95, max_relative = 1e-10);
}

#[test]
fn cauchy_survival_against_quadrature() {
    let f = TailFamily::StudentT { df: 1.0 };
    // P(T > 1) = 1/2 - P(0 < T < 1)
    let oracle = 0.5 - simpson(&|x| t_density(1.0, x), 0.0, 1.0, 1e-15);
    assert_relative_eq!(f.survival(1.0), oracle, max_relative = 1e-12);
    assert_relative_eq!(f.survival(1.0), 0.25, max_relative = 1e-14);
}

#[test]
fn reversed_burr_density_integrates_to_cdf() {
    let f = TailFamily::reversed_burr_from_table(-1.0, -1.0).unwrap();
    // 1 - F(x) = (1 + (-x)^{-1})^{-1}, so F(-1) = 1/2
    assert_relative_eq!(f.cdf(-1.0), 0.5, epsilon = 1e-15);
    for (a, b) in [(-50.0, -1.0), (-1.0, -0.01), (-3.0, -0.2)] {
        let mass = simpson(&|x| f.pdf(x), a, b, 1e-13);
        assert_relative_eq!(mass, f.cdf(b) - f.cdf(a), max_relative = 1e-9);
    }
}

#[test]
fn densities_integrate_to_one() {
    let cases = [
        (TailFamily::Pareto { shape: 3.0 }, vec![1.0, 2.0, 10.0, 100.0, 1e4]),
        (TailFamily::Burr { c: 1.0, ell: 3.0 }, vec![0.0, 1.0, 5.0, 50.0, 1e4]),
        (TailFamily::GevFrechet { gamma: 0.25 }, vec![-4.0, -2.0, 0.0, 5.0, 50.0, 1e5]),
        (TailFamily::WeibullClass { kappa: 3.0, c: 1.0 }, vec![0.0, 1.0, 2.0, 5.0]),
    ];
    for (f, knots) in cases {
        let lo = f.cdf(knots[0]);
        let hi = f.cdf(*knots.last().unwrap());
        let mass = simpson_pieces(&|x| f.pdf(x), &knots, 1e-12);
        assert_relative_eq!(mass, hi - lo, max_relative = 1e-7);
    }
    // density singular at the endpoint: integrate in s = ln(-x)
    let f = TailFamily::ReversedBurr { c: -0.5, ell: -1.0 / 3.0 };
    let g = |s: f64| f.pdf(-s.exp()) * s.exp();
    let knots: Vec<f64> = (0..=12).map(|i| -30.0 + 3.5 * f64::from(i)).collect();
    let mass = simpson_pieces(&g, &knots, 1e-13);
    let (lo, hi) = (f.cdf(-knots[12].exp()), f.cdf(-knots[0].exp()));
    assert_relative_eq!(mass, hi - lo, max_relative = 1e-7);
}

/// `x^{α+β} |1 - F(x) - A x^{-α}(1 + B x^{-β})|`, with the rounding floor of
/// the survival evaluation at that scale.
fn hall_remainder(f: &TailFamily, x: f64) -> (f64, f64) {
    let TailClassParams::Hall { alpha, beta, a, .. } = f.tail_expansion() else {
        panic!("{f} is not in the Hall class");
    };
    let approx = f.tail_expansion().tail_approximation(x);
    let r = x.powf(alpha + beta) * (f.survival(x) - approx).abs();
    let floor = 1e-13 * a * x.powf(beta);
    (r, floor)
}

#[test]
fn hall_tail_law() {
    let mut families = vec![
        TailFamily::Pareto { shape: 0.5 },
        TailFamily::Pareto { shape: 3.0 },
        TailFamily::StudentT { df: 1.0 },
        TailFamily::StudentT { df: 3.0 },
        TailFamily::StudentT { df: 10.0 },
    ];
    for g in [5.0, 2.0, 1.0, 0.5, 0.25] {
        families.push(TailFamily::GevFrechet { gamma: g });
        families.push(TailFamily::Frechet { gamma: g });
    }
    for c in [0.5, 1.0, 3.0] {
        for ell in [0.5, 1.0, 3.0] {
            families.push(TailFamily::Burr { c, ell });
        }
    }
    for f in families {
        let xs = [10.0, 1e2, 1e3, 1e4];
        let rs: Vec<(f64, f64)> = xs.iter().map(|&x| hall_remainder(&f, x)).collect();
        for w in rs.windows(2) {
            let ((r0, _), (r1, floor1)) = (w[0], w[1]);
            assert!(r1 < r0 || r1 <= floor1, "{f}: remainder sequence {rs:?}");
        }
        let (first, _) = rs[0];
        let (last, floor) = rs[3];
        assert!(last < first || last <= floor, "{f}: remainder sequence {rs:?}");
    }
}

#[test]
fn student_t_constant_by_tail_ratio() {
    for df in [0.5, 1.0, 3.0, 10.0] {
        let f = TailFamily::StudentT { df };
        let TailClassParams::Hall { alpha, a, .. } = f.tail_expansion() else { unreachable!() };
        let ratio = f.survival(1e3) * 1e3f64.powf(alpha) / a;
        assert!((ratio - 1.0).abs() < 1e-3, "df={df}: {ratio}");
    }
}

#[test]
fn weibull_tail_is_exact() {
    for (kappa, c) in [(0.5, 1.0), (1.0, 1.0), (3.0, 2.0), (10.0, 1.0)] {
        let f = TailFamily::WeibullClass { kappa, c };
        for x in [0.1f64, 0.5, 1.0, 1.3] {
            let v = (c * x.powf(kappa)).exp() * f.survival(x);
            assert_relative_eq!(v, 1.0, max_relative = 1e-12);
        }
    }
}

#[test]
fn bounded_tail_law() {
    for ell in [-1.0 / 3.0, -1.0, -2.0] {
        for c in [-0.5, -1.0, -3.0] {
            let f = TailFamily::ReversedBurr { c, ell };
            let TailClassParams::Bounded { mu, sigma, .. } = f.tail_expansion() else { unreachable!() };
            let class = f.tail_expansion();
            // (remainder, rounding floor of the survival at that scale)
            let rs: Vec<(f64, f64)> = (1..=8)
                .map(|j| {
                    let t = 10f64.powi(-j);
                    let x = -t;
                    let r = t.powf(mu * (1.0 - sigma)) * (f.survival(x) - class.tail_approximation(x)).abs();
                    (r, 1e-13 * t.powf(-mu * sigma))
                })
                .collect();
            for w in rs.windows(2) {
                assert!(w[1].0 < w[0].0 || w[1].0 <= w[1].1, "{f}: {rs:?}");
            }
            assert!(rs[7].0 < 0.1 * rs[0].0 || rs[7].0 <= rs[7].1, "{f}: {rs:?}");
        }
    }
}

#[test]
fn class_params_follow_tabulated_convention() {
    assert_eq!(
        TailFamily::Pareto { shape: 3.0 }.class_params(),
        TailClassParams::Hall { alpha: 3.0, beta: 1.0, a: 1.0, b: 0.0 }
    );
    let TailClassParams::Hall { alpha, beta, a, .. } = TailFamily::Burr { c: 3.0, ell: 0.5 }.class_params() else {
        panic!()
    };
    assert_eq!((alpha, beta, a), (1.5, 3.0, 1.0));
    let TailClassParams::Bounded { mu, sigma, d, x_star, .. } =
        TailFamily::reversed_burr_from_table(-6.0, -2.0).unwrap().class_params()
    else {
        panic!()
    };
    assert_relative_eq!(mu, -6.0, max_relative = 1e-15);
    assert_relative_eq!(sigma, -2.0, max_relative = 1e-15);
    assert_eq!((d, x_star), (1.0, 0.0));
}

#[test]
fn smd_examples() {
    let p1 = TailFamily::Pareto { shape: 1.0 };
    assert_eq!(smd_cdf(&SmdSpec::new(p1, 2).unwrap(), 2.0), 0.25);
    let fr = TailFamily::Frechet { gamma: 1.0 };
    let spec = SmdSpec::new(fr, 64).unwrap();
    let base = fr.cdf(64.0);
    let product = (0..64).fold(1.0, |acc, _| acc * base);
    assert_relative_eq!(smd_cdf(&spec, 64.0), product, max_relative = 1e-13);
    assert_relative_eq!(smd_cdf(&spec, 64.0), (-1.0f64).exp(), max_relative = 1e-14);
    let l = SmdSpec::new(p1, 64).unwrap().length();
    assert!((575.0..585.0).contains(&l), "{l}");
}

#[test]
fn smd_quantile_round_trip() {
    for f in study_families() {
        for m in [1, 8, 512] {
            let spec = SmdSpec::new(f, m).unwrap();
            for q in [0.1, 0.5, 0.9] {
                let x = smd_quantile(&spec, q).unwrap();
                assert!((smd_cdf(&spec, x) - q).abs() < 1e-9, "{f} m={m} q={q}");
                if m == 1 {
                    assert_eq!(x, f.quantile(q).unwrap());
                }
            }
        }
    }
}

#[test]
fn invalid_parameters_are_rejected() {
    assert!(TailFamily::pareto(0.0).is_err());
    assert!(TailFamily::burr(-1.0, 1.0).is_err());
    assert!(TailFamily::reversed_burr(1.0, -1.0).is_err());
    assert!(TailFamily::weibull_class(1.0, f64::NAN).is_err());
    assert!(SmdSpec::new(TailFamily::Pareto { shape: 1.0 }, 0).is_err());
}

fn family_strategy() -> impl Strategy<Value = TailFamily> {
    let fams = study_families();
    (0..fams.len()).prop_map(move |i| fams[i])
}

/// Maps a unit-interval coordinate onto a broad stretch of the support.
fn spread(f: &TailFamily, u: f64) -> f64 {
    let lo = f.lower_endpoint();
    let hi = f.upper_endpoint();
    match (lo.is_finite(), hi.is_finite()) {
        (true, false) => lo + (30.0 * u).exp() - 1.0,
        (false, true) => hi - (30.0 * (1.0 - u)).exp() + 1.0,
        _ => (u - 0.5) * 60.0,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn cdf_is_monotone(f in family_strategy(), u in 0.0f64..1.0, v in 0.0f64..1.0) {
        let (a, b) = (spread(&f, u.min(v)), spread(&f, u.max(v)));
        prop_assert!(f.cdf(a) <= f.cdf(b), "{} at {} vs {}", f, a, b);
        prop_assert!((0.0..=1.0).contains(&f.cdf(a)));
    }

    #[test]
    fn survival_complements_cdf(f in family_strategy(), u in 0.0f64..1.0) {
        let x = spread(&f, u);
        let (c, s) = (f.cdf(x), f.survival(x));
        if c > 1e-300 && s > 1e-300 {
            prop_assert!((c + s - 1.0).abs() <= 1e-12, "{}: x={} cdf={} sf={}", f, x, c, s);
        }
    }
}

#[test]
fn config_names_match_output_names() {
    #[derive(serde::Deserialize)]
    struct Holder {
        family: TailFamily,
    }
    for family in [
        TailFamily::Pareto { shape: 3.0 },
        TailFamily::StudentT { df: 1.0 },
        TailFamily::Burr { c: 1.0, ell: 3.0 },
        TailFamily::Frechet { gamma: 1.0 },
        TailFamily::GevFrechet { gamma: 0.5 },
        TailFamily::WeibullClass { kappa: 1.0, c: 1.0 },
        TailFamily::ReversedBurr { c: -1.0, ell: -1.0 },
    ] {
        let inline = match family {
            TailFamily::Pareto { shape } => format!("shape = {shape:?}"),
            TailFamily::StudentT { df } => format!("df = {df:?}"),
            TailFamily::Burr { c, ell } | TailFamily::ReversedBurr { c, ell } => format!("c = {c:?}, ell = {ell:?}"),
            TailFamily::Frechet { gamma } | TailFamily::GevFrechet { gamma } => format!("gamma = {gamma:?}"),
            TailFamily::WeibullClass { kappa, c } => format!("kappa = {kappa:?}, c = {c:?}"),
        };
        let doc = format!("family = {{ name = \"{}\", {inline} }}", family.name());
        let parsed: Holder = toml::from_str(&doc).unwrap();
        assert_eq!(parsed.family, family);
    }
}
