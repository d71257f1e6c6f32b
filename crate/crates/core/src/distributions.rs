//! Exact representations of the underlying families used in the study and of
//! the sample maximum distribution `F^m`.

use rand::distr::Open01;
use rand::Rng;
use rand_distr::{Distribution, StudentT};
use serde::{Deserialize, Serialize};
use std::fmt;

use crate::error::{Error, Result};
use crate::special::{self, bisect_increasing, student_t_norm, student_t_upper};

/// One of the sampled families. All laws are in standard form (no location or
/// scale parameter beyond those listed).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case", deny_unknown_fields)]
pub enum TailFamily {
    /// `1 - F(x) = x^{-shape}`, `x >= 1`.
    Pareto { shape: f64 },
    /// Student's t with `df` degrees of freedom (fractional allowed).
    #[serde(rename = "t", alias = "student_t")]
    StudentT { df: f64 },
    /// `1 - F(x) = (1 + x^ell)^{-c}`, `x > 0`.
    Burr { c: f64, ell: f64 },
    /// Classical standard Fréchet, `F(x) = exp(-x^{-1/gamma})`, `x > 0`.
    Frechet { gamma: f64 },
    /// Generalized extreme value law with shape `gamma > 0`, location 0 and
    /// scale 1: `F(x) = exp(-(1 + gamma x)^{-1/gamma})`.
    GevFrechet { gamma: f64 },
    /// `1 - F(x) = exp(-c x^kappa)`, `x > 0`.
    #[serde(rename = "weibull", alias = "weibull_class")]
    WeibullClass { kappa: f64, c: f64 },
    /// `1 - F(x) = (1 + (-x)^ell)^c`, `x < 0`, with `c, ell < 0`.
    #[serde(rename = "rev_burr", alias = "reversed_burr")]
    ReversedBurr { c: f64, ell: f64 },
}

/// Tail-class parameters of a distribution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum TailClassParams {
    /// `1 - F(x) ~ A x^{-alpha} (1 + B x^{-beta})`.
    Hall { alpha: f64, beta: f64, a: f64, b: f64 },
    /// `1 - F(x) ~ exp(-C x^kappa)`.
    WeibullTail { kappa: f64, c: f64 },
    /// `1 - F(x) ~ (x* - x)^{-mu} (D + E (x* - x)^{mu sigma})`.
    Bounded { mu: f64, sigma: f64, d: f64, e: f64, x_star: f64 },
}

/// The sample maximum distribution `F^m` of a family over horizon `m`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmdSpec {
    pub family: TailFamily,
    pub horizon: u32,
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} must be finite and > 0, got {v}")))
    }
}

fn negative(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v < 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} must be finite and < 0, got {v}")))
    }
}

fn check_prob(q: f64) -> Result<()> {
    if q > 0.0 && q < 1.0 {
        Ok(())
    } else {
        Err(Error::ProbabilityOutOfRange(q))
    }
}

/// `ln(1 + e^v)` without overflow.
fn softplus(v: f64) -> f64 {
    if v > 0.0 {
        v + (-v).exp().ln_1p()
    } else {
        v.exp().ln_1p()
    }
}

impl TailFamily {
    pub fn pareto(shape: f64) -> Result<Self> {
        positive("shape", shape)?;
        Ok(Self::Pareto { shape })
    }

    pub fn student_t(df: f64) -> Result<Self> {
        positive("df", df)?;
        Ok(Self::StudentT { df })
    }

    pub fn burr(c: f64, ell: f64) -> Result<Self> {
        positive("c", c)?;
        positive("ell", ell)?;
        Ok(Self::Burr { c, ell })
    }

    pub fn frechet(gamma: f64) -> Result<Self> {
        positive("gamma", gamma)?;
        Ok(Self::Frechet { gamma })
    }

    pub fn gev_frechet(gamma: f64) -> Result<Self> {
        positive("gamma", gamma)?;
        Ok(Self::GevFrechet { gamma })
    }

    pub fn weibull_class(kappa: f64, c: f64) -> Result<Self> {
        positive("kappa", kappa)?;
        positive("C", c)?;
        Ok(Self::WeibullClass { kappa, c })
    }

    pub fn reversed_burr(c: f64, ell: f64) -> Result<Self> {
        negative("c", c)?;
        negative("ell", ell)?;
        Ok(Self::ReversedBurr { c, ell })
    }

    /// Reversed Burr law addressed by the tabulated `(mu, sigma)` pair, where
    /// `mu = -1/(c ell)` and `sigma = 1/c`.
    pub fn reversed_burr_from_table(mu: f64, sigma: f64) -> Result<Self> {
        negative("mu", mu)?;
        negative("sigma", sigma)?;
        Self::reversed_burr(1.0 / sigma, -sigma / mu)
    }

    /// Re-runs the constructor checks.
    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::Pareto { shape } => Self::pareto(shape).map(|_| ()),
            Self::StudentT { df } => Self::student_t(df).map(|_| ()),
            Self::Burr { c, ell } => Self::burr(c, ell).map(|_| ()),
            Self::Frechet { gamma } => Self::frechet(gamma).map(|_| ()),
            Self::GevFrechet { gamma } => Self::gev_frechet(gamma).map(|_| ()),
            Self::WeibullClass { kappa, c } => Self::weibull_class(kappa, c).map(|_| ()),
            Self::ReversedBurr { c, ell } => Self::reversed_burr(c, ell).map(|_| ()),
        }
    }

    /// Short machine name used in configs and CSV output.
    pub fn name(&self) -> &'static str {
        match self {
            Self::Pareto { .. } => "pareto",
            Self::StudentT { .. } => "t",
            Self::Burr { .. } => "burr",
            Self::Frechet { .. } => "frechet",
            Self::GevFrechet { .. } => "gev_frechet",
            Self::WeibullClass { .. } => "weibull",
            Self::ReversedBurr { .. } => "rev_burr",
        }
    }

    /// Parameters as they appear in the tables, e.g. `"1/2"` or `"3,1/2"`.
    pub fn params_label(&self) -> String {
        let r = special::ratio_label;
        match *self {
            Self::Pareto { shape } => r(shape),
            Self::StudentT { df } => r(df),
            Self::Burr { c, ell } | Self::ReversedBurr { c, ell } => format!("{},{}", r(c), r(ell)),
            Self::Frechet { gamma } | Self::GevFrechet { gamma } => r(gamma),
            Self::WeibullClass { kappa, c } => {
                if c == 1.0 {
                    r(kappa)
                } else {
                    format!("{},{}", r(kappa), r(c))
                }
            }
        }
    }

    /// Lower end of the support.
    pub fn lower_endpoint(&self) -> f64 {
        match *self {
            Self::Pareto { .. } => 1.0,
            Self::Burr { .. } | Self::Frechet { .. } | Self::WeibullClass { .. } => 0.0,
            Self::GevFrechet { gamma } => -1.0 / gamma,
            Self::StudentT { .. } | Self::ReversedBurr { .. } => f64::NEG_INFINITY,
        }
    }

    /// Upper end of the support.
    pub fn upper_endpoint(&self) -> f64 {
        match self {
            Self::ReversedBurr { .. } => 0.0,
            _ => f64::INFINITY,
        }
    }

    /// `F(x)`.
    pub fn cdf(&self, x: f64) -> f64 {
        if x.is_nan() {
            return f64::NAN;
        }
        match *self {
            Self::Pareto { shape } => {
                if x <= 1.0 {
                    0.0
                } else {
                    -(-shape * x.ln()).exp_m1()
                }
            }
            Self::StudentT { df } => {
                if x >= 0.0 {
                    1.0 - student_t_upper(x, df)
                } else {
                    student_t_upper(-x, df)
                }
            }
            Self::Burr { c, ell } => {
                if x <= 0.0 {
                    0.0
                } else {
                    -(-c * softplus(ell * x.ln())).exp_m1()
                }
            }
            Self::Frechet { gamma } => {
                if x <= 0.0 {
                    0.0
                } else {
                    (-x.powf(-1.0 / gamma)).exp()
                }
            }
            Self::GevFrechet { gamma } => {
                let z = 1.0 + gamma * x;
                if z <= 0.0 {
                    0.0
                } else {
                    (-z.powf(-1.0 / gamma)).exp()
                }
            }
            Self::WeibullClass { kappa, c } => {
                if x <= 0.0 {
                    0.0
                } else {
                    -(-c * x.powf(kappa)).exp_m1()
                }
            }
            Self::ReversedBurr { c, ell } => {
                if x >= 0.0 {
                    1.0
                } else {
                    -(c * softplus(ell * (-x).ln())).exp_m1()
                }
            }
        }
    }

    /// `1 - F(x)`, computed from the tail formula rather than as `1 - cdf`.
    pub fn survival(&self, x: f64) -> f64 {
        if x.is_nan() {
            return f64::NAN;
        }
        match *self {
            Self::Pareto { shape } => {
                if x <= 1.0 {
                    1.0
                } else {
                    (-shape * x.ln()).exp()
                }
            }
            Self::StudentT { df } => {
                if x >= 0.0 {
                    student_t_upper(x, df)
                } else {
                    1.0 - student_t_upper(-x, df)
                }
            }
            Self::Burr { c, ell } => {
                if x <= 0.0 {
                    1.0
                } else {
                    (-c * softplus(ell * x.ln())).exp()
                }
            }
            Self::Frechet { gamma } => {
                if x <= 0.0 {
                    1.0
                } else {
                    -(-x.powf(-1.0 / gamma)).exp_m1()
                }
            }
            Self::GevFrechet { gamma } => {
                let z = 1.0 + gamma * x;
                if z <= 0.0 {
                    1.0
                } else {
                    -(-z.powf(-1.0 / gamma)).exp_m1()
                }
            }
            Self::WeibullClass { kappa, c } => {
                if x <= 0.0 {
                    1.0
                } else {
                    (-c * x.powf(kappa)).exp()
                }
            }
            Self::ReversedBurr { c, ell } => {
                if x >= 0.0 {
                    0.0
                } else {
                    (c * softplus(ell * (-x).ln())).exp()
                }
            }
        }
    }

    /// `ln F(x)`, using `ln(1 - S)` where the survival function is small.
    pub fn log_cdf(&self, x: f64) -> f64 {
        match *self {
            Self::Frechet { gamma } => {
                if x <= 0.0 {
                    f64::NEG_INFINITY
                } else {
                    -x.powf(-1.0 / gamma)
                }
            }
            Self::GevFrechet { gamma } => {
                let z = 1.0 + gamma * x;
                if z <= 0.0 {
                    f64::NEG_INFINITY
                } else {
                    -z.powf(-1.0 / gamma)
                }
            }
            _ => {
                let s = self.survival(x);
                if s < 0.5 {
                    (-s).ln_1p()
                } else {
                    self.cdf(x).ln()
                }
            }
        }
    }

    /// Density `f(x)`.
    pub fn pdf(&self, x: f64) -> f64 {
        match *self {
            Self::Pareto { shape } => {
                if x < 1.0 {
                    0.0
                } else {
                    shape * (-(shape + 1.0) * x.ln()).exp()
                }
            }
            Self::StudentT { df } => {
                student_t_norm(df) * (-(0.5 * (df + 1.0)) * (x * x / df).ln_1p()).exp()
            }
            Self::Burr { c, ell } => {
                if x <= 0.0 {
                    0.0
                } else {
                    let lx = x.ln();
                    c * ell * ((ell - 1.0) * lx - (c + 1.0) * softplus(ell * lx)).exp()
                }
            }
            Self::Frechet { gamma } => {
                if x <= 0.0 {
                    0.0
                } else {
                    let a = 1.0 / gamma;
                    let y = x.powf(-a);
                    a * y / x * (-y).exp()
                }
            }
            Self::GevFrechet { gamma } => {
                let z = 1.0 + gamma * x;
                if z <= 0.0 {
                    0.0
                } else {
                    let y = z.powf(-1.0 / gamma);
                    y / z * (-y).exp()
                }
            }
            Self::WeibullClass { kappa, c } => {
                if x <= 0.0 {
                    0.0
                } else {
                    c * kappa * x.powf(kappa - 1.0) * (-c * x.powf(kappa)).exp()
                }
            }
            Self::ReversedBurr { c, ell } => {
                if x >= 0.0 {
                    0.0
                } else {
                    let lt = (-x).ln();
                    c * ell * ((ell - 1.0) * lt + (c - 1.0) * softplus(ell * lt)).exp()
                }
            }
        }
    }

    /// `F^{-1}(q)` for `q` in `(0, 1)`.
    pub fn quantile(&self, q: f64) -> Result<f64> {
        check_prob(q)?;
        Ok(self.quantile_from_logs(q.ln(), (-q).ln_1p()))
    }

    /// The point whose survival probability is `s`, for `s` in `(0, 1)`.
    ///
    /// Equivalent to `quantile(1 - s)` but keeps relative accuracy for tiny `s`.
    pub fn upper_quantile(&self, s: f64) -> Result<f64> {
        check_prob(s)?;
        Ok(self.quantile_from_logs((-s).ln_1p(), s.ln()))
    }

    /// Quantile given `ln q` and `ln(1 - q)`, both supplied by the caller at
    /// full precision.
    fn quantile_from_logs(&self, log_q: f64, log_s: f64) -> f64 {
        match *self {
            Self::Pareto { shape } => (-log_s / shape).exp(),
            Self::StudentT { df } => {
                let s = log_s.exp();
                if s < 0.5 {
                    t_upper_quantile(s, df)
                } else if s > 0.5 {
                    -t_upper_quantile(log_q.exp(), df)
                } else {
                    0.0
                }
            }
            Self::Burr { c, ell } => (-log_s / c).exp_m1().powf(1.0 / ell),
            Self::Frechet { gamma } => (-log_q).powf(-gamma),
            Self::GevFrechet { gamma } => ((-log_q).powf(-gamma) - 1.0) / gamma,
            Self::WeibullClass { kappa, c } => (-log_s / c).powf(1.0 / kappa),
            Self::ReversedBurr { c, ell } => -(log_s / c).exp_m1().powf(1.0 / ell),
        }
    }

    /// Inverse-transform image of a uniform variate `u` in `(0, 1)`.
    pub fn inverse_transform(&self, u: f64) -> f64 {
        self.quantile_from_logs(u.ln(), (-u).ln_1p())
    }

    /// One draw. Student t uses the normal / chi-square representation, every
    /// other family the inverse transform.
    pub fn sample_one<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            Self::StudentT { df } => StudentT::new(df).expect("validated df").sample(rng),
            _ => {
                let u: f64 = rng.sample(Open01);
                self.inverse_transform(u)
            }
        }
    }

    /// `count` independent draws from `rng`.
    pub fn sample<R: Rng + ?Sized>(&self, count: usize, rng: &mut R) -> Vec<f64> {
        match *self {
            Self::StudentT { df } => {
                let d = StudentT::new(df).expect("validated df");
                (0..count).map(|_| d.sample(rng)).collect()
            }
            _ => (0..count)
                .map(|_| self.inverse_transform(rng.sample(Open01)))
                .collect(),
        }
    }

    /// Tail-class parameters in the tabulated convention used by the rate
    /// calculus (Burr `beta = c`, Fréchet `beta = min(1, 1/gamma)`, reversed
    /// Burr `(mu, sigma) = (-1/(c ell), 1/c)`).
    pub fn class_params(&self) -> TailClassParams {
        match *self {
            Self::Pareto { shape } => TailClassParams::Hall { alpha: shape, beta: 1.0, a: 1.0, b: 0.0 },
            Self::StudentT { .. } => self.tail_expansion(),
            Self::Burr { c, ell } => TailClassParams::Hall { alpha: c * ell, beta: c, a: 1.0, b: -ell },
            Self::Frechet { gamma } => {
                let alpha = 1.0 / gamma;
                TailClassParams::Hall { alpha, beta: alpha.min(1.0), a: 1.0, b: -0.5 }
            }
            Self::GevFrechet { .. } => self.tail_expansion(),
            Self::WeibullClass { kappa, c } => TailClassParams::WeibullTail { kappa, c },
            Self::ReversedBurr { c, ell } => {
                let sigma = 1.0 / c;
                TailClassParams::Bounded { mu: -1.0 / (c * ell), sigma, d: 1.0, e: 1.0 / sigma, x_star: 0.0 }
            }
        }
    }

    /// The actual first- and second-order tail expansion of the law.
    pub fn tail_expansion(&self) -> TailClassParams {
        match *self {
            Self::Pareto { .. } | Self::WeibullClass { .. } => self.class_params(),
            Self::StudentT { df } => TailClassParams::Hall {
                alpha: df,
                beta: 2.0,
                a: student_t_norm(df) * df.powf(0.5 * (df - 1.0)),
                b: -df * df * (df + 1.0) / (2.0 * (df + 2.0)),
            },
            Self::Burr { c, ell } => TailClassParams::Hall { alpha: c * ell, beta: ell, a: 1.0, b: -c },
            Self::Frechet { gamma } => {
                let alpha = 1.0 / gamma;
                TailClassParams::Hall { alpha, beta: alpha, a: 1.0, b: -0.5 }
            }
            Self::GevFrechet { gamma } => {
                // 1 - F = y - y^2/2 + ..., y = (gamma x)^{-alpha} (1 - alpha/(gamma x) + ...)
                let alpha = 1.0 / gamma;
                let a = gamma.powf(-alpha);
                let from_shift = -alpha / gamma;
                let from_square = -0.5 * a;
                let (beta, b) = if alpha < 1.0 {
                    (alpha, from_square)
                } else if alpha > 1.0 {
                    (1.0, from_shift)
                } else {
                    (1.0, from_shift + from_square)
                };
                TailClassParams::Hall { alpha, beta, a, b }
            }
            Self::ReversedBurr { c, ell } => TailClassParams::Bounded {
                mu: -c * ell,
                sigma: 1.0 / c,
                d: 1.0,
                e: c,
                x_star: 0.0,
            },
        }
    }
}

impl fmt::Display for TailFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})", self.name(), self.params_label())
    }
}

/// Upper quantile of Student t by bisection on a geometrically grown bracket.
fn t_upper_quantile(s: f64, df: f64) -> f64 {
    let mut hi = 1.0;
    while student_t_upper(hi, df) > s {
        hi *= 2.0;
        if !hi.is_finite() {
            return f64::INFINITY;
        }
    }
    // survival is decreasing; bisect its negation.
    bisect_increasing(|x| -student_t_upper(x, df), -s, 0.0, hi, 1e-15)
}

impl TailClassParams {
    /// Extreme value index of the class.
    pub fn gamma(&self) -> f64 {
        match *self {
            Self::Hall { alpha, .. } => 1.0 / alpha,
            Self::WeibullTail { .. } => 0.0,
            Self::Bounded { mu, .. } => 1.0 / mu,
        }
    }

    /// Whether `x` lies in the region where the tail formulas apply.
    pub fn in_tail_region(&self, x: f64) -> bool {
        match *self {
            Self::Hall { .. } | Self::WeibullTail { .. } => x > 0.0,
            Self::Bounded { x_star, .. } => x < x_star,
        }
    }

    pub(crate) fn require_tail(&self, x: f64) -> Result<()> {
        if self.in_tail_region(x) {
            Ok(())
        } else {
            Err(Error::OutsideTailRegion { x })
        }
    }

    /// The bounded class proper requires `mu < -2`; laws outside it are
    /// representable but flagged here.
    pub fn violates_bounded_condition(&self) -> bool {
        matches!(*self, Self::Bounded { mu, .. } if mu >= -2.0)
    }

    /// The two-term tail approximation `A x^{-alpha}(1 + B x^{-beta})` and
    /// analogues.
    pub fn tail_approximation(&self, x: f64) -> f64 {
        match *self {
            Self::Hall { alpha, beta, a, b } => a * x.powf(-alpha) * (1.0 + b * x.powf(-beta)),
            Self::WeibullTail { kappa, c } => (-c * x.powf(kappa)).exp(),
            Self::Bounded { mu, sigma, d, e, x_star } => {
                let t = x_star - x;
                t.powf(-mu) * (d + e * t.powf(mu * sigma))
            }
        }
    }
}

impl SmdSpec {
    pub fn new(family: TailFamily, horizon: u32) -> Result<Self> {
        if horizon == 0 {
            return Err(Error::InvalidParameter("horizon m must be >= 1".into()));
        }
        family.validate()?;
        Ok(Self { family, horizon })
    }

    fn m(&self) -> f64 {
        f64::from(self.horizon)
    }

    /// `F^m(x)`, as `exp(m ln F(x))`.
    pub fn cdf(&self, x: f64) -> f64 {
        special::pow_from_log(self.family.log_cdf(x), self.m())
    }

    /// `q`-quantile of `F^m`, i.e. `F^{-1}(q^{1/m})`.
    pub fn quantile(&self, q: f64) -> Result<f64> {
        check_prob(q)?;
        if self.horizon == 1 {
            return self.family.quantile(q);
        }
        let log_p = q.ln() / self.m();
        Ok(self.family.quantile_from_logs(log_p, (-(log_p.exp_m1())).ln()))
    }

    /// `L_m = Q_m(0.9) - Q_m(0.1)`.
    pub fn length(&self) -> f64 {
        self.quantile(0.9).expect("valid") - self.quantile(0.1).expect("valid")
    }
}

/// Free-function form of [`TailFamily::cdf`].
pub fn cdf(family: &TailFamily, x: f64) -> f64 {
    family.cdf(x)
}

/// Free-function form of [`TailFamily::survival`].
pub fn survival(family: &TailFamily, x: f64) -> f64 {
    family.survival(x)
}

/// Free-function form of [`TailFamily::quantile`].
pub fn quantile(family: &TailFamily, q: f64) -> Result<f64> {
    family.quantile(q)
}

/// Free-function form of [`TailFamily::class_params`].
pub fn class_params(family: &TailFamily) -> TailClassParams {
    family.class_params()
}

pub fn smd_cdf(spec: &SmdSpec, x: f64) -> f64 {
    spec.cdf(x)
}

pub fn smd_quantile(spec: &SmdSpec, q: f64) -> Result<f64> {
    spec.quantile(q)
}
