use serde::{Deserialize, Serialize};

use crate::distributions::TailFamily;
use crate::error::{Error, Result};
use crate::kernel_est::KernelSpec;

/// Replication count of the desk-scale protocol.
pub const DESK_REPS: usize = 500;
/// Replication count of the long-run protocol.
pub const LONG_RUN_REPS: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Estimator {
    Pe,
    Ne,
}

impl Estimator {
    pub fn label(&self) -> &'static str {
        match self {
            Self::Pe => "PE",
            Self::Ne => "NE",
        }
    }
}

impl std::str::FromStr for Estimator {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "pe" => Ok(Self::Pe),
            "ne" => Ok(Self::Ne),
            other => Err(Error::Config(format!("unknown estimator '{other}' (expected pe or ne)"))),
        }
    }
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(untagged)]
enum RuleRepr {
    Name(String),
    Int(u64),
    Float(f64),
}

/// Block size for the PE fit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(try_from = "RuleRepr", into = "RuleRepr")]
pub enum BlockRule {
    /// `k = round((ln m)^2)` for Weibull-class families, `k = m` otherwise.
    #[default]
    Auto,
    Horizon,
    LogSquared,
    Fixed(usize),
}

impl BlockRule {
    pub fn block_size(&self, family: &TailFamily, m: u32) -> usize {
        let log_squared = || ((f64::from(m).ln().powi(2)).round() as usize).max(2);
        match *self {
            Self::Auto => match family {
                TailFamily::WeibullClass { .. } => log_squared(),
                _ => m as usize,
            },
            Self::Horizon => m as usize,
            Self::LogSquared => log_squared(),
            Self::Fixed(k) => k,
        }
    }
}

impl TryFrom<RuleRepr> for BlockRule {
    type Error = String;
    fn try_from(r: RuleRepr) -> std::result::Result<Self, String> {
        match r {
            RuleRepr::Name(s) => s.parse().map_err(|e: Error| e.to_string()),
            RuleRepr::Int(k) => Ok(Self::Fixed(k as usize)),
            RuleRepr::Float(v) => Err(format!("block size must be an integer, got {v}")),
        }
    }
}

impl From<BlockRule> for RuleRepr {
    fn from(b: BlockRule) -> Self {
        match b {
            BlockRule::Fixed(k) => RuleRepr::Int(k as u64),
            other => RuleRepr::Name(other.to_string()),
        }
    }
}

impl std::fmt::Display for BlockRule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Auto => f.write_str("auto"),
            Self::Horizon => f.write_str("m"),
            Self::LogSquared => f.write_str("log-squared"),
            Self::Fixed(k) => write!(f, "{k}"),
        }
    }
}

impl std::str::FromStr for BlockRule {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "auto" => Ok(Self::Auto),
            "m" => Ok(Self::Horizon),
            "log-squared" => Ok(Self::LogSquared),
            other => other
                .parse::<usize>()
                .map(Self::Fixed)
                .map_err(|_| Error::Config(format!("block rule '{other}' is not auto, m, log-squared or an integer"))),
        }
    }
}

/// Kernel choice; `Auto` is Epanechnikov for reversed Burr, Gaussian otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelRule {
    #[default]
    Auto,
    Gaussian,
    Epanechnikov,
}

impl KernelRule {
    pub fn kernel(&self, family: &TailFamily) -> KernelSpec {
        match self {
            Self::Auto => match family {
                TailFamily::ReversedBurr { .. } => KernelSpec::epanechnikov(),
                _ => KernelSpec::gaussian(),
            },
            Self::Gaussian => KernelSpec::gaussian(),
            Self::Epanechnikov => KernelSpec::epanechnikov(),
        }
    }
}

/// Bandwidth choice for the NE.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(try_from = "RuleRepr", into = "RuleRepr")]
pub enum BandwidthRule {
    #[default]
    PlugIn,
    /// Theory-optimal bandwidth at the SMD median, from the known class.
    Oracle,
    Fixed(f64),
}

impl TryFrom<RuleRepr> for BandwidthRule {
    type Error = String;
    fn try_from(r: RuleRepr) -> std::result::Result<Self, String> {
        match r {
            RuleRepr::Name(s) => s.parse().map_err(|e: Error| e.to_string()),
            RuleRepr::Int(v) => Ok(Self::Fixed(v as f64)),
            RuleRepr::Float(v) => Ok(Self::Fixed(v)),
        }
    }
}

impl From<BandwidthRule> for RuleRepr {
    fn from(b: BandwidthRule) -> Self {
        match b {
            BandwidthRule::Fixed(h) => RuleRepr::Float(h),
            other => RuleRepr::Name(other.to_string()),
        }
    }
}

impl std::fmt::Display for BandwidthRule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::PlugIn => f.write_str("plug-in"),
            Self::Oracle => f.write_str("oracle"),
            Self::Fixed(h) => write!(f, "{h}"),
        }
    }
}

impl std::str::FromStr for BandwidthRule {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "plug-in" | "plugin" | "auto" => Ok(Self::PlugIn),
            "oracle" => Ok(Self::Oracle),
            other => other
                .parse::<f64>()
                .map(Self::Fixed)
                .map_err(|_| Error::Config(format!("bandwidth '{other}' is not plug-in, oracle or a number"))),
        }
    }
}

fn default_reps() -> usize {
    DESK_REPS
}
fn default_estimators() -> Vec<Estimator> {
    vec![Estimator::Pe, Estimator::Ne]
}
fn default_grid() -> usize {
    201
}
fn default_min_blocks() -> usize {
    4
}

/// One experiment cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub family: TailFamily,
    pub n: usize,
    pub m: u32,
    #[serde(default = "default_reps")]
    pub reps: usize,
    #[serde(default = "default_estimators")]
    pub estimators: Vec<Estimator>,
    #[serde(default)]
    pub block: BlockRule,
    #[serde(default)]
    pub kernel: KernelRule,
    #[serde(default)]
    pub bandwidth: BandwidthRule,
    #[serde(default = "default_grid")]
    pub grid_points: usize,
    #[serde(default)]
    pub master_seed: u64,
    /// Evaluate PE as `G^{m/k}` rather than `G` itself.
    #[serde(default)]
    pub rescale_pe: bool,
    /// Fewest block maxima a PE fit may use.
    #[serde(default = "default_min_blocks")]
    pub min_blocks: usize,
}

impl ExperimentConfig {
    /// A cell with the default protocol settings.
    pub fn new(family: TailFamily, n: usize, m: u32) -> Self {
        Self {
            family,
            n,
            m,
            reps: DESK_REPS,
            estimators: default_estimators(),
            block: BlockRule::Auto,
            kernel: KernelRule::Auto,
            bandwidth: BandwidthRule::PlugIn,
            grid_points: 201,
            master_seed: 0,
            rescale_pe: false,
            min_blocks: default_min_blocks(),
        }
    }

    pub fn block_size(&self) -> usize {
        self.block.block_size(&self.family, self.m)
    }

    pub fn kernel_spec(&self) -> KernelSpec {
        self.kernel.kernel(&self.family)
    }

    pub fn wants(&self, e: Estimator) -> bool {
        self.estimators.contains(&e)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        self.family.validate().map_err(|e| Error::Config(e.to_string()))?;
        if self.m == 0 {
            return bad("m must be >= 1".into());
        }
        if self.reps == 0 {
            return bad("reps must be >= 1".into());
        }
        if self.grid_points < 2 {
            return bad(format!("grid_points must be >= 2, got {}", self.grid_points));
        }
        if self.estimators.is_empty() {
            return bad("estimators must list at least one of pe, ne".into());
        }
        if self.n < 2 {
            return bad(format!("n must be >= 2, got {}", self.n));
        }
        if self.wants(Estimator::Pe) {
            let k = self.block_size();
            if k < 2 || k > self.n {
                return bad(format!("block size {k} must lie in [2, n={}]", self.n));
            }
            let blocks = self.n / k;
            if blocks < self.min_blocks.max(2) {
                return bad(format!(
                    "n={} with block size {k} gives {blocks} blocks, fewer than min_blocks={}",
                    self.n, self.min_blocks
                ));
            }
        }
        if self.wants(Estimator::Ne) {
            match self.bandwidth {
                BandwidthRule::PlugIn if self.n < 20 => {
                    return bad("plug-in bandwidth needs n >= 20".into())
                }
                BandwidthRule::Fixed(h) if !(h > 0.0 && h.is_finite()) => {
                    return bad(format!("fixed bandwidth must be > 0, got {h}"))
                }
                _ => {}
            }
        }
        Ok(())
    }
}

/// A family sweep inside a table config. Cells are generated horizon-major,
/// then by family, then by sample size, which is the printed table order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sweep {
    pub families: Vec<TailFamily>,
    pub n: Vec<usize>,
    /// Horizons as exponents of `n` ("1/4", "1/2", "3/4").
    #[serde(default)]
    pub p: Vec<String>,
    /// Horizons given directly; used when `p` is empty.
    #[serde(default)]
    pub m: Vec<u32>,
}

/// A whole table: shared settings plus one or more sweeps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableConfig {
    #[serde(default)]
    pub title: Option<String>,
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default = "default_reps")]
    pub reps: usize,
    #[serde(default = "default_estimators")]
    pub estimators: Vec<Estimator>,
    #[serde(default)]
    pub block: BlockRule,
    #[serde(default)]
    pub kernel: KernelRule,
    #[serde(default)]
    pub bandwidth: BandwidthRule,
    #[serde(default = "default_grid")]
    pub grid_points: usize,
    #[serde(default)]
    pub rescale_pe: bool,
    #[serde(default = "default_min_blocks")]
    pub min_blocks: usize,
    #[serde(default)]
    pub sweep: Vec<Sweep>,
}

fn parse_exponent(s: &str) -> Result<(u32, u32)> {
    let err = || Error::Config(format!("horizon exponent '{s}' is not of the form a/b"));
    let (a, b) = s.trim().split_once('/').ok_or_else(err)?;
    let a: u32 = a.trim().parse().map_err(|_| err())?;
    let b: u32 = b.trim().parse().map_err(|_| err())?;
    if b == 0 || a == 0 || a >= b {
        return Err(err());
    }
    Ok((a, b))
}

impl TableConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        Ok(cfg)
    }

    /// Expands the sweeps into validated cells.
    pub fn cells(&self) -> Result<Vec<ExperimentConfig>> {
        let mut out = Vec::new();
        for sweep in &self.sweep {
            let horizons: Vec<Box<dyn Fn(usize) -> Result<u32>>> = if !sweep.p.is_empty() {
                sweep
                    .p
                    .iter()
                    .map(|s| {
                        let (a, b) = parse_exponent(s)?;
                        let f: Box<dyn Fn(usize) -> Result<u32>> = Box::new(move |n: usize| {
                            let m = (n as f64).powf(f64::from(a) / f64::from(b)).round();
                            Ok(m as u32)
                        });
                        Ok(f)
                    })
                    .collect::<Result<_>>()?
            } else if !sweep.m.is_empty() {
                sweep
                    .m
                    .iter()
                    .map(|&m| {
                        let f: Box<dyn Fn(usize) -> Result<u32>> = Box::new(move |_| Ok(m));
                        f
                    })
                    .collect()
            } else {
                return Err(Error::Config("each sweep needs a non-empty p or m list".into()));
            };
            for horizon in &horizons {
                for family in &sweep.families {
                    for &n in &sweep.n {
                        let cell = ExperimentConfig {
                            family: *family,
                            n,
                            m: horizon(n)?,
                            reps: self.reps,
                            estimators: self.estimators.clone(),
                            block: self.block,
                            kernel: self.kernel,
                            bandwidth: self.bandwidth,
                            grid_points: self.grid_points,
                            master_seed: self.master_seed,
                            rescale_pe: self.rescale_pe,
                            min_blocks: self.min_blocks,
                        };
                        cell.validate()?;
                        out.push(cell);
                    }
                }
            }
        }
        Ok(out)
    }
}
