//! `smd`: batch front end for sample maximum distribution estimation.

mod fit;
mod ingest;
mod rates;
mod simulate;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Outcome of a command that did not error out.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    /// Finished, but something was skipped; the details went to stderr.
    Partial,
}

#[derive(Parser)]
#[command(name = "smd", version, about = "Estimate the distribution of the maximum over a future horizon")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write the convergence-rate table as CSV.
    Rates(RatesArgs),
    /// Run Monte Carlo MISE cells from a config file or from flags.
    Simulate(SimulateArgs),
    /// Fit PE and/or NE to a column of data.
    Fit(FitArgs),
    /// Run a case-study preset on user-supplied data.
    Case(CaseArgs),
}

#[derive(Args)]
pub struct RatesArgs {
    /// Reference sample size for the lengths L_m (power of two).
    #[arg(long, default_value_t = 4096)]
    pub n: u64,
    /// Output file; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
pub struct SimulateArgs {
    /// Table config (TOML). Without it a single cell is built from the flags.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, env = "SMD_SEED")]
    pub seed: Option<u64>,
    /// Worker threads; 0 uses every core.
    #[arg(long, default_value_t = 0)]
    pub workers: usize,
    /// Output prefix; writes PREFIX.csv and PREFIX.txt. Text goes to stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub family: Option<String>,
    /// Family parameters, comma separated; fractions such as 1/2 are accepted.
    #[arg(long, allow_hyphen_values = true)]
    pub shape: Option<String>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub m: Option<u32>,
    #[arg(long)]
    pub reps: Option<usize>,
    /// pe, ne, both, or a comma list.
    #[arg(long)]
    pub estimators: Option<String>,
    /// auto, m, log-squared or an integer block size.
    #[arg(long)]
    pub block: Option<String>,
    /// plug-in, oracle or a fixed positive value.
    #[arg(long)]
    pub bandwidth: Option<String>,
    /// Quantile grid size for the MISE.
    #[arg(long)]
    pub grid: Option<usize>,
    /// Use the full 10000-replicate protocol.
    #[arg(long, conflicts_with = "reps")]
    pub long_run: bool,
}

#[derive(Args, Clone)]
pub struct FitArgs {
    /// CSV file with the observations.
    pub input: PathBuf,
    /// Column name or 1-based index.
    #[arg(long)]
    pub column: Option<String>,
    /// Horizon of the maximum.
    #[arg(long)]
    pub m: u32,
    /// pe, ne or both.
    #[arg(long, default_value = "both")]
    pub estimators: String,
    /// Block size for the GEV fit: auto (round(sqrt n)) or an integer.
    #[arg(long, default_value = "auto")]
    pub block: String,
    /// auto (plug-in) or a fixed positive value.
    #[arg(long, default_value = "auto")]
    pub bandwidth: String,
    #[arg(long, value_enum, default_value_t = KernelArg::Gaussian)]
    pub kernel: KernelArg,
    /// Number of x points in the curve file.
    #[arg(long, default_value_t = 401)]
    pub grid: usize,
    /// Report 1 - SMD at this level; repeatable.
    #[arg(long)]
    pub threshold: Vec<f64>,
    /// Output prefix; writes PREFIX_curve.csv and PREFIX_summary.json.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum KernelArg {
    Gaussian,
    Epanechnikov,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum CasePreset {
    /// Annual peak flows, horizon of a century.
    Potomac,
    /// Large fire-insurance losses, horizon of one year of claims.
    Danish,
}

#[derive(Args)]
pub struct CaseArgs {
    #[arg(value_enum)]
    pub preset: CasePreset,
    /// CSV file with the case data.
    pub input: PathBuf,
    #[arg(long)]
    pub column: Option<String>,
    /// Overrides the preset horizon.
    #[arg(long)]
    pub m: Option<u32>,
    #[arg(long, default_value = "auto")]
    pub block: String,
    #[arg(long, default_value = "auto")]
    pub bandwidth: String,
    #[arg(long, default_value_t = 401)]
    pub grid: usize,
    #[arg(long)]
    pub threshold: Vec<f64>,
    #[arg(long)]
    pub out: PathBuf,
}

fn case_to_fit(a: CaseArgs) -> FitArgs {
    // horizons in units of observations: a century of annual peaks, and
    // roughly one year of claims in the loss series
    let (m, column) = match a.preset {
        CasePreset::Potomac => (100, "flow_cfs"),
        CasePreset::Danish => (200, "loss"),
    };
    FitArgs {
        input: a.input,
        column: a.column.or(Some(column.to_string())),
        m: a.m.unwrap_or(m),
        estimators: "both".into(),
        block: a.block,
        bandwidth: a.bandwidth,
        kernel: KernelArg::Gaussian,
        grid: a.grid,
        threshold: a.threshold,
        out: a.out,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Rates(a) => rates::run(&a),
        Command::Simulate(a) => simulate::run(&a),
        Command::Fit(a) => fit::run(&a),
        Command::Case(a) => fit::run(&case_to_fit(a)),
    };
    match result {
        Ok(Status::Ok) => ExitCode::SUCCESS,
        Ok(Status::Partial) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
