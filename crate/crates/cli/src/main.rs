//! `causet`: sprinkle events, build causal and link matrices, sum over
//! chains, and run the kinematic and test-function checks.
//!
//! Exit codes: 0 success, 1 validation failure, 2 I/O error, 3 tolerance or
//! reproduction failure.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod error;
mod input;
mod manifest;
mod svg;

use causet_core::causal::DEFAULT_CHAIN_CAP;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Debug, Parser)]
#[command(name = "causet", version, about = "Causal sets in 1+1 Minkowski space")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct GlobalArgs {
    /// Seed for every random draw.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Directory for output files and the run manifest [default: .].
    #[arg(long, global = true)]
    #[serde(skip)]
    pub out_dir: Option<PathBuf>,
    /// Output file format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Suppress the printed report.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub quiet: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Sprinkle events into a causal diamond and plot them.
    Sprinkle(SprinkleArgs),
    /// Build causal and link matrices from an events file.
    Relate(RelateArgs),
    /// Enumerate chains between two events.
    Chains(ChainsArgs),
    /// Path count, amplitude sum and chain weights between two events.
    Pathsum(PathsumArgs),
    /// Check that boosting and resorting a sprinkle preserves its causal matrix.
    Boostcheck(BoostcheckArgs),
    /// Sweep the light-flash dilation and contraction construction over speeds.
    Srcheck(SrcheckArgs),
    /// Seminorm, position expectation and window membership of a test function.
    Qexp(QexpArgs),
    /// Rerun a command from its manifest and compare output digests.
    Replay(ReplayArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Sprinkle(_) => "sprinkle",
            Command::Relate(_) => "relate",
            Command::Chains(_) => "chains",
            Command::Pathsum(_) => "pathsum",
            Command::Boostcheck(_) => "boostcheck",
            Command::Srcheck(_) => "srcheck",
            Command::Qexp(_) => "qexp",
            Command::Replay(_) => "replay",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeArg {
    #[default]
    Fixed,
    Poisson,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NormArg {
    #[default]
    Born,
    Linear,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct SprinkleArgs {
    /// Number of events (the mean count in poisson mode).
    #[arg(short = 'n', default_value_t = 1000)]
    pub n: usize,
    /// Side of the lightcone square; the diamond is |t|+|x| <= S/√2.
    #[arg(short = 'S', long = "size", default_value_t = 1.0)]
    pub size: f64,
    /// Exactly n events, or a Poisson count with mean n.
    #[arg(long, value_enum, default_value_t)]
    pub mode: ModeArg,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct RelateArgs {
    /// Events CSV (`t,x`), sprinkle JSON, or sparse relation JSON.
    #[arg(long)]
    pub input: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct ChainsArgs {
    /// Events CSV (`t,x`), sprinkle JSON, or sparse relation JSON.
    #[arg(long)]
    pub input: PathBuf,
    /// Index of the earlier event.
    #[arg(long)]
    pub from: usize,
    /// Index of the later event.
    #[arg(long)]
    pub to: usize,
    /// Stop after this many chains and flag the result as truncated.
    #[arg(long, default_value_t = DEFAULT_CHAIN_CAP)]
    pub cap: usize,
    /// Walk the causal relation instead of links.
    #[arg(long)]
    pub relations: bool,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct PathsumArgs {
    /// Events CSV (`t,x`), sprinkle JSON, or sparse relation JSON.
    #[arg(long)]
    pub input: PathBuf,
    /// Index of the earlier event.
    #[arg(long)]
    pub from: usize,
    /// Index of the later event.
    #[arg(long)]
    pub to: usize,
    /// Real part of the per-link amplitude.
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub hop_re: f64,
    /// Imaginary part of the per-link amplitude.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub hop_im: f64,
    /// Stop after this many chains and flag the result as truncated.
    #[arg(long, default_value_t = DEFAULT_CHAIN_CAP)]
    pub cap: usize,
    /// Chain weights from |amplitude|² (born) or |amplitude| (linear).
    #[arg(long, value_enum, default_value_t)]
    pub norm: NormArg,
    /// Walk the causal relation instead of links.
    #[arg(long)]
    pub relations: bool,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct BoostcheckArgs {
    #[arg(short = 'n', default_value_t = 500)]
    pub n: usize,
    #[arg(short = 'S', long = "size", default_value_t = 1.0)]
    pub size: f64,
    /// Comma-separated boost speeds [default: 20 values spread over ±0.99].
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub betas: Vec<f64>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct SrcheckArgs {
    /// Comma-separated speeds in units of c, each in [0, 1).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub betas: Vec<f64>,
    /// Number of evenly spaced speeds in [0, --max-beta] when --betas is absent.
    #[arg(long, default_value_t = 50)]
    pub count: usize,
    /// Largest speed of the evenly spaced sweep.
    #[arg(long, default_value_t = 0.99)]
    pub max_beta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Gaussian,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct QexpArgs {
    /// Built-in function family; omit when using --input.
    #[arg(value_enum)]
    pub family: Option<Family>,
    /// Gaussian centre.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub center: f64,
    /// Gaussian width.
    #[arg(long, default_value_t = 1.0)]
    pub width: f64,
    /// Samples as CSV `x,re,im` on a uniform grid symmetric about 0.
    #[arg(long, conflicts_with = "family")]
    pub input: Option<PathBuf>,
    /// Grid half-width R for built-in families.
    #[arg(long, default_value_t = causet_core::schwartz::DEFAULT_HALF_WIDTH)]
    pub half_width: f64,
    /// Grid step h for built-in families.
    #[arg(long, default_value_t = causet_core::schwartz::DEFAULT_STEP)]
    pub step: f64,
    /// Power of x in the seminorm.
    #[arg(long, default_value_t = 0)]
    pub alpha: u32,
    /// Derivative order in the seminorm.
    #[arg(long, default_value_t = 0)]
    pub beta: u32,
    /// Open window `LO,HI` for the expectation preimage test.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub window: Vec<f64>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct ReplayArgs {
    /// A `<command>.manifest.json` file.
    pub manifest: PathBuf,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match commands::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
