use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "kakeya",
    version,
    about = "Harmonic analysis and Kakeya-type sets over (Z/NZ)^n",
    long_about = "Verification suites, constants, Kakeya-set searches and transforms over (Z/NZ)^n.\n\n\
                  Exit codes: 0 pass, 1 check failure, 2 usage or input error, 3 resource cap."
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run verification checks and emit a report.
    Verify(VerifyArgs),
    /// Tabulate maximal-bound, appendix and chain constants per band.
    Constants(ConstantsArgs),
    /// Search for a small set containing a k-flat translate in every direction.
    Search(SearchArgs),
    /// Apply a transform to a density file.
    Transform(TransformArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeArg {
    Padic,
    Profinite,
    Plain,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LaneArg {
    Exact,
    Float,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SemanticsArg {
    Numeric,
    Divisibility,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FormatArg {
    Json,
    Text,
    Csv,
}

/// Ring selection. Unset values fall back to the config file, then to
/// `padic`, `p = 2`, `l = 2`, `n = 3`.
#[derive(Clone, Debug, Default, Args)]
pub struct RingArgs {
    /// Truncation model.
    #[arg(long, value_enum, global = true)]
    pub mode: Option<ModeArg>,
    /// Prime of the p-adic mode.
    #[arg(short = 'p', long = "prime", global = true)]
    pub p: Option<u64>,
    /// Exponent ell (N = p^ell) in padic mode, or L (N = (L+1)!) in profinite mode.
    #[arg(short = 'l', long = "level", global = true)]
    pub l: Option<u32>,
    /// Modulus of a plain ring.
    #[arg(short = 'N', long, global = true)]
    pub modulus: Option<u64>,
    /// Dimension n.
    #[arg(short = 'n', long = "dim", global = true)]
    pub n: Option<usize>,
    /// Band semantics (padic defaults to numeric, profinite to divisibility).
    #[arg(long, value_enum, global = true)]
    pub semantics: Option<SemanticsArg>,
}

#[derive(Clone, Debug, Default, Args)]
pub struct RunArgs {
    /// TOML file with defaults for any ring or run option.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum, global = true)]
    pub lane: Option<LaneArg>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true)]
    pub trials: Option<usize>,
    #[arg(long, value_enum, global = true)]
    pub format: Option<FormatArg>,
    /// Write the result here instead of stdout.
    #[arg(short, long, global = true)]
    pub output: Option<PathBuf>,
    /// Record wall times (reports stop being reproducible).
    #[arg(long, global = true)]
    pub timings: bool,
    /// Worker threads; defaults to KAKEYA_WORKERS, then the number of cores.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub ring: RingArgs,
    #[command(flatten)]
    pub run: RunArgs,
    /// Check ids, or `all`.
    #[arg(default_value = "all")]
    pub checks: Vec<String>,
}

#[derive(Debug, Args)]
pub struct ConstantsArgs {
    #[command(flatten)]
    pub ring: RingArgs,
    #[command(flatten)]
    pub run: RunArgs,
    /// Number of chain terms; defaults to the number of bands of the ring.
    #[arg(long)]
    pub depth: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Strategy {
    Greedy,
    Exact,
}

#[derive(Debug, Args)]
pub struct SearchArgs {
    #[command(flatten)]
    pub ring: RingArgs,
    #[command(flatten)]
    pub run: RunArgs,
    /// Flat dimension.
    #[arg(short = 'k', long)]
    pub k: usize,
    #[arg(long, value_enum, default_value = "greedy")]
    pub strategy: Strategy,
    /// Node budget of the exact search.
    #[arg(long, default_value_t = 5_000_000)]
    pub budget: u64,
}

#[derive(Debug, Args)]
pub struct TransformArgs {
    #[command(flatten)]
    pub ring: RingArgs,
    #[command(flatten)]
    pub run: RunArgs,
    /// Density (CSV `x1,...,xn,value` or JSON); a spectrum JSON for `inverse`.
    #[arg(short, long)]
    pub input: PathBuf,
    #[command(subcommand)]
    pub op: TransformOp,
}

#[derive(Debug, Subcommand)]
pub enum TransformOp {
    /// Fourier coefficients as JSON.
    Fourier,
    /// Density from a spectrum written by `fourier`.
    Inverse,
    /// X-ray transform along one direction.
    Xray {
        /// Direction as comma-separated residues, e.g. `1,0,2`.
        #[arg(long, value_delimiter = ',', required = true)]
        direction: Vec<u64>,
    },
    /// Littlewood-Paley band projection.
    Band {
        #[arg(long)]
        index: usize,
    },
    /// k-flat maximal function over every direction.
    Maximal {
        #[arg(short = 'k', long = "k")]
        k: usize,
    },
}
