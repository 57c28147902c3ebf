use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Variance, quantum Fisher information, roof decompositions and SDP bounds.
#[derive(Debug, Parser)]
#[command(name = "fisher-roof", version = env!("FISHER_ROOF_BUILD"))]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Write results here instead of standard output.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,

    /// Output format; CSV is only available for experiment tables.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    pub format: Format,

    /// Worker threads for experiments (default: $FISHER_ROOF_THREADS, else all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Scalar quantities of a state and an observable.
    Compute {
        #[arg(value_enum)]
        quantity: Quantity,
        #[command(flatten)]
        input: PairInput,
        /// Mean generating gen-var / gen-qfi.
        #[arg(long)]
        mean: Option<String>,
        /// Report gen-var / gen-qfi without the m(1,0) normalization.
        #[arg(long)]
        raw: bool,
    },
    /// Pure-state decompositions.
    Roof {
        #[arg(value_enum)]
        kind: RoofKind,
        #[command(flatten)]
        input: PairInput,
        /// Decomposition file to check (verify only).
        #[arg(long)]
        decomposition: Option<PathBuf>,
    },
    /// Lower bound on four times the convex roof of the variance.
    Bound {
        #[arg(value_enum)]
        kind: BoundChoice,
        #[command(flatten)]
        input: PairInput,
        /// Number of parties for `se` (at least 3).
        #[arg(long, short = 'n')]
        parties: Option<usize>,
        #[arg(long, default_value_t = fisher_roof::sdp::DEFAULT_TOLERANCE)]
        tolerance: f64,
        /// Also write the conic program as JSON to this file.
        #[arg(long)]
        dump: Option<PathBuf>,
    },
    /// Seeded random experiments.
    Experiment {
        #[command(subcommand)]
        kind: Experiment,
    },
}

#[derive(Debug, Args)]
pub struct PairInput {
    /// Density matrix file.
    #[arg(long)]
    pub rho: PathBuf,
    /// Observable file.
    #[arg(long)]
    pub obs: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Quantity {
    Variance,
    Qfi,
    Skew,
    GenVar,
    GenQfi,
}

impl Quantity {
    pub fn key(self) -> &'static str {
        match self {
            Quantity::Variance => "variance",
            Quantity::Qfi => "qfi",
            Quantity::Skew => "skew",
            Quantity::GenVar => "gen-var",
            Quantity::GenQfi => "gen-qfi",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RoofKind {
    Concave,
    Theorem2,
    Verify,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BoundChoice {
    Sppt,
    Se,
}

#[derive(Debug, Subcommand)]
pub enum Experiment {
    /// Relative difference between the Fisher information and an SDP bound.
    Table {
        #[arg(long, short)]
        d: usize,
        /// sppt, se3, se4, ...
        #[arg(long, default_value = "sppt")]
        bound: String,
        #[arg(long)]
        zero_diagonal: bool,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = fisher_roof::sdp::DEFAULT_TOLERANCE)]
        tolerance: f64,
        /// Per-trial log (JSON lines, or CSV with --format csv).
        #[arg(long)]
        log: Option<PathBuf>,
    },
    /// Random decompositions against F_Q <= 4 Σ p (ΔA)².
    Conjecture {
        #[arg(long, short)]
        d: usize,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = fisher_roof::experiments::MONITOR_DECOMPOSITIONS)]
        decompositions: usize,
    },
}
