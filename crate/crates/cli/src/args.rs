use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Exact counts and estimates of knight's tours.
///
/// Every command prints a JSON run report on stdout. Exit codes: 0 success,
/// 1 verification mismatch, 2 argument error, 3 checkpoint mismatch or
/// damage, 4 I/O error.
#[derive(Debug, Parser)]
#[command(name = "knightcount", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Count tours exactly by backtracking.
    Count(CountArgs),
    /// Estimate the number of open tours by importance sampling.
    Estimate(EstimateArgs),
    /// Check computed counts against the reference table.
    Verify(VerifyArgs),
    /// Write a checkpoint with every work unit pending.
    Split(SplitArgs),
}

#[derive(Debug, Clone, Copy, Args)]
pub struct BoardArgs {
    #[arg(long)]
    pub rows: usize,
    #[arg(long)]
    pub cols: usize,
}

#[derive(Debug, Clone, Copy, Args)]
pub struct JobsArgs {
    /// Worker threads; defaults to one per core.
    #[arg(long, env = "KNIGHTCOUNT_JOBS", value_parser = clap::value_parser!(u32).range(1..))]
    pub jobs: Option<u32>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Prune {
    On,
    Off,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TargetArg {
    #[value(name = "N", alias = "n")]
    N,
    #[value(name = "G", alias = "g")]
    G,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Level {
    Quick,
    Full,
}

#[derive(Debug, Clone, Args)]
pub struct SearchArgs {
    /// Count open tours (the default); closed tours are tallied as well.
    #[arg(long, conflicts_with = "closed")]
    pub open: bool,
    /// Count closed tours only.
    #[arg(long)]
    pub closed: bool,
    #[arg(long, value_enum, default_value_t = Prune::On)]
    pub prune: Prune,
}

#[derive(Debug, Clone, Args)]
pub struct CountArgs {
    #[command(flatten)]
    pub board: BoardArgs,
    #[command(flatten)]
    pub search: SearchArgs,
    /// Squares fixed by each work unit.
    #[arg(long, default_value_t = 3)]
    pub split_depth: usize,
    /// Record completed work units here.
    #[arg(long)]
    pub checkpoint: Option<PathBuf>,
    /// Continue an existing checkpoint instead of creating one.
    #[arg(long, requires = "checkpoint")]
    pub resume: bool,
    /// Stop after this many units, leaving the rest pending.
    #[arg(long, requires = "checkpoint")]
    pub max_units: Option<usize>,
    #[command(flatten)]
    pub jobs: JobsArgs,
}

#[derive(Debug, Clone, Args)]
pub struct EstimateArgs {
    #[command(flatten)]
    pub board: BoardArgs,
    #[arg(long, default_value_t = 1_000_000)]
    pub samples: u64,
    /// Strength of the bias towards low-degree squares.
    #[arg(long, default_value_t = 2.0)]
    pub alpha: f64,
    /// Offset added to onward degrees before biasing.
    #[arg(long, default_value_t = 1.0)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 0.99)]
    pub confidence: f64,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = TargetArg::N)]
    pub target: TargetArg,
    /// Write one JSON line per sample to this file.
    #[arg(long)]
    pub sample_log: Option<PathBuf>,
    #[command(flatten)]
    pub jobs: JobsArgs,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    /// `quick` recomputes exact entries; `full` also checks estimated ones.
    #[arg(long, value_enum, default_value_t = Level::Quick)]
    pub level: Level,
    /// Small-board table to use instead of the built-in one.
    #[arg(long)]
    pub reference: Option<PathBuf>,
    /// Samples per estimated board in `full` mode.
    #[arg(long, default_value_t = 10_000_000)]
    pub samples: u64,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, default_value_t = 0.99)]
    pub confidence: f64,
    #[command(flatten)]
    pub jobs: JobsArgs,
}

#[derive(Debug, Clone, Args)]
pub struct SplitArgs {
    #[command(flatten)]
    pub board: BoardArgs,
    #[command(flatten)]
    pub search: SearchArgs,
    #[arg(long)]
    pub depth: usize,
    /// Checkpoint file to create.
    #[arg(long)]
    pub out: PathBuf,
}
