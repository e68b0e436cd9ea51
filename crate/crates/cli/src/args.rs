use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub const VERSION: &str = concat!(
    env!("CARGO_PKG_VERSION"),
    "\ndataset: sphere/cube v1\nmeta: ",
    "marginrcn simulate-meta v1",
    "\nrun record: ",
    "marginrcn run v1",
    "\nsweep csv: ",
    "marginrcn sweep v1",
    "\ncorrelation: ",
    "marginrcn correlation v1",
    "\nfamily: ",
    "marginrcn family v1",
    "\nlevels: ",
    "marginrcn levels v1",
    "\nkravchuk: ",
    "marginrcn kravchuk v1",
);

#[derive(Debug, Parser)]
#[command(name = "marginrcn", version = VERSION, about = "Margin halfspaces under random classification noise")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Draw a labeled dataset from a margin-halfspace instance.
    Simulate(SimulateArgs),
    /// Run the learner on a dataset and emit a run record.
    Train(TrainArgs),
    /// Run a grid of simulate+train trials and emit CSV.
    Sweep(SweepArgs),
    /// Exact hypercube constructions and their reports.
    #[command(subcommand)]
    Hardness(HardnessCommand),
    /// Run the invariant suites.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum WStarArg {
    FirstAxis,
    RandomUnit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RouteArg {
    Direct,
    Gram,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReportFormat {
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub d: usize,
    #[arg(long)]
    pub gamma: f64,
    #[arg(long)]
    pub eta: f64,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value = "first-axis")]
    pub w_star: WStarArg,
    /// Example stream; use distinct streams for independent sets under one seed.
    #[arg(long, default_value_t = 0)]
    pub stream: u64,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[arg(long)]
    pub data: PathBuf,
    /// Separate holdout file; otherwise the last N′ rows of --data are held out.
    #[arg(long)]
    pub holdout: Option<PathBuf>,
    #[arg(long)]
    pub test: Option<PathBuf>,
    #[arg(long)]
    pub eps: f64,
    #[arg(long, default_value_t = 0.1)]
    pub delta: f64,
    /// Defaults to the value recorded in the dataset's metadata sidecar.
    #[arg(long)]
    pub eta: Option<f64>,
    /// Defaults to the value recorded in the dataset's metadata sidecar.
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Iteration count override.
    #[arg(long = "T")]
    pub t: Option<usize>,
    /// Train in a random projection of the data.
    #[arg(long)]
    pub jl: bool,
    /// Projection dimension override (with --jl).
    #[arg(long, requires = "jl")]
    pub m: Option<usize>,
    #[arg(long, default_value_t = 0, requires = "jl")]
    pub jl_seed: u64,
    #[arg(long, value_enum, requires = "jl")]
    pub route: Option<RouteArg>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Record wall-clock time (makes the output run-dependent).
    #[arg(long)]
    pub timing: bool,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// JSON sweep configuration.
    #[arg(long)]
    pub config: PathBuf,
    /// Overrides the config's output path; `-` writes to stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker threads; overrides the config.
    #[arg(long)]
    pub parallel: Option<usize>,
    #[arg(long)]
    pub timing: bool,
}

/// Selects `s*` directly or through a target tail mass.
#[derive(Debug, Args, Clone)]
pub struct ThresholdArgs {
    #[arg(long)]
    pub s_star: Option<usize>,
    #[arg(long, default_value_t = 0.05, conflicts_with = "s_star")]
    pub target_mass: f64,
}

#[derive(Debug, Subcommand)]
pub enum HardnessCommand {
    /// Sample a pairwise near-orthogonal family of sign vectors.
    Gen(GenArgs),
    /// Exact pairwise correlations of the noisy threshold distributions.
    Correlate(CorrelateArgs),
    /// Level decomposition R_0..R_d of E[f_v f_u].
    Rk(RkArgs),
    /// Exact normalized Kravchuk table.
    Kravchuk(KravchukArgs),
    /// Draw samples from a hard distribution.
    Sample(SampleArgs),
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long)]
    pub d: usize,
    #[arg(long, default_value_t = 0.25)]
    pub c: f64,
    #[arg(long)]
    pub count: usize,
    #[arg(long)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CorrelateArgs {
    /// Sign vector such as `+-+-` or `1,-1,1,-1`.
    #[arg(long, requires = "u", conflicts_with = "family")]
    pub v: Option<String>,
    #[arg(long, requires = "v")]
    pub u: Option<String>,
    /// Family file written by `hardness gen`; every pair is reported.
    #[arg(long)]
    pub family: Option<PathBuf>,
    #[command(flatten)]
    pub threshold: ThresholdArgs,
    /// Noise rate as a rational (`1/3`) or decimal.
    #[arg(long, default_value = "1/3")]
    pub eta: String,
    /// Constant used for the reported bound right-hand side.
    #[arg(long = "C", default_value_t = 10.0)]
    pub bound_constant: f64,
    #[arg(long, value_enum, default_value = "json")]
    pub format: ReportFormat,
    /// Monte-Carlo estimates instead of exact enumeration.
    #[arg(long)]
    pub approx: bool,
    #[arg(long, default_value_t = 100_000)]
    pub samples: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RkArgs {
    #[arg(long, required_unless_present = "v")]
    pub d: Option<usize>,
    /// Agreement count of the pair.
    #[arg(long, conflicts_with = "v")]
    pub m: Option<usize>,
    #[arg(long, requires = "u")]
    pub v: Option<String>,
    #[arg(long, requires = "v")]
    pub u: Option<String>,
    #[command(flatten)]
    pub threshold: ThresholdArgs,
    /// Search the large-degree decay constant on this grid step.
    #[arg(long)]
    pub decay_step: Option<f64>,
    #[arg(long, default_value_t = 10.0)]
    pub decay_max: f64,
    /// Evaluate the small-degree ratio at this `c`.
    #[arg(long)]
    pub small_degree_c: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct KravchukArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[arg(long)]
    pub v: String,
    #[command(flatten)]
    pub threshold: ThresholdArgs,
    #[arg(long, default_value = "1/3")]
    pub eta: String,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
    /// Write `x/√d` with ±1 labels instead of the cube format.
    #[arg(long)]
    pub sphere: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Fault {
    KravchukSign,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Smaller budgets; finishes within a minute.
    #[arg(long)]
    pub quick: bool,
    /// Run only the named suites.
    #[arg(long = "suite")]
    pub suites: Vec<String>,
    #[arg(long, value_enum, hide = true)]
    pub inject_fault: Option<Fault>,
}
