use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "tasep", version, about = "Open TASEP stationary measure via its two-line ensemble")]
pub struct Cli {
    /// Flat `key = value` file; keys are long flag names. Command-line flags win.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    /// Worker threads (falls back to TASEP_THREADS, then all cores).
    #[arg(long, global = true, env = "TASEP_THREADS")]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact stationary weights and probabilities for N sites.
    Stationary(StationaryArgs),
    /// Cross-check the weight routes against the Markov generator.
    Verify(VerifyArgs),
    /// Exact samples of the two-line ensemble, or the exact endpoint law.
    Sample(SampleArgs),
    /// Scaled fluctuations at the triple point against the limit process.
    Fluct(FluctArgs),
    /// Large-deviation rate functions.
    Ldp {
        #[command(subcommand)]
        command: LdpCommand,
    },
    /// Phase, limiting density and normalization for the given boundary.
    Phase(PhaseArgs),
}

#[derive(Debug, Subcommand)]
pub enum LdpCommand {
    /// Rate of a height profile read from CSV.
    Rate(LdpRateArgs),
    /// Rate of the mean density.
    Density(LdpDensityArgs),
    /// Exact finite-N endpoint rate against the closed form.
    Check(LdpCheckArgs),
}

/// Exactly one of `{alpha, beta}`, `{a, b}` or `{u, v}` (the last with `--n`).
#[derive(Debug, Clone, Args, Default)]
pub struct BoundaryArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub beta: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub a: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub b: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub u: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub v: Option<f64>,
}

#[derive(Debug, Clone, Copy, ValueEnum, Default, PartialEq, Eq)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, ValueEnum, Default, PartialEq, Eq)]
pub enum Route {
    #[default]
    Recursion,
    Matrix,
    Enumeration,
}

#[derive(Debug, Args)]
pub struct StationaryArgs {
    #[arg(long)]
    pub n: usize,
    #[command(flatten)]
    pub boundary: BoundaryArgs,
    #[arg(long, value_enum, default_value_t)]
    pub route: Route,
    /// Also solve the generator (N <= 12) and report the difference.
    #[arg(long)]
    pub oracle: bool,
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Largest system size checked, sizes run from 1.
    #[arg(long, default_value_t = 8)]
    pub n_max: usize,
    /// Grid of `a:b` pairs, comma separated. Defaults to the standard five points.
    #[arg(long, value_delimiter = ',')]
    pub points: Vec<String>,
    /// Negative control: multiply weight INDEX of size N by FACTOR.
    #[arg(long, value_name = "N:INDEX:FACTOR")]
    pub corrupt_weight: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum, Default, PartialEq, Eq)]
pub enum SampleFormat {
    #[default]
    Csv,
    Bin,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[arg(long)]
    pub n: usize,
    #[command(flatten)]
    pub boundary: BoundaryArgs,
    #[arg(long, default_value_t = 1)]
    pub count: usize,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Emit the exact law of the endpoint `S1(N)` instead of samples.
    #[arg(long)]
    pub endpoint: bool,
    #[arg(long, value_enum, default_value_t)]
    pub format: SampleFormat,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FluctArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub u: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub v: f64,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub count: usize,
    #[arg(long)]
    pub seed: u64,
    /// Paths simulated for the limit side (defaults to `--count`).
    #[arg(long)]
    pub limit_count: Option<usize>,
    #[arg(long, default_value_t = 1024)]
    pub n_steps: usize,
    #[arg(long, value_delimiter = ',', default_values_t = tasep_core::fluctuations::DEFAULT_MESH)]
    pub mesh: Vec<f64>,
    /// JSON summary destination (stdout if absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Per-sample TLE values as `x,sample_id,value`.
    #[arg(long)]
    pub tle_csv: Option<PathBuf>,
    /// Limit paths as `sample_id,weight,value_at_x...`.
    #[arg(long)]
    pub limit_csv: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum, Default, PartialEq, Eq)]
pub enum Method {
    #[default]
    Closed,
    Variational,
    Both,
}

#[derive(Debug, Args)]
pub struct LdpRateArgs {
    /// CSV of `x,f(x)` knots, optional header row.
    #[arg(long)]
    pub profile: PathBuf,
    #[command(flatten)]
    pub boundary: BoundaryArgs,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, value_enum, default_value_t)]
    pub method: Method,
    /// Grid cells for the variational solver.
    #[arg(long, default_value_t = 200)]
    pub mesh: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct LdpDensityArgs {
    #[arg(long, value_delimiter = ',', required = true)]
    pub r: Vec<f64>,
    #[command(flatten)]
    pub boundary: BoundaryArgs,
    #[arg(long)]
    pub n: Option<usize>,
    /// Also evaluate the variational reduction.
    #[arg(long)]
    pub variational: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct LdpCheckArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, value_delimiter = ',', required = true)]
    pub r: Vec<f64>,
    #[command(flatten)]
    pub boundary: BoundaryArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PhaseArgs {
    #[command(flatten)]
    pub boundary: BoundaryArgs,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}
