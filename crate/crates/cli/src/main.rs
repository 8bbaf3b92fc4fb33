//! `reachspan`: reachable-space polytopes of serial manipulators from the command line.

mod commands;
mod scenario;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use reachspan_core::benchmark::CubeVariant;

/// Horizons used by the benchmark and timing runs when none are given.
pub const DEFAULT_HORIZONS: [f64; 8] = [0.05, 0.15, 0.25, 0.5, 0.75, 1.0, 1.5, 2.0];

#[derive(Debug, Parser)]
#[command(name = "reachspan", version, about = "Reachable-space polytopes of serial manipulators over a time horizon")]
#[command(after_help = "Set REACHSPAN_THREADS to cap the number of worker threads; RUST_LOG controls logging.")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compute the end-effector polytope of a scenario and export it.
    Polytope(PolytopeArgs),
    /// Compute one polytope per link envelope of a scenario plus a combined scene.
    Links(LinksArgs),
    /// Compare polytopes with simulated rollouts over random configurations.
    Benchmark(BenchmarkArgs),
    /// Time polytope computation over horizons and environment sizes.
    Timing(TimingArgs),
    /// Print a summary of a robot description or scenario.
    Info(InfoArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Obj,
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CubeArg {
    /// Velocity limit applied to `ẍ t_h` alone.
    Literal,
    /// Velocity limit applied to `ẋ_k + ẍ t_h`.
    WithCurrentVelocity,
}

impl From<CubeArg> for CubeVariant {
    fn from(c: CubeArg) -> Self {
        match c {
            CubeArg::Literal => CubeVariant::Literal,
            CubeArg::WithCurrentVelocity => CubeVariant::WithCurrentVelocity,
        }
    }
}

#[derive(Debug, Args)]
pub struct PolytopeArgs {
    /// Scenario JSON file.
    #[arg(long)]
    pub scenario: PathBuf,
    /// Output directory (created if missing).
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    /// Approximation tolerance in metres.
    #[arg(long, default_value_t = 0.001)]
    pub delta: f64,
    /// Horizons in seconds, comma separated; overrides the scenario's `t_h`.
    #[arg(long, value_delimiter = ',')]
    pub horizons: Vec<f64>,
    /// Output formats, comma separated.
    #[arg(long, value_enum, value_delimiter = ',', default_value = "obj,json")]
    pub format: Vec<Format>,
    /// Also simulate each vertex torque and write the trajectories as CSV.
    #[arg(long)]
    pub trajectories: bool,
    /// Simulation time step in seconds for `--trajectories`.
    #[arg(long, default_value_t = 0.005)]
    pub dt: f64,
}

#[derive(Debug, Args)]
pub struct LinksArgs {
    /// Scenario JSON file with a `links` list.
    #[arg(long)]
    pub scenario: PathBuf,
    /// Output directory (created if missing).
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    /// Approximation tolerance in metres.
    #[arg(long, default_value_t = 0.001)]
    pub delta: f64,
    /// Horizons in seconds, comma separated; overrides the scenario's `t_h`.
    #[arg(long, value_delimiter = ',')]
    pub horizons: Vec<f64>,
    /// Output formats, comma separated.
    #[arg(long, value_enum, value_delimiter = ',', default_value = "obj,json")]
    pub format: Vec<Format>,
}

#[derive(Debug, Args)]
pub struct BenchmarkArgs {
    /// Robot description JSON, or `planar2` / `generic7` for the bundled ones.
    #[arg(long)]
    pub robot: String,
    /// Output directory (created if missing).
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    /// Approximation tolerance in metres.
    #[arg(long, default_value_t = 0.001)]
    pub delta: f64,
    /// Simulation time step in seconds.
    #[arg(long, default_value_t = 0.005)]
    pub dt: f64,
    /// Horizons in seconds, comma separated.
    #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_HORIZONS)]
    pub horizons: Vec<f64>,
    /// Seed for the random configurations.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Number of random configurations.
    #[arg(long, default_value_t = 20)]
    pub configs: usize,
    /// Containment tolerance for m1 in metres (defaults to `--delta`).
    #[arg(long)]
    pub m1_eps: Option<f64>,
    /// How the Cartesian velocity limit enters the cube baseline.
    #[arg(long, value_enum, default_value = "literal")]
    pub cube_variant: CubeArg,
    /// Sample joint velocities too (otherwise every configuration starts at rest).
    #[arg(long)]
    pub sample_velocity: bool,
    /// Write wall-clock columns as NA so same-seed reports are byte-identical.
    #[arg(long)]
    pub deterministic: bool,
    /// Output formats, comma separated (`csv` always written; `json` adds summary.json).
    #[arg(long, value_enum, value_delimiter = ',', default_value = "csv")]
    pub format: Vec<Format>,
}

#[derive(Debug, Args)]
pub struct TimingArgs {
    /// Robot description JSON, or `planar2` / `generic7` for the bundled ones.
    #[arg(long)]
    pub robot: String,
    /// Output directory (created if missing).
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    /// Approximation tolerance in metres.
    #[arg(long, default_value_t = 0.001)]
    pub delta: f64,
    /// Horizons in seconds, comma separated.
    #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_HORIZONS)]
    pub horizons: Vec<f64>,
    /// Seed for configurations and environment rows.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Number of random configurations per cell.
    #[arg(long, default_value_t = 20)]
    pub configs: usize,
    /// Environment row counts, comma separated.
    #[arg(long, value_delimiter = ',', default_values_t = [0usize, 10, 100, 500, 1000])]
    pub env_rows: Vec<usize>,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct InfoArgs {
    /// Robot description JSON, or `planar2` / `generic7`.
    #[arg(long)]
    pub robot: Option<String>,
    /// Scenario JSON file.
    #[arg(long)]
    pub scenario: Option<PathBuf>,
}

fn init_threads() {
    let Ok(value) = std::env::var("REACHSPAN_THREADS") else {
        return;
    };
    match value.trim().parse::<usize>() {
        Ok(n) if n > 0 => {
            if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
                log::warn!("could not set thread count: {e}");
            }
        }
        _ => log::warn!("ignoring REACHSPAN_THREADS={value}: expected a positive integer"),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    init_threads();
    let result = match cli.command {
        Command::Polytope(a) => commands::polytope(&a),
        Command::Links(a) => commands::links(&a),
        Command::Benchmark(a) => commands::benchmark(&a),
        Command::Timing(a) => commands::timing(&a),
        Command::Info(a) => commands::info(&a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
