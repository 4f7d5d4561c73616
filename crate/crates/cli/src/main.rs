mod commands;
mod config;
mod error;
mod output;
mod signal;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::CliError;

const CONFIG_HELP: &str = "\
Run config (JSON, snake_case keys; every key optional, defaults shown):
  {
    \"stations\": {\"source\": \"population\"},      // or {\"source\": \"file\", \"path\": ...}
                                                   // or {\"source\": \"random_land\", \"count\": 100, \"seed\": 0}
    \"simulation\": {
      \"duration_s\": 86400, \"sample_interval_s\": 30, \"altitude_km\": 550,
      \"min_elevation_deg\": 20, \"infeasible_penalty\": -1,
      \"total_satellites\": 100, \"min_sats\": 0,
      \"link_model\": {\"source_pair_rate\": 1e8, \"eta_zenith\": 0.1, \"zenith_optical_depth\": 0.5,
                     \"reference_range\": <altitude_km>, \"min_elevation\": <min_elevation_deg>}
    },
    \"orbits\": 3, \"budget\": 1200, \"seed\": 0, \"output_dir\": \"runs\",
    \"bo\": {\"init_count\": 25, \"gp_restarts\": 8, \"gp_polish\": 2,
           \"acquisition\": {\"kind\": \"lcb\", \"kappa\": 2, \"candidate_count\": 4096,
                           \"refine_top_k\": 5, \"lcb_sign\": \"plus\"}},
    \"ga\": {\"pop_size\": 25, \"parent_pool\": 5, \"immigrant_fraction\": 0.1,
           \"mutation_rate_initial\": 0.3, \"mutation_decay\": 0.05,
           \"mutation_sigma\": {\"angle\": 15, \"alr\": 0.75}},
    \"baseline\": {\"method\": \"equispaced\", \"step_deg\": 1}
  }
Exactly one of bo / ga / baseline may be present. The top-level seed
overrides any seed in the method block. Command-line flags override the file.

Exit codes: 0 success, 2 configuration error, 3 infeasible input,
4 evaluator failure, 130 interrupted (partial trace and manifest written).
QONSTELL_THREADS caps worker threads (0 or unset = all cores).";

#[derive(Parser)]
#[command(name = "qonstell", version, about = "Design satellite constellations for dual-downlink entanglement distribution")]
#[command(after_long_help = CONFIG_HELP)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate one constellation spec.
    Simulate(SimulateArgs),
    /// Run Bayesian optimization or the genetic algorithm.
    #[command(after_long_help = CONFIG_HELP)]
    Optimize(Box<OptimizeArgs>),
    /// Run the equispaced or single-orbit sweep baseline.
    Baseline(BaselineArgs),
    /// Write sub-satellite tracks of a spec as GeoJSON.
    ExportTracks(ExportArgs),
}

#[derive(Args, Default)]
pub struct SetupArgs {
    /// Run config JSON.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Station CSV with header id,lat_deg,lon_deg,alt_m.
    #[arg(long, conflicts_with = "random_land")]
    pub stations: Option<PathBuf>,
    /// Draw this many random stations on land.
    #[arg(long)]
    pub random_land: Option<usize>,
    /// Seed for --random-land.
    #[arg(long, default_value_t = 0, requires = "random_land")]
    pub land_seed: u64,
    /// Total satellite budget N.
    #[arg(long)]
    pub total_satellites: Option<u32>,
    /// Minimum satellites per orbit.
    #[arg(long)]
    pub min_sats: Option<u32>,
    /// Simulated duration in seconds.
    #[arg(long)]
    pub duration: Option<f64>,
    /// Sampling interval in seconds.
    #[arg(long)]
    pub interval: Option<f64>,
}

#[derive(Args)]
pub struct SimulateArgs {
    /// ConstellationSpec JSON.
    #[arg(long)]
    pub spec: PathBuf,
    /// Result JSON (standard output when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Per-timestep rate CSV.
    #[arg(long)]
    pub dump_timesteps: Option<PathBuf>,
    /// Per-timestep schedule CSV (t_index,sat,ga,gb,rate_pairs_per_s).
    #[arg(long)]
    pub dump_schedule: Option<PathBuf>,
    #[command(flatten)]
    pub setup: SetupArgs,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OptMethod {
    Bo,
    Ga,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AcqArg {
    Lcb,
    Ei,
}

#[derive(Args)]
pub struct OptimizeArgs {
    #[arg(long)]
    pub method: Option<OptMethod>,
    /// Re-run the exact configuration recorded in a manifest.
    #[arg(long, conflicts_with = "config")]
    pub from_manifest: Option<PathBuf>,
    /// Number of orbit groups D.
    #[arg(long)]
    pub orbits: Option<usize>,
    /// Simulator calls.
    #[arg(long)]
    pub budget: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    #[command(flatten)]
    pub setup: SetupArgs,

    /// BO acquisition function.
    #[arg(long, help_heading = "Bayesian optimization")]
    pub acq: Option<AcqArg>,
    #[arg(long, help_heading = "Bayesian optimization")]
    pub kappa: Option<f64>,
    /// Random warm-up designs.
    #[arg(long, help_heading = "Bayesian optimization")]
    pub init_count: Option<usize>,
    /// Random candidates scored per proposal.
    #[arg(long, help_heading = "Bayesian optimization")]
    pub candidates: Option<usize>,
    /// Candidates refined by gradient ascent.
    #[arg(long, help_heading = "Bayesian optimization")]
    pub refine_top_k: Option<usize>,
    #[arg(long, help_heading = "Bayesian optimization")]
    pub gp_restarts: Option<usize>,
    #[arg(long, help_heading = "Bayesian optimization")]
    pub gp_polish: Option<usize>,

    #[arg(long, help_heading = "Genetic algorithm")]
    pub pop: Option<usize>,
    #[arg(long, help_heading = "Genetic algorithm")]
    pub parent_pool: Option<usize>,
    #[arg(long, help_heading = "Genetic algorithm")]
    pub immigrant_fraction: Option<f64>,
    #[arg(long, help_heading = "Genetic algorithm")]
    pub mutation_rate: Option<f64>,
    #[arg(long, help_heading = "Genetic algorithm")]
    pub mutation_decay: Option<f64>,
    /// Mutation sigma for inclination genes, degrees.
    #[arg(long, help_heading = "Genetic algorithm")]
    pub sigma_angle: Option<f64>,
    /// Mutation sigma for ALR genes.
    #[arg(long, help_heading = "Genetic algorithm")]
    pub sigma_alr: Option<f64>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BaselineArg {
    Equispaced,
    Brute,
}

#[derive(Args)]
pub struct BaselineArgs {
    #[arg(long)]
    pub method: Option<BaselineArg>,
    /// Orbit count for the equispaced baseline.
    #[arg(long)]
    pub orbits: Option<usize>,
    /// Sweep step in degrees; must divide 180.
    #[arg(long)]
    pub step: Option<f64>,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    #[command(flatten)]
    pub setup: SetupArgs,
}

#[derive(Args)]
pub struct ExportArgs {
    #[arg(long)]
    pub spec: PathBuf,
    /// Track length in seconds.
    #[arg(long, default_value_t = 5400.0)]
    pub duration: f64,
    /// Sampling step in seconds.
    #[arg(long, default_value_t = 30.0)]
    pub step: f64,
    /// Station CSV to include as points.
    #[arg(long)]
    pub stations: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
}

fn run(cli: Cli) -> Result<i32, CliError> {
    commands::configure_threads()?;
    match cli.command {
        Command::Simulate(a) => commands::simulate(a),
        Command::Optimize(a) => commands::optimize(*a),
        Command::Baseline(a) => commands::baseline(a),
        Command::ExportTracks(a) => commands::export_tracks(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("qonstell: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
