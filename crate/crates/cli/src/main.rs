//! `pmdnav`: social routing for personal mobility devices and the
//! shared-space micro-simulator.
//!
//! Exit codes: 0 on success, 1 on invalid input, 2 on an infeasible query
//! (disconnected origin and destination, or a simulation that hit its time
//! cap). Failures print one JSON object on stderr.

mod commands;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use error::CliError;

#[derive(Parser, Debug)]
#[command(name = "pmdnav", version, about = "Socially acceptable PMD routing and shared-space simulation")]
pub struct Cli {
    /// Worker threads for parallel work (defaults to one per core).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Seed for every random draw.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Suppress the summary printed on stdout.
    #[arg(short, long, global = true)]
    pub quiet: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Plan one socially acceptable route and write it as GeoJSON.
    Plan(PlanArgs),
    /// Route random O-D pairs and report the average length increment.
    Batch(BatchArgs),
    /// Export normalized edge betweenness as `edge_id,value` CSV.
    Centrality(CentralityArgs),
    /// Run one simulation scene and write its trajectories.
    Simulate(SimulateArgs),
    /// Compare Type-1 and Type-2 end times over scenes and seeds.
    Compare(CompareArgs),
    /// Check input files without doing any work.
    Validate(ValidateArgs),
}

/// Hazard score overrides on top of a hyperparameter column.
#[derive(Args, Debug, Clone)]
pub struct WeightArgs {
    /// Hyperparameter column (1, 2 or 3).
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u8).range(1..=3))]
    pub column: u8,
    /// Ring scores from the inner ring outwards, e.g. `0.2,0.16,0.12`.
    #[arg(long, value_delimiter = ',')]
    pub haz: Option<Vec<f64>>,
    #[arg(long)]
    pub pa: Option<f64>,
    #[arg(long)]
    pub bc_max: Option<f64>,
    #[arg(long)]
    pub ic_max: Option<f64>,
    /// Minimum side of the O-D subnetwork box, in km.
    #[arg(long, default_value_t = 5.0)]
    pub min_side_km: f64,
}

#[derive(Args, Debug, Clone)]
pub struct NetworkArgs {
    /// Graph JSON document.
    #[arg(long, required_unless_present = "synthetic_city")]
    pub graph: Option<PathBuf>,
    /// Shared-space zone JSON; no zones when omitted.
    #[arg(long, conflicts_with = "synthetic_city")]
    pub zones: Option<PathBuf>,
    /// Use the seeded 60x60 synthetic city instead of `--graph`.
    #[arg(long, conflicts_with = "graph")]
    pub synthetic_city: Option<u64>,
}

#[derive(Args, Debug)]
pub struct PlanArgs {
    #[command(flatten)]
    pub network: NetworkArgs,
    #[arg(long)]
    pub from: String,
    #[arg(long)]
    pub to: String,
    #[command(flatten)]
    pub weights: WeightArgs,
    /// Usage-density layer as `edge_id,value` CSV over the full graph.
    #[arg(long)]
    pub ic: Option<PathBuf>,
    /// GeoJSON output.
    #[arg(long)]
    pub out: PathBuf,
    /// Stats sidecar; defaults to the output path with `.stats.json`.
    #[arg(long)]
    pub stats: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct BatchArgs {
    #[command(flatten)]
    pub network: NetworkArgs,
    #[arg(long, default_value_t = 100)]
    pub pairs: usize,
    /// Great-circle distance band in km, `lo:hi`.
    #[arg(long, default_value = "4.5:6.5")]
    pub dist_km: String,
    #[command(flatten)]
    pub weights: WeightArgs,
    /// BatchStats JSON output.
    #[arg(long)]
    pub out: PathBuf,
    /// Per-pair CSV; defaults to the output path with `.pairs.csv`.
    #[arg(long)]
    pub pairs_csv: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct CentralityArgs {
    #[command(flatten)]
    pub network: NetworkArgs,
    /// Restrict to the O-D subnetwork between `--from` and `--to`.
    #[arg(long, requires = "to")]
    pub from: Option<String>,
    #[arg(long, requires = "from")]
    pub to: Option<String>,
    #[arg(long, default_value_t = 5.0)]
    pub min_side_km: f64,
    /// Min-max scale the values onto `[0, SCALE_MAX]`.
    #[arg(long)]
    pub scale_max: Option<f64>,
    /// Count hops instead of street length.
    #[arg(long)]
    pub hops: bool,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
#[command(group = clap::ArgGroup::new("scene").required(true).args(["kind", "preset", "scenario"]))]
pub struct SimulateArgs {
    /// gate_low, street_low or street_heavy.
    #[arg(long)]
    pub kind: Option<String>,
    /// fig6a or fig6b.
    #[arg(long)]
    pub preset: Option<String>,
    /// Scene JSON file.
    #[arg(long)]
    pub scenario: Option<PathBuf>,
    /// type1, type2 or mixed. Built scenes default to mixed; presets and
    /// files keep their own types unless this is given.
    #[arg(long = "type")]
    pub pmd_type: Option<String>,
    #[arg(long)]
    pub dt: Option<f64>,
    /// Simulation time cap in seconds.
    #[arg(long)]
    pub max_time: Option<f64>,
    /// Geometry overrides as a partial JSON object.
    #[arg(long)]
    pub geometry: Option<PathBuf>,
    /// Force-model constant overrides as a partial JSON object.
    #[arg(long)]
    pub constants: Option<PathBuf>,
    /// Trajectory CSV output.
    #[arg(long)]
    pub out: PathBuf,
    /// Run metadata JSON.
    #[arg(long)]
    pub meta: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct CompareArgs {
    /// A scene kind or `all`.
    #[arg(long, default_value = "all")]
    pub kind: String,
    /// Inclusive range `a:b` or a comma list.
    #[arg(long, default_value = "0:9")]
    pub seeds: String,
    #[arg(long, default_value_t = 300.0)]
    pub max_time: f64,
    #[arg(long)]
    pub geometry: Option<PathBuf>,
    #[arg(long)]
    pub constants: Option<PathBuf>,
    /// One row per kind, seed and device type.
    #[arg(long)]
    pub out: PathBuf,
    /// Per-kind medians and ratios as JSON.
    #[arg(long)]
    pub summary: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ValidateArgs {
    #[arg(long)]
    pub graph: Option<PathBuf>,
    #[arg(long)]
    pub zones: Option<PathBuf>,
    /// Edge-value CSV, checked against `--graph` when both are given.
    #[arg(long)]
    pub ic: Option<PathBuf>,
    #[arg(long)]
    pub scenario: Option<PathBuf>,
}

fn run(argv: Vec<String>) -> Result<(), CliError> {
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version.
            let _ = e.print();
            return Ok(());
        }
        Err(e) => return Err(CliError::usage(e.kind().to_string(), e.to_string())),
    };
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            return Err(CliError::invalid("--jobs must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(|e| CliError::invalid(e.to_string()))?;
    }
    commands::dispatch(&cli)
}

fn main() -> ExitCode {
    match run(std::env::args().collect()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.code)
        }
    }
}
