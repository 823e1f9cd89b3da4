//! `dlgeo`: build lamplighter geometry objects and run coarse-geometry
//! experiments on them.
//!
//! Exit codes: 0 success, 1 failed verification or violated hypothesis,
//! 2 usage or input error, 3 capacity exceeded.

mod commands;
mod config;
mod parse;
mod selftest;

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use config::Config;

#[derive(Parser, Debug)]
#[command(name = "dlgeo", version, about = "Lamplighter groups, Diestel-Leader graphs and quasi-isometry measurements")]
pub struct Cli {
    /// JSON file supplying defaults; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Caps the number of worker threads.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Largest number of vertices any constructed graph may have.
    #[arg(long, global = true, env = "DLGEO_CAPACITY")]
    capacity: Option<usize>,
    /// Write the artifact here instead of stdout.
    #[arg(short, long, global = true)]
    output: Option<PathBuf>,
    /// Report errors on stderr as a JSON object.
    #[arg(long, global = true)]
    error_json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Ball of the tree T_G.
    TreeBall(TreeBallArgs),
    /// Ball of a horosphere graph.
    DlBall(BallArgs),
    /// Pairwise distances over a ball, as CSV.
    Dist(DistArgs),
    /// Sphere sizes around several basepoints.
    Profile(ProfileArgs),
    /// Orbit coverage and stabilizer of the lamplighter action.
    Orbit(OrbitArgs),
    /// Quasi-isometry constants of the orbit map from the Cayley graph.
    QiOrbit(QiOrbitArgs),
    /// The block-collapsing map from G to G^k.
    Collapse(CollapseArgs),
    /// Relabeling isomorphism between two horospheres of equal group order.
    Isocheck(IsocheckArgs),
    /// Search for a long simple cycle.
    Cycles(CyclesArgs),
    /// Run the built-in invariant suite.
    Selftest,
}

#[derive(Args, Debug, Clone)]
pub struct SpaceArgs {
    /// Coefficient group: cyclic:q, cyclic:q^k, table:FILE or table:FILE^k.
    #[arg(long)]
    pub group: Option<String>,
    /// Group of the second tree, if it differs from --group.
    #[arg(long)]
    pub right: Option<String>,
    /// DL(q, r) with cyclic coefficient groups of orders q and r.
    #[arg(long)]
    pub dl: Option<String>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphFormat {
    Dot,
    Json,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableFormat {
    Csv,
    Json,
}

#[derive(Args, Debug)]
pub struct TreeBallArgs {
    #[arg(long)]
    pub group: Option<String>,
    #[arg(long)]
    pub radius: Option<u32>,
    /// Center as `(h | i:g, ..)`; defaults to the root.
    #[arg(long)]
    pub center: Option<String>,
    #[arg(long, value_enum, default_value = "json")]
    pub format: GraphFormat,
}

#[derive(Args, Debug)]
pub struct BallArgs {
    #[command(flatten)]
    pub space: SpaceArgs,
    #[arg(long)]
    pub radius: Option<u32>,
    /// Center as `[(h | ..), (-h | ..)]`; defaults to the base vertex.
    #[arg(long)]
    pub center: Option<String>,
    #[arg(long, value_enum, default_value = "json")]
    pub format: GraphFormat,
}

#[derive(Args, Debug)]
pub struct DistArgs {
    #[command(flatten)]
    pub space: SpaceArgs,
    /// Measure in the tree of --group rather than the horosphere.
    #[arg(long)]
    pub tree: bool,
    #[arg(long)]
    pub radius: Option<u32>,
    #[arg(long)]
    pub center: Option<String>,
}

#[derive(Args, Debug)]
pub struct ProfileArgs {
    #[command(flatten)]
    pub space: SpaceArgs,
    #[arg(long)]
    pub radius: Option<u32>,
    /// Number of basepoints; the first is the base vertex, the rest are random walk endpoints.
    #[arg(long)]
    pub basepoints: Option<usize>,
    /// Length of the random walks choosing basepoints.
    #[arg(long)]
    pub walk: Option<usize>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: TableFormat,
    /// CSV with one `basepoint,radius,size` row per sphere instead of one row per basepoint.
    #[arg(long)]
    pub long: bool,
    /// Exit 1 unless every basepoint has the same profile.
    #[arg(long)]
    pub require_identical: bool,
}

#[derive(Args, Debug)]
pub struct OrbitArgs {
    #[arg(long)]
    pub group: Option<String>,
    #[arg(long)]
    pub radius: Option<u32>,
    /// Lamp positions -window..=window are searched.
    #[arg(long)]
    pub window: Option<i64>,
    /// Vertex whose stabilizer is probed; defaults to the base vertex.
    #[arg(long)]
    pub vertex: Option<String>,
}

#[derive(Args, Debug)]
pub struct QiOrbitArgs {
    #[arg(long)]
    pub group: Option<String>,
    #[arg(long)]
    pub radius: Option<u32>,
    /// Multiplicative constants to try, e.g. `1,9/8,2`.
    #[arg(long)]
    pub grid: Option<String>,
    /// Also write the word-length growth of the Cayley ball as CSV to this file.
    #[arg(long)]
    pub growth_csv: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct CollapseArgs {
    #[arg(long)]
    pub group: Option<String>,
    /// Block length.
    #[arg(long)]
    pub k: Option<usize>,
    /// Radius of the tree ball whose pairs are measured.
    #[arg(long)]
    pub tree_radius: Option<u32>,
    /// Radius of the horosphere ball whose image is compared; defaults to 2k.
    #[arg(long)]
    pub h_radius: Option<u32>,
    #[arg(long)]
    pub grid: Option<String>,
    /// Largest accepted `|d' - d/k|`.
    #[arg(long, default_value = "2")]
    pub max_deviation: String,
    /// Largest accepted Hausdorff distance of the horosphere image.
    #[arg(long, default_value_t = 3)]
    pub max_hausdorff: u64,
}

#[derive(Args, Debug)]
pub struct IsocheckArgs {
    #[arg(long)]
    pub left: String,
    #[arg(long)]
    pub right: String,
    #[arg(long)]
    pub radius: Option<u32>,
}

#[derive(Args, Debug)]
pub struct CyclesArgs {
    #[command(flatten)]
    pub space: SpaceArgs,
    #[arg(long)]
    pub min_length: Option<usize>,
    #[arg(long)]
    pub max_radius: Option<u32>,
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Core(dlgeo::Error),
    /// The artifact was produced but a checked property failed.
    Failed(String),
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Failed(_) | CliError::Core(dlgeo::Error::HypothesisViolated(_)) => 1,
            CliError::Core(dlgeo::Error::Capacity { .. }) => 3,
            _ => 2,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Failed(_) => "verification",
            CliError::Core(dlgeo::Error::Capacity { .. }) => "capacity",
            CliError::Core(dlgeo::Error::HypothesisViolated(_)) => "hypothesis",
            CliError::Core(dlgeo::Error::Io(_)) => "io",
            CliError::Core(_) => "input",
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Failed(m) => write!(f, "verification failed: {m}"),
        }
    }
}

impl From<dlgeo::Error> for CliError {
    fn from(e: dlgeo::Error) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Core(e.into())
    }
}

/// Resolved settings shared by every subcommand.
pub struct Ctx {
    pub config: Config,
    pub seed: u64,
    pub limits: dlgeo::Limits,
    output: Option<PathBuf>,
}

impl Ctx {
    /// Writes the artifact, newline-terminated.
    pub fn emit(&self, text: &str) -> Result<(), CliError> {
        let mut text = text.to_string();
        if !text.ends_with('\n') {
            text.push('\n');
        }
        match &self.output {
            Some(path) => fs::write(path, text)?,
            None => std::io::stdout().lock().write_all(text.as_bytes())?,
        }
        Ok(())
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let config = match &cli.config {
        Some(path) => Config::load(path)?,
        None => Config::default(),
    };
    if let Some(n) = cli.threads.or(config.threads) {
        if n == 0 {
            return Err(CliError::usage("--threads must be positive"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::usage(format!("thread pool: {e}")))?;
    }
    let capacity = cli.capacity.or(config.capacity).unwrap_or(dlgeo::graph::DEFAULT_CAPACITY);
    if capacity == 0 {
        return Err(CliError::usage("capacity must be positive"));
    }
    let ctx = Ctx {
        seed: cli.seed.or(config.seed).unwrap_or(0),
        limits: dlgeo::Limits::new(capacity),
        output: cli.output.clone(),
        config,
    };
    match &cli.command {
        Command::TreeBall(a) => commands::tree_ball(&ctx, a),
        Command::DlBall(a) => commands::dl_ball(&ctx, a),
        Command::Dist(a) => commands::dist(&ctx, a),
        Command::Profile(a) => commands::profile(&ctx, a),
        Command::Orbit(a) => commands::orbit(&ctx, a),
        Command::QiOrbit(a) => commands::qi_orbit(&ctx, a),
        Command::Collapse(a) => commands::collapse(&ctx, a),
        Command::Isocheck(a) => commands::isocheck(&ctx, a),
        Command::Cycles(a) => commands::cycles(&ctx, a),
        Command::Selftest => selftest::run(&ctx),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let error_json = cli.error_json;
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let code = e.exit_code();
            if error_json {
                let mut obj = json!({ "error": e.kind(), "message": e.to_string(), "exit_code": code });
                if let CliError::Core(dlgeo::Error::Capacity { projected, limit }) = &e {
                    obj["projected"] = json!(projected.to_string());
                    obj["limit"] = json!(limit);
                }
                eprintln!("{obj}");
            } else {
                eprintln!("dlgeo: {e}");
            }
            ExitCode::from(code)
        }
    }
}
