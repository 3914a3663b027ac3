//! Command line driver: `topo full|reduce|plan|metrics|partition`.
//!
//! Settings resolve with flags over `TOPO_*` environment variables over the
//! TOML config file over built-in defaults. On failure a machine-readable
//! error object is printed to stdout and the exit code is 2 for bad
//! configuration or input, 3 for planning that ended infeasible.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

use topo::milp::{Flexibility, PlannerConfig, Weights};
use topo::pipeline::{run_pipeline, RunConfig, Stage};
use topo::reduce::ReductionConfig;

#[derive(Parser)]
#[command(name = "topo", version, about = "Topology diagram layout engine for transmission grids")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Crossing reduction followed by layout planning.
    Full(StageArgs),
    /// Crossing reduction only.
    Reduce(StageArgs),
    /// Layout planning only (input is treated as crossing-reduced).
    Plan(StageArgs),
    /// Aesthetic metrics of a drawing.
    Metrics(StageArgs),
    /// Partitioned pipeline for large grids.
    Partition(StageArgs),
}

#[derive(Args)]
struct StageArgs {
    /// Input drawing (JSON grid format).
    #[arg(short, long)]
    input: PathBuf,
    /// Output directory for artifacts.
    #[arg(short, long, default_value = "out")]
    out_dir: PathBuf,
    /// TOML config file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Reference drawing for relative-position scoring (metrics).
    #[arg(long)]
    reference: Option<PathBuf>,

    /// Seed for k-means and any other randomized plumbing.
    #[arg(long)]
    seed: Option<u64>,
    /// Disable the local-subgraph restriction.
    #[arg(long)]
    no_h1: bool,
    /// Disable the endpoint/inflection shortcut.
    #[arg(long)]
    no_h2: bool,
    /// BFS depth of the local subgraph.
    #[arg(long)]
    bfs_depth: Option<usize>,
    /// Canvas expansion as a fraction of local mean edge length.
    #[arg(long)]
    expand_factor: Option<f64>,

    /// Axis count of the coordinate system.
    #[arg(long)]
    k: Option<u32>,
    /// Sector flexibility margin: a number or "per-node".
    #[arg(long)]
    s: Option<String>,
    /// Minimum edge length.
    #[arg(long)]
    lmin: Option<f64>,
    /// Minimum separation between planarity-constrained edges.
    #[arg(long)]
    dmin: Option<f64>,
    #[arg(long)]
    w_rp: Option<f64>,
    #[arg(long)]
    w_or: Option<f64>,
    #[arg(long)]
    w_ev: Option<f64>,
    /// Relative MIP gap treated as converged.
    #[arg(long)]
    gap: Option<f64>,
    /// Per-round solver time limit in seconds.
    #[arg(long)]
    time_limit: Option<f64>,
    #[arg(long)]
    max_rounds: Option<usize>,

    /// Cluster count for the partition stage.
    #[arg(long)]
    clusters: Option<usize>,
    /// Parallel workers for the partition stage.
    #[arg(long)]
    workers: Option<usize>,
    /// Marker radius in layout units.
    #[arg(long)]
    node_radius: Option<f64>,
}

#[derive(Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    seed: Option<u64>,
    #[serde(default)]
    reduction: FileReduction,
    #[serde(default)]
    planner: FilePlanner,
    #[serde(default)]
    partition: FilePartition,
    #[serde(default)]
    render: FileRender,
}

#[derive(Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileReduction {
    bfs_depth: Option<usize>,
    expand_factor: Option<f64>,
    h1: Option<bool>,
    h2: Option<bool>,
}

#[derive(Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FilePlanner {
    k: Option<u32>,
    s: Option<toml::Value>,
    lmin: Option<f64>,
    dmin: Option<f64>,
    w_rp: Option<f64>,
    w_or: Option<f64>,
    w_ev: Option<f64>,
    gap: Option<f64>,
    time_limit_secs: Option<f64>,
    max_rounds: Option<usize>,
}

#[derive(Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FilePartition {
    clusters: Option<usize>,
    workers: Option<usize>,
}

#[derive(Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileRender {
    node_radius: Option<f64>,
}

fn env_var<T: std::str::FromStr>(name: &str) -> Option<T> {
    std::env::var(format!("TOPO_{name}")).ok()?.parse().ok()
}

fn parse_flexibility(text: &str) -> Result<Flexibility, String> {
    match text {
        "per-node" | "per_node" => Ok(Flexibility::PerNode),
        other => other
            .parse::<u32>()
            .map(Flexibility::Scalar)
            .map_err(|_| format!("invalid flexibility {other:?}; use a number or \"per-node\"")),
    }
}

fn build_run_config(stage: Stage, args: &StageArgs) -> Result<RunConfig, String> {
    let file: FileConfig = match &args.config {
        None => FileConfig::default(),
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
            toml::from_str(&text).map_err(|e| format!("bad config {}: {e}", path.display()))?
        }
    };

    let mut cfg = RunConfig::new(&args.input, &args.out_dir, stage);
    cfg.reference = args.reference.clone();
    cfg.seed = args
        .seed
        .or_else(|| env_var("SEED"))
        .or(file.seed)
        .unwrap_or(42);

    let defaults = ReductionConfig::default();
    cfg.reduction = ReductionConfig {
        bfs_depth: args
            .bfs_depth
            .or_else(|| env_var("BFS_DEPTH"))
            .or(file.reduction.bfs_depth)
            .unwrap_or(defaults.bfs_depth),
        expansion_factor: args
            .expand_factor
            .or_else(|| env_var("EXPAND_FACTOR"))
            .or(file.reduction.expand_factor)
            .unwrap_or(defaults.expansion_factor),
        enable_h1: if args.no_h1 { false } else { file.reduction.h1.unwrap_or(true) },
        enable_h2: if args.no_h2 { false } else { file.reduction.h2.unwrap_or(true) },
    };

    let file_s = match &file.planner.s {
        None => None,
        Some(toml::Value::Integer(n)) => Some(Flexibility::Scalar(
            u32::try_from(*n).map_err(|_| "negative flexibility".to_string())?,
        )),
        Some(toml::Value::String(text)) => Some(parse_flexibility(text)?),
        Some(other) => return Err(format!("bad flexibility value {other:?}")),
    };
    let arg_s = match &args.s {
        None => env_var::<String>("S").map(|t| parse_flexibility(&t)).transpose()?,
        Some(text) => Some(parse_flexibility(text)?),
    };

    let planner_touched = args.k.is_some()
        || arg_s.is_some()
        || args.lmin.is_some()
        || args.dmin.is_some()
        || args.w_rp.is_some()
        || args.w_or.is_some()
        || args.w_ev.is_some()
        || args.gap.is_some()
        || args.time_limit.is_some()
        || args.max_rounds.is_some()
        || file.planner.k.is_some()
        || file_s.is_some()
        || file.planner.lmin.is_some()
        || file.planner.dmin.is_some()
        || file.planner.w_rp.is_some()
        || file.planner.w_or.is_some()
        || file.planner.w_ev.is_some()
        || file.planner.gap.is_some()
        || file.planner.time_limit_secs.is_some()
        || file.planner.max_rounds.is_some()
        || env_var::<u32>("K").is_some();
    if planner_touched {
        let d = PlannerConfig::default();
        let weights = Weights {
            rp: args.w_rp.or_else(|| env_var("W_RP")).or(file.planner.w_rp).unwrap_or(d.weights.rp),
            or: args.w_or.or_else(|| env_var("W_OR")).or(file.planner.w_or).unwrap_or(d.weights.or),
            ev: args.w_ev.or_else(|| env_var("W_EV")).or(file.planner.w_ev).unwrap_or(d.weights.ev),
        };
        cfg.planner = Some(PlannerConfig {
            k: args.k.or_else(|| env_var("K")).or(file.planner.k).unwrap_or(d.k),
            flexibility: arg_s.or(file_s).unwrap_or(d.flexibility),
            min_edge_length: args
                .lmin
                .or_else(|| env_var("LMIN"))
                .or(file.planner.lmin)
                .unwrap_or(d.min_edge_length),
            min_separation: args
                .dmin
                .or_else(|| env_var("DMIN"))
                .or(file.planner.dmin)
                .unwrap_or(d.min_separation),
            weights,
            relative_gap: args
                .gap
                .or_else(|| env_var("GAP"))
                .or(file.planner.gap)
                .unwrap_or(d.relative_gap),
            time_limit: args
                .time_limit
                .or_else(|| env_var("TIME_LIMIT"))
                .or(file.planner.time_limit_secs)
                .map(Duration::from_secs_f64),
            max_rounds: args
                .max_rounds
                .or_else(|| env_var("MAX_ROUNDS"))
                .or(file.planner.max_rounds)
                .unwrap_or(d.max_rounds),
        });
    }

    cfg.clusters = args
        .clusters
        .or_else(|| env_var("CLUSTERS"))
        .or(file.partition.clusters);
    cfg.workers = args
        .workers
        .or_else(|| env_var("WORKERS"))
        .or(file.partition.workers)
        .unwrap_or(1);
    cfg.node_radius = args
        .node_radius
        .or_else(|| env_var("NODE_RADIUS"))
        .or(file.render.node_radius);
    Ok(cfg)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let (stage, args) = match &cli.command {
        Command::Full(a) => (Stage::Full, a),
        Command::Reduce(a) => (Stage::Reduce, a),
        Command::Plan(a) => (Stage::Plan, a),
        Command::Metrics(a) => (Stage::Metrics, a),
        Command::Partition(a) => (Stage::PartitionFull, a),
    };
    let cfg = match build_run_config(stage, args) {
        Ok(cfg) => cfg,
        Err(message) => {
            println!(
                "{}",
                serde_json::json!({"error": message, "exit_code": 2})
            );
            return ExitCode::from(2);
        }
    };
    match run_pipeline(&cfg) {
        Ok(artifacts) => {
            for path in &artifacts.written {
                eprintln!("wrote {}", path.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            println!("{}", e.to_json());
            ExitCode::from(u8::try_from(e.exit_code()).unwrap_or(1))
        }
    }
}
