//! Pipeline driver: stage selection, artifact emission, and error-to-exit
//! mapping for the command line.

use std::fs;
use std::path::{Path, PathBuf};

use indexmap::IndexSet;
use serde::Serialize;
use thiserror::Error;

use crate::graph::{
    find_crossings, planarize_with_dummies, GraphError, Layout, PowerGraph,
};
use crate::metrics::{compute_metrics, MetricsError, MetricsReport};
use crate::milp::{iterative_plan, HighsBackend, MilpError, PlannerConfig, RoundLog};
use crate::partition::{
    assemble_layout, partition_kmeans, solve_partitions_parallel, AssemblyReport, ClusterConfig,
    PartitionError,
};
use crate::reduce::{reduce_crossings, ReduceError, ReductionConfig, ReductionReport};
use crate::render::{render_svg, RenderOptions};

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Stage {
    Full,
    Reduce,
    Plan,
    Metrics,
    PartitionFull,
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub input: PathBuf,
    pub output_dir: PathBuf,
    pub stage: Stage,
    pub reduction: ReductionConfig,
    /// Planner settings; derived from the drawing when unset.
    pub planner: Option<PlannerConfig>,
    pub node_radius: Option<f64>,
    pub seed: u64,
    /// Cluster count for the partition stage; `ceil(n / 64)` when unset.
    pub clusters: Option<usize>,
    pub workers: usize,
    /// Reference layout for the metrics stage.
    pub reference: Option<PathBuf>,
    pub neighbor_fraction: f64,
}

impl RunConfig {
    pub fn new(input: impl Into<PathBuf>, output_dir: impl Into<PathBuf>, stage: Stage) -> Self {
        RunConfig {
            input: input.into(),
            output_dir: output_dir.into(),
            stage,
            reduction: ReductionConfig::default(),
            planner: None,
            node_radius: None,
            seed: 42,
            clusters: None,
            workers: 1,
            reference: None,
            neighbor_fraction: 0.10,
        }
    }
}

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error(transparent)]
    Reduce(#[from] ReduceError),
    #[error("layout planning failed: {0}")]
    Milp(#[from] MilpError),
    #[error(transparent)]
    Partition(#[from] PartitionError),
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl PipelineError {
    /// Process exit code: 2 for configuration/input problems, 3 for planning
    /// that ran out of feasible rounds, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::Config(_) => 2,
            PipelineError::Graph(_) => 2,
            PipelineError::Io { .. } => 2,
            PipelineError::Milp(e) => match unwrap_round(e) {
                MilpError::Infeasible { .. } | MilpError::Timeout => 3,
                MilpError::Config(_) => 2,
                _ => 1,
            },
            _ => 1,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "error": self.to_string(),
            "exit_code": self.exit_code(),
        })
    }
}

fn unwrap_round(e: &MilpError) -> &MilpError {
    match e {
        MilpError::Round { source, .. } => unwrap_round(source),
        other => other,
    }
}

#[derive(Debug, Default, Serialize)]
pub struct PipelineReport {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reduction: Option<ReductionReport>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub rounds: Vec<RoundLog>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub assembly: Option<AssemblyReport>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub cluster_fallbacks: Vec<String>,
    pub wall_time_seconds: f64,
}

/// Everything a run produced, with the artifact paths that were written.
#[derive(Debug, Default)]
pub struct Artifacts {
    pub written: Vec<PathBuf>,
    pub metrics: Option<serde_json::Value>,
    pub final_crossings: Option<usize>,
}

fn write_text(dir: &Path, name: &str, text: &str, written: &mut Vec<PathBuf>) -> Result<(), PipelineError> {
    let path = dir.join(name);
    fs::write(&path, text).map_err(|source| PipelineError::Io {
        path: path.clone(),
        source,
    })?;
    written.push(path);
    Ok(())
}

fn metrics_or_skip(
    g: &PowerGraph,
    layout: &Layout,
    reference: Option<&Layout>,
    fraction: f64,
) -> Result<Option<MetricsReport>, PipelineError> {
    match compute_metrics(g, layout, reference, fraction) {
        Ok(r) => Ok(Some(r)),
        Err(MetricsError::UndefinedMetrics(_)) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

/// Runs the selected stage and writes its artifacts into the output
/// directory. Partial artifacts from completed stages survive later failures.
pub fn run_pipeline(cfg: &RunConfig) -> Result<Artifacts, PipelineError> {
    let wall = std::time::Instant::now();
    let raw = fs::read_to_string(&cfg.input).map_err(|source| PipelineError::Io {
        path: cfg.input.clone(),
        source,
    })?;
    let (graph, initial) = crate::io::load_graph_str(&raw)?;
    if cfg.workers == 0 {
        return Err(PipelineError::Config("workers must be at least 1".into()));
    }
    fs::create_dir_all(&cfg.output_dir).map_err(|source| PipelineError::Io {
        path: cfg.output_dir.clone(),
        source,
    })?;

    let mut artifacts = Artifacts::default();
    let mut report = PipelineReport::default();
    let render_opts = RenderOptions {
        node_radius: cfg.node_radius,
        tie_lines: IndexSet::new(),
    };

    if cfg.stage == Stage::Metrics {
        let reference = match &cfg.reference {
            None => None,
            Some(path) => {
                let text = fs::read_to_string(path).map_err(|source| PipelineError::Io {
                    path: path.clone(),
                    source,
                })?;
                Some(crate::io::load_graph_str(&text)?.1)
            }
        };
        let metrics = compute_metrics(&graph, &initial, reference.as_ref(), cfg.neighbor_fraction)?;
        let doc = serde_json::to_value(&metrics).expect("metrics serialize");
        write_text(
            &cfg.output_dir,
            "metrics.json",
            &serde_json::to_string_pretty(&doc).expect("metrics serialize"),
            &mut artifacts.written,
        )?;
        print!("{}", metrics.table());
        artifacts.metrics = Some(doc);
        return Ok(artifacts);
    }

    write_text(
        &cfg.output_dir,
        "initial.svg",
        &render_svg(&graph, &initial, &render_opts)?,
        &mut artifacts.written,
    )?;

    let mut metrics_doc = serde_json::Map::new();
    if let Some(m) = metrics_or_skip(&graph, &initial, Some(&initial), cfg.neighbor_fraction)? {
        metrics_doc.insert("initial".into(), serde_json::to_value(&m).expect("serialize"));
    }

    // Stage handling below threads (graph, layout) through reduce/planarize/
    // plan as requested, emitting artifacts as soon as each stage completes.
    let emit_final = |graph: &PowerGraph,
                          layout: &Layout,
                          name: &str,
                          ties: IndexSet<crate::graph::EdgeKey>,
                          metrics_doc: &mut serde_json::Map<String, serde_json::Value>,
                          artifacts: &mut Artifacts|
     -> Result<(), PipelineError> {
        write_text(
            &cfg.output_dir,
            &format!("{name}.json"),
            &crate::io::to_document_string(graph, layout)?,
            &mut artifacts.written,
        )?;
        let opts = RenderOptions {
            node_radius: cfg.node_radius,
            tie_lines: ties,
        };
        write_text(
            &cfg.output_dir,
            &format!("{name}.svg"),
            &render_svg(graph, layout, &opts)?,
            &mut artifacts.written,
        )?;
        if let Some(m) = metrics_or_skip(graph, layout, Some(&initial), cfg.neighbor_fraction)? {
            metrics_doc.insert(name.into(), serde_json::to_value(&m).expect("serialize"));
        }
        artifacts.final_crossings = Some(find_crossings(graph, layout)?.count());
        Ok(())
    };

    let finalize = |report: &mut PipelineReport,
                    metrics_doc: serde_json::Map<String, serde_json::Value>,
                    artifacts: &mut Artifacts,
                    wall: std::time::Instant|
     -> Result<(), PipelineError> {
        report.wall_time_seconds = wall.elapsed().as_secs_f64();
        write_text(
            &cfg.output_dir,
            "metrics.json",
            &serde_json::to_string_pretty(&serde_json::Value::Object(metrics_doc.clone()))
                .expect("serialize"),
            &mut artifacts.written,
        )?;
        write_text(
            &cfg.output_dir,
            "report.json",
            &serde_json::to_string_pretty(report).expect("serialize"),
            &mut artifacts.written,
        )?;
        artifacts.metrics = Some(serde_json::Value::Object(metrics_doc));
        Ok(())
    };

    match cfg.stage {
        Stage::Metrics => unreachable!("handled above"),
        Stage::Reduce => {
            let (rg, rl, rr) = reduce_crossings(&graph, &initial, &cfg.reduction)?;
            report.reduction = Some(rr);
            emit_final(&rg, &rl, "reduced", IndexSet::new(), &mut metrics_doc, &mut artifacts)?;
            finalize(&mut report, metrics_doc, &mut artifacts, wall)?;
        }
        Stage::Plan => {
            let crossings = find_crossings(&graph, &initial)?;
            let (pg, pl) = planarize_with_dummies(&graph, &initial, &crossings)?;
            let planner = match &cfg.planner {
                Some(p) => p.clone(),
                None => crate::milp::suggest_params(&pg, &pl)?,
            };
            let planned = iterative_plan(&pg, &pl, &planner, &HighsBackend);
            match planned {
                Ok((optimized, rounds)) => {
                    report.rounds = rounds;
                    emit_final(&pg, &optimized, "optimized", IndexSet::new(), &mut metrics_doc, &mut artifacts)?;
                    finalize(&mut report, metrics_doc, &mut artifacts, wall)?;
                }
                Err(e) => {
                    finalize(&mut report, metrics_doc, &mut artifacts, wall)?;
                    return Err(e.into());
                }
            }
        }
        Stage::Full => {
            let (rg, rl, rr) = reduce_crossings(&graph, &initial, &cfg.reduction)?;
            report.reduction = Some(rr);
            emit_final(&rg, &rl, "reduced", IndexSet::new(), &mut metrics_doc, &mut artifacts)?;
            let crossings = find_crossings(&rg, &rl)?;
            let (pg, pl) = planarize_with_dummies(&rg, &rl, &crossings)?;
            let planner = match &cfg.planner {
                Some(p) => p.clone(),
                None => crate::milp::suggest_params(&pg, &pl)?,
            };
            match iterative_plan(&pg, &pl, &planner, &HighsBackend) {
                Ok((optimized, rounds)) => {
                    report.rounds = rounds;
                    emit_final(&pg, &optimized, "optimized", IndexSet::new(), &mut metrics_doc, &mut artifacts)?;
                    finalize(&mut report, metrics_doc, &mut artifacts, wall)?;
                }
                Err(e) => {
                    // Keep the reduced artifacts; surface the planning error.
                    finalize(&mut report, metrics_doc, &mut artifacts, wall)?;
                    return Err(e.into());
                }
            }
        }
        Stage::PartitionFull => {
            let n = graph.node_count();
            let k = cfg.clusters.unwrap_or_else(|| n.div_ceil(64)).max(1);
            let plan = partition_kmeans(&graph, &initial, k.min(n.max(1)), cfg.seed)?;
            write_text(
                &cfg.output_dir,
                "plan.json",
                &serde_json::to_string_pretty(&plan.to_json()).expect("serialize"),
                &mut artifacts.written,
            )?;
            let cluster_cfg = ClusterConfig {
                reduction: cfg.reduction.clone(),
                planner: cfg.planner.clone(),
            };
            let outcomes = solve_partitions_parallel(&plan, &cluster_cfg, cfg.workers, &HighsBackend)?;
            report.cluster_fallbacks = outcomes
                .iter()
                .filter_map(|o| o.fallback.as_ref().map(|f| format!("cluster {}: {f}", o.cluster)))
                .collect();
            let (merged, assembled, assembly) = assemble_layout(&plan, &outcomes)?;
            report.assembly = Some(assembly);
            let ties: IndexSet<crate::graph::EdgeKey> = plan.tie_lines.iter().cloned().collect();
            emit_final(&merged, &assembled, "optimized", ties, &mut metrics_doc, &mut artifacts)?;
            finalize(&mut report, metrics_doc, &mut artifacts, wall)?;
        }
    }
    Ok(artifacts)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fixture(name: &str) -> PathBuf {
        PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures")).join(name)
    }

    #[test]
    fn metrics_stage_reports_rp_one_for_identical_reference() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = RunConfig::new(fixture("k5.json"), dir.path(), Stage::Metrics);
        cfg.reference = Some(fixture("k5.json"));
        let artifacts = run_pipeline(&cfg).unwrap();
        let metrics = artifacts.metrics.unwrap();
        assert!((metrics["rp"].as_f64().unwrap() - 1.0).abs() < 1e-9);
        assert_eq!(metrics["ex"].as_i64().unwrap(), -5);
    }

    #[test]
    fn reduce_stage_on_planar_input_is_identity() {
        let raw = r#"{
            "nodes": [{"id":"a","x":0,"y":0},{"id":"b","x":1,"y":0},{"id":"c","x":1,"y":1}],
            "edges": [{"a":"a","b":"b"},{"a":"b","b":"c"}]
        }"#;
        let dir = tempfile::tempdir().unwrap();
        let input = dir.path().join("in.json");
        std::fs::write(&input, raw).unwrap();
        let cfg = RunConfig::new(&input, dir.path(), Stage::Reduce);
        let artifacts = run_pipeline(&cfg).unwrap();
        assert_eq!(artifacts.final_crossings, Some(0));
        let reduced = std::fs::read_to_string(dir.path().join("reduced.json")).unwrap();
        let (g2, l2) = crate::io::load_graph_str(&reduced).unwrap();
        let (g1, l1) = crate::io::load_graph_str(raw).unwrap();
        assert_eq!(g2.edge_count(), g1.edge_count());
        for (id, p) in l1.iter() {
            assert_eq!(l2.get(id), Some(p));
        }
        let _ = g2;
    }

    #[test]
    fn artifacts_round_trip_through_the_loader() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = RunConfig::new(fixture("k5.json"), dir.path(), Stage::Reduce);
        let artifacts = run_pipeline(&cfg).unwrap();
        for path in &artifacts.written {
            if path.extension().is_some_and(|e| e == "json")
                && path.file_name().is_some_and(|n| n == "reduced.json")
            {
                let text = std::fs::read_to_string(path).unwrap();
                crate::io::load_graph_str(&text).unwrap();
            }
        }
    }
}
