//! Scaling to large grids: K-Means clustering of node positions, independent
//! crossing reduction and layout planning per cluster (optionally in
//! parallel), and reassembly that anchors each optimized sub-layout at its
//! original centroid and draws tie-lines straight.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use indexmap::{IndexMap, IndexSet};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::geometry::Point;
use crate::graph::{
    find_crossings, planarize_with_dummies, EdgeKey, GraphError, Layout, NodeId, PowerGraph,
};
use crate::milp::{iterative_plan, MilpError, PlannerConfig, RoundLog, SolverBackend};
use crate::reduce::{reduce_crossings, ReduceError, ReductionConfig, ReductionReport};

#[derive(Debug, Error)]
pub enum PartitionError {
    #[error("cluster count {k} must be between 1 and the node count {nodes}")]
    BadClusterCount { k: usize, nodes: usize },
    #[error("worker count must be at least 1")]
    NoWorkers,
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Clone, Debug)]
pub struct PartitionPlan {
    pub k: usize,
    pub assignment: IndexMap<NodeId, usize>,
    /// Per-cluster induced graph and original sub-layout.
    pub submodels: Vec<(PowerGraph, Layout)>,
    /// Edges whose endpoints fall in different clusters.
    pub tie_lines: Vec<EdgeKey>,
}

impl PartitionPlan {
    pub fn to_json(&self) -> serde_json::Value {
        let assignment: serde_json::Map<String, serde_json::Value> = self
            .assignment
            .iter()
            .map(|(id, c)| (id.to_string(), serde_json::json!(c)))
            .collect();
        serde_json::json!({
            "k": self.k,
            "assignment": assignment,
            "tie_lines": self
                .tie_lines
                .iter()
                .map(|e| serde_json::json!({"a": e.a().to_string(), "b": e.b().to_string()}))
                .collect::<Vec<_>>(),
        })
    }
}

/// Lloyd iterations from a seeded k-means++ start, until the assignment
/// reaches a fixpoint or 300 iterations. Deterministic for (layout, k, seed);
/// a cluster that empties is re-seeded at the point farthest from its
/// centroid.
pub fn partition_kmeans(
    g: &PowerGraph,
    layout: &Layout,
    k: usize,
    seed: u64,
) -> Result<PartitionPlan, PartitionError> {
    let mut ids: Vec<NodeId> = g.node_ids().cloned().collect();
    ids.sort();
    let n = ids.len();
    if k == 0 || k > n {
        return Err(PartitionError::BadClusterCount { k, nodes: n });
    }
    let points: Vec<Point> = ids
        .iter()
        .map(|id| layout.position(id).map_err(PartitionError::Graph))
        .collect::<Result<_, _>>()?;

    // k-means++ seeding.
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut centroids: Vec<Point> = Vec::with_capacity(k);
    centroids.push(points[rng.gen_range(0..n)]);
    while centroids.len() < k {
        let weights: Vec<f64> = points
            .iter()
            .map(|p| {
                centroids
                    .iter()
                    .map(|c| p.distance(*c).powi(2))
                    .fold(f64::INFINITY, f64::min)
            })
            .collect();
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            // All points covered; spread remaining centroids over the points.
            let idx = centroids.len() % n;
            centroids.push(points[idx]);
            continue;
        }
        let mut pick = rng.gen_range(0.0..total);
        let mut chosen = n - 1;
        for (i, w) in weights.iter().enumerate() {
            if pick < *w {
                chosen = i;
                break;
            }
            pick -= w;
        }
        centroids.push(points[chosen]);
    }

    let mut assignment: Vec<usize> = vec![0; n];
    for _ in 0..300 {
        let mut next: Vec<usize> = Vec::with_capacity(n);
        for p in &points {
            let mut best = 0usize;
            let mut best_d = f64::INFINITY;
            for (c, centroid) in centroids.iter().enumerate() {
                let d = p.distance(*centroid);
                if d < best_d {
                    best_d = d;
                    best = c;
                }
            }
            next.push(best);
        }
        // Re-seed empty clusters at the farthest point from its centroid.
        loop {
            let mut sizes = vec![0usize; k];
            for &c in &next {
                sizes[c] += 1;
            }
            let Some(empty) = sizes.iter().position(|&s| s == 0) else {
                break;
            };
            let far = (0..n)
                .max_by(|&a, &b| {
                    let da = points[a].distance(centroids[next[a]]);
                    let db = points[b].distance(centroids[next[b]]);
                    da.partial_cmp(&db).unwrap().then(b.cmp(&a))
                })
                .expect("non-empty point set");
            next[far] = empty;
            centroids[empty] = points[far];
        }
        let converged = next == assignment;
        assignment = next;
        for c in 0..k {
            let members: Vec<&Point> = (0..n)
                .filter(|&i| assignment[i] == c)
                .map(|i| &points[i])
                .collect();
            if !members.is_empty() {
                let inv = 1.0 / members.len() as f64;
                centroids[c] = Point::new(
                    members.iter().map(|p| p.x).sum::<f64>() * inv,
                    members.iter().map(|p| p.y).sum::<f64>() * inv,
                );
            }
        }
        if converged {
            break;
        }
    }

    let assignment: IndexMap<NodeId, usize> = ids
        .iter()
        .cloned()
        .zip(assignment.iter().copied())
        .collect();
    let mut submodels = Vec::with_capacity(k);
    for c in 0..k {
        let keep: IndexSet<NodeId> = assignment
            .iter()
            .filter(|(_, &cc)| cc == c)
            .map(|(id, _)| id.clone())
            .collect();
        let sub = g.induced(&keep);
        let sub_layout = Layout::from_iter(
            keep.iter()
                .map(|id| (id.clone(), layout.get(id).expect("layout covers graph"))),
        );
        submodels.push((sub, sub_layout));
    }
    let tie_lines: Vec<EdgeKey> = g
        .sorted_edge_keys()
        .into_iter()
        .filter(|key| assignment[key.a()] != assignment[key.b()])
        .collect();
    Ok(PartitionPlan {
        k,
        assignment,
        submodels,
        tie_lines,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ClusterOutcome {
    pub cluster: usize,
    #[serde(skip)]
    pub graph: PowerGraph,
    #[serde(skip)]
    pub layout: Layout,
    pub reduction: Option<ReductionReport>,
    pub rounds: Vec<RoundLog>,
    /// Set when the cluster fell back to an earlier stage.
    pub fallback: Option<String>,
}

#[derive(Clone, Debug)]
pub struct ClusterConfig {
    pub reduction: ReductionConfig,
    /// Planner settings; `None` derives defaults per submodel.
    pub planner: Option<PlannerConfig>,
}

fn solve_one_cluster(
    cluster: usize,
    g: &PowerGraph,
    layout: &Layout,
    cfg: &ClusterConfig,
    backend: &dyn SolverBackend,
) -> ClusterOutcome {
    let mut out = ClusterOutcome {
        cluster,
        graph: g.clone(),
        layout: layout.clone(),
        reduction: None,
        rounds: Vec::new(),
        fallback: None,
    };
    if g.node_count() == 0 {
        return out;
    }
    let (rg, rl, report) = match reduce_crossings(g, layout, &cfg.reduction) {
        Ok(x) => x,
        Err(e) => {
            out.fallback = Some(format!("crossing reduction failed: {e}"));
            return out;
        }
    };
    out.reduction = Some(report);
    out.graph = rg.clone();
    out.layout = rl.clone();

    let planarized = find_crossings(&rg, &rl)
        .map_err(ReduceError::Graph)
        .and_then(|x| planarize_with_dummies(&rg, &rl, &x).map_err(ReduceError::Graph));
    let (pg, pl) = match planarized {
        Ok(x) => x,
        Err(e) => {
            out.fallback = Some(format!("planarization failed: {e}"));
            return out;
        }
    };
    let planner = match &cfg.planner {
        Some(p) => p.clone(),
        None => match crate::milp::suggest_params(&pg, &pl) {
            Ok(p) => p,
            Err(e) => {
                out.fallback = Some(format!("parameter derivation failed: {e}"));
                return out;
            }
        },
    };
    match iterative_plan(&pg, &pl, &planner, backend) {
        Ok((optimized, rounds)) => {
            out.rounds = rounds;
            out.graph = pg;
            out.layout = optimized;
        }
        Err(e @ (MilpError::Round { .. } | MilpError::Infeasible { .. } | MilpError::Timeout)) => {
            out.fallback = Some(format!("planning failed, keeping reduced layout: {e}"));
        }
        Err(e) => {
            out.fallback = Some(format!("planning error, keeping reduced layout: {e}"));
        }
    }
    out
}

/// Runs reduction + planning on every submodel with a fixed-size worker pool.
/// Each job is a pure function of its inputs, so results are identical for
/// any worker count; failed clusters fall back to their best earlier stage
/// and carry the error message.
pub fn solve_partitions_parallel(
    plan: &PartitionPlan,
    cfg: &ClusterConfig,
    workers: usize,
    backend: &(dyn SolverBackend + Sync),
) -> Result<Vec<ClusterOutcome>, PartitionError> {
    if workers == 0 {
        return Err(PartitionError::NoWorkers);
    }
    let jobs: Vec<usize> = (0..plan.submodels.len()).collect();
    let cursor = AtomicUsize::new(0);
    let results: Mutex<Vec<Option<ClusterOutcome>>> =
        Mutex::new(vec![None; plan.submodels.len()]);
    std::thread::scope(|scope| {
        for _ in 0..workers.min(jobs.len().max(1)) {
            scope.spawn(|| loop {
                let i = cursor.fetch_add(1, Ordering::SeqCst);
                if i >= jobs.len() {
                    break;
                }
                let (g, layout) = &plan.submodels[jobs[i]];
                let outcome = solve_one_cluster(jobs[i], g, layout, cfg, backend);
                results.lock().expect("no poisoned workers")[jobs[i]] = Some(outcome);
            });
        }
    });
    Ok(results
        .into_inner()
        .expect("workers joined")
        .into_iter()
        .map(|o| o.expect("every cluster solved"))
        .collect())
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct AssemblyReport {
    /// Crossings between edges inside a single cluster.
    pub internal_crossings: usize,
    /// Crossings involving at least one tie-line.
    pub tie_crossings: usize,
    pub warnings: Vec<String>,
}

/// Splices optimized sub-layouts back together: each cluster is uniformly
/// scaled to fit 1.2x its original bounding box and translated so its
/// centroid returns to the original cluster centroid; tie-lines connect their
/// endpoints straight. Crossings introduced by tie-lines are reported
/// separately from intra-cluster ones.
pub fn assemble_layout(
    plan: &PartitionPlan,
    outcomes: &[ClusterOutcome],
) -> Result<(PowerGraph, Layout, AssemblyReport), PartitionError> {
    let mut report = AssemblyReport::default();
    let mut merged_nodes: Vec<(NodeId, crate::graph::NodeInfo)> = Vec::new();
    let mut merged_edges: Vec<(EdgeKey, u32)> = Vec::new();
    let mut layout = Layout::new();
    let mut boxes: Vec<(Point, Point)> = Vec::new();
    let mut cluster_edges: IndexSet<EdgeKey> = IndexSet::new();

    for outcome in outcomes {
        let (_, original_layout) = &plan.submodels[outcome.cluster];
        let source = &outcome.layout;
        let (scale, offset) = match (original_layout.bounding_box(), source.bounding_box()) {
            (Some((olo, ohi)), Some((slo, shi))) => {
                let (ow, oh) = (ohi.x - olo.x, ohi.y - olo.y);
                let (sw, sh) = (shi.x - slo.x, shi.y - slo.y);
                let sx = if sw > 0.0 { 1.2 * ow / sw } else { f64::INFINITY };
                let sy = if sh > 0.0 { 1.2 * oh / sh } else { f64::INFINITY };
                let mut scale = sx.min(sy);
                if !scale.is_finite() || scale <= 0.0 {
                    scale = 1.0;
                }
                let oc = original_layout.centroid().expect("non-empty");
                let sc = source.centroid().expect("non-empty");
                (scale, (oc, sc))
            }
            _ => (1.0, (Point::new(0.0, 0.0), Point::new(0.0, 0.0))),
        };
        let (oc, sc) = offset;
        let mut lo = Point::new(f64::INFINITY, f64::INFINITY);
        let mut hi = Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for (id, p) in source.iter() {
            let mut q = Point::new(oc.x + scale * (p.x - sc.x), oc.y + scale * (p.y - sc.y));
            let mut bump = 0u32;
            while layout.iter().any(|(_, r)| r == q) {
                bump += 1;
                q = Point::new(q.x + 1e-9 * f64::from(bump), q.y);
            }
            layout.set(id.clone(), q);
            lo.x = lo.x.min(q.x);
            lo.y = lo.y.min(q.y);
            hi.x = hi.x.max(q.x);
            hi.y = hi.y.max(q.y);
        }
        boxes.push((lo, hi));
        for (id, info) in outcome.graph.nodes() {
            merged_nodes.push((id.clone(), info.clone()));
        }
        for (key, mult) in outcome.graph.edges() {
            cluster_edges.insert(key.clone());
            merged_edges.push((key.clone(), mult));
        }
    }

    for (i, a) in boxes.iter().enumerate() {
        for b in boxes.iter().skip(i + 1) {
            let w = (a.1.x.min(b.1.x) - a.0.x.max(b.0.x)).max(0.0);
            let h = (a.1.y.min(b.1.y) - a.0.y.max(b.0.y)).max(0.0);
            if w > 0.0 && h > 0.0 {
                report
                    .warnings
                    .push(format!("cluster boxes overlap with area {:.3}", w * h));
            }
        }
    }

    let mut tie_set: IndexSet<EdgeKey> = IndexSet::new();
    for key in &plan.tie_lines {
        tie_set.insert(key.clone());
        merged_edges.push((key.clone(), 1));
    }
    let graph = PowerGraph::from_parts_unchecked(merged_nodes, merged_edges)?;

    let crossings = find_crossings(&graph, &layout)?;
    for (a, b, _) in &crossings.pairs {
        if tie_set.contains(a) || tie_set.contains(b) {
            report.tie_crossings += 1;
        } else {
            report.internal_crossings += 1;
        }
    }
    Ok((graph, layout, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{NodeInfo, NodeKind};
    use crate::milp::HighsBackend;

    fn nid(s: &str) -> NodeId {
        NodeId::new(s)
    }

    fn blob_graph() -> (PowerGraph, Layout) {
        // Two well-separated blobs of 4 nodes with one tie edge.
        let mut nodes = Vec::new();
        let mut layout = Layout::new();
        let blob = |cx: f64, cy: f64, prefix: &str, nodes: &mut Vec<(NodeId, NodeInfo)>, layout: &mut Layout| {
            for (i, (dx, dy)) in [(0.0, 0.0), (1.0, 0.1), (0.2, 0.9), (0.9, 1.0)].iter().enumerate() {
                let id = nid(&format!("{prefix}{i}"));
                nodes.push((
                    id.clone(),
                    NodeInfo {
                        kind: NodeKind::Real,
                        label: None,
                    },
                ));
                layout.set(id, Point::new(cx + dx, cy + dy));
            }
        };
        blob(0.0, 0.0, "a", &mut nodes, &mut layout);
        blob(20.0, 0.0, "b", &mut nodes, &mut layout);
        let edges = [
            (EdgeKey::new(nid("a0"), nid("a1")), 1),
            (EdgeKey::new(nid("a1"), nid("a3")), 1),
            (EdgeKey::new(nid("a2"), nid("a0")), 1),
            (EdgeKey::new(nid("b0"), nid("b1")), 1),
            (EdgeKey::new(nid("b1"), nid("b3")), 1),
            (EdgeKey::new(nid("b2"), nid("b3")), 1),
            (EdgeKey::new(nid("a3"), nid("b0")), 1),
        ];
        let g = PowerGraph::new(nodes, edges).unwrap();
        (g, layout)
    }

    #[test]
    fn one_cluster_has_no_tie_lines() {
        let (g, layout) = blob_graph();
        let plan = partition_kmeans(&g, &layout, 1, 42).unwrap();
        assert_eq!(plan.submodels.len(), 1);
        assert!(plan.tie_lines.is_empty());
        assert_eq!(plan.submodels[0].0.edge_count(), g.edge_count());
    }

    #[test]
    fn two_blobs_recovered_exactly() {
        let (g, layout) = blob_graph();
        let plan = partition_kmeans(&g, &layout, 2, 42).unwrap();
        let ca = plan.assignment[&nid("a0")];
        for i in 0..4 {
            assert_eq!(plan.assignment[&nid(&format!("a{i}"))], ca);
            assert_ne!(plan.assignment[&nid(&format!("b{i}"))], ca);
        }
        assert_eq!(plan.tie_lines, vec![EdgeKey::new(nid("a3"), nid("b0"))]);
    }

    #[test]
    fn singleton_clusters_make_every_edge_a_tie() {
        let (g, layout) = blob_graph();
        let plan = partition_kmeans(&g, &layout, g.node_count(), 7).unwrap();
        assert_eq!(plan.tie_lines.len(), g.edge_count());
        let sizes: Vec<usize> = plan.submodels.iter().map(|(sg, _)| sg.node_count()).collect();
        assert!(sizes.iter().all(|&s| s == 1));
    }

    #[test]
    fn assignment_is_a_partition() {
        let (g, layout) = blob_graph();
        let plan = partition_kmeans(&g, &layout, 3, 13).unwrap();
        assert_eq!(plan.assignment.len(), g.node_count());
        let total: usize = plan.submodels.iter().map(|(sg, _)| sg.node_count()).sum();
        assert_eq!(total, g.node_count());
        let sub_edges: usize = plan.submodels.iter().map(|(sg, _)| sg.edge_count()).sum();
        assert_eq!(sub_edges + plan.tie_lines.len(), g.edge_count());
    }

    #[test]
    fn worker_count_does_not_change_results() {
        let (g, layout) = blob_graph();
        let plan = partition_kmeans(&g, &layout, 2, 42).unwrap();
        let cfg = ClusterConfig {
            reduction: ReductionConfig::default(),
            planner: Some(PlannerConfig {
                min_edge_length: 1.0,
                min_separation: 0.2,
                relative_gap: 0.0,
                ..PlannerConfig::default()
            }),
        };
        let one = solve_partitions_parallel(&plan, &cfg, 1, &HighsBackend).unwrap();
        let four = solve_partitions_parallel(&plan, &cfg, 4, &HighsBackend).unwrap();
        assert_eq!(one.len(), four.len());
        for (a, b) in one.iter().zip(four.iter()) {
            assert_eq!(a.cluster, b.cluster);
            assert_eq!(a.layout, b.layout);
            assert_eq!(a.fallback, b.fallback);
        }
    }

    #[test]
    fn assembly_classifies_tie_crossings() {
        let (g, layout) = blob_graph();
        let plan = partition_kmeans(&g, &layout, 2, 42).unwrap();
        // Identity outcomes: keep each cluster's input layout.
        let outcomes: Vec<ClusterOutcome> = plan
            .submodels
            .iter()
            .enumerate()
            .map(|(c, (sg, sl))| ClusterOutcome {
                cluster: c,
                graph: sg.clone(),
                layout: sl.clone(),
                reduction: None,
                rounds: Vec::new(),
                fallback: None,
            })
            .collect();
        let (merged, final_layout, report) = assemble_layout(&plan, &outcomes).unwrap();
        assert_eq!(merged.node_count(), g.node_count());
        assert_eq!(merged.edge_count(), g.edge_count());
        assert_eq!(report.internal_crossings + report.tie_crossings, {
            find_crossings(&merged, &final_layout).unwrap().count()
        });
        // The straight tie segment exists.
        let tie = EdgeKey::new(nid("a3"), nid("b0"));
        assert!(merged.contains_edge(&tie));
    }

    #[test]
    fn assembly_preserves_orthogonality_per_cluster() {
        let (g, layout) = blob_graph();
        let plan = partition_kmeans(&g, &layout, 2, 42).unwrap();
        // Scale one cluster's layout arbitrarily; assembly must keep angles.
        let outcomes: Vec<ClusterOutcome> = plan
            .submodels
            .iter()
            .enumerate()
            .map(|(c, (sg, sl))| {
                let blown = Layout::from_iter(
                    sl.iter().map(|(id, p)| (id.clone(), Point::new(p.x * 7.0, p.y * 7.0))),
                );
                ClusterOutcome {
                    cluster: c,
                    graph: sg.clone(),
                    layout: blown,
                    reduction: None,
                    rounds: Vec::new(),
                    fallback: None,
                }
            })
            .collect();
        let (_, final_layout, _) = assemble_layout(&plan, &outcomes).unwrap();
        for (sg, sl) in &plan.submodels {
            let before = crate::metrics::compute_metrics(sg, sl, None, 0.10);
            let sub_final = Layout::from_iter(
                sl.iter()
                    .map(|(id, _)| (id.clone(), final_layout.get(id).unwrap())),
            );
            let after = crate::metrics::compute_metrics(sg, &sub_final, None, 0.10);
            if let (Ok(b), Ok(a)) = (before, after) {
                assert!((b.or - a.or).abs() < 1e-9);
            }
        }
    }
}
