//! The seven aesthetic scores for a (graph, layout) pair: crossing count,
//! edge-length uniformity, node spacing, angular resolution, relative
//! position to a reference layout, orthogonality, and spatial evenness.
//!
//! Angles are handled in degrees throughout; comparisons use a 1e-9
//! tolerance at boundaries. Parallel lines are merged upstream, so every
//! abstract edge counts once.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{self, GeometryError};
use crate::graph::{count_layout_crossings, GraphError, Layout, PowerGraph};

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("metrics are undefined for graphs with fewer than 2 nodes (got {0})")]
    UndefinedMetrics(usize),
    #[error("iteration count must be positive")]
    InvalidIterations,
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Scores serialized with keys `ex, el, nd, ia, rp, or, ev`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    /// Negated crossing count.
    pub ex: i64,
    /// min/avg of edge lengths.
    pub el: f64,
    /// min/avg of nearest-graph-neighbor distances.
    pub nd: f64,
    /// min/avg of relative angular resolutions.
    pub ia: f64,
    /// 1 - avg edge-direction change vs the reference, / 180 deg.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub rp: Option<f64>,
    /// 1 - avg edge deviation factor.
    pub or: f64,
    /// Negated variance of min-max normalized M-nearest-neighbor distances.
    pub ev: f64,
}

impl MetricsReport {
    /// Fixed-width table in `ex, el, nd, ia, rp, or, ev` order.
    pub fn table(&self) -> String {
        let rp = self
            .rp
            .map_or_else(|| "    --".to_string(), |v| format!("{v:6.3}"));
        format!(
            "{:<6}{:>8}\n{:<6}{:>8.3}\n{:<6}{:>8.3}\n{:<6}{:>8.3}\n{:<6}{:>8}\n{:<6}{:>8.3}\n{:<6}{:>8.3}\n",
            "ex", self.ex, "el", self.el, "nd", self.nd, "ia", self.ia, "rp", rp, "or", self.or,
            "ev", self.ev
        )
    }
}

fn min_over_avg(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 1.0;
    }
    let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let avg = values.iter().sum::<f64>() / values.len() as f64;
    if avg == 0.0 {
        1.0
    } else {
        min / avg
    }
}

/// Angle of the vector in degrees normalized to `[0, 360)`.
fn direction_deg(d: crate::geometry::Point) -> f64 {
    d.angle_deg()
}

/// Computes the full report. `reference` enables the relative-position score
/// (edges with an endpoint missing from the reference are skipped there).
/// `m_fraction` sets the neighbor count for the evenness score as a fraction
/// of the node count (0.10 by default), clamped to `[1, |V|-1]`.
pub fn compute_metrics(
    g: &PowerGraph,
    layout: &Layout,
    reference: Option<&Layout>,
    m_fraction: f64,
) -> Result<MetricsReport, MetricsError> {
    let n = g.node_count();
    if n < 2 {
        return Err(MetricsError::UndefinedMetrics(n));
    }

    let ex = -(count_layout_crossings(g, layout)? as i64);

    let mut lengths = Vec::with_capacity(g.edge_count());
    for (key, _) in g.edges() {
        lengths.push(layout.segment(key)?.length());
    }
    let el = min_over_avg(&lengths);

    let mut nearest = Vec::new();
    for v in g.node_ids() {
        let pv = layout.position(v)?;
        let mut best = f64::INFINITY;
        for u in g.neighbors(v) {
            best = best.min(pv.distance(layout.position(u)?));
        }
        if best.is_finite() {
            nearest.push(best);
        }
    }
    let nd = min_over_avg(&nearest);

    let mut resolutions = Vec::new();
    for v in g.node_ids() {
        let degree = g.degree(v);
        if degree == 0 {
            continue;
        }
        let pv = layout.position(v)?;
        let mut angles: Vec<f64> = g
            .neighbors(v)
            .map(|u| direction_deg(layout.get(u).expect("layout covers graph") - pv))
            .collect();
        angles.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut min_gap = f64::INFINITY;
        for i in 0..angles.len() {
            let next = if i + 1 == angles.len() {
                angles[0] + 360.0
            } else {
                angles[i + 1]
            };
            min_gap = min_gap.min(next - angles[i]);
        }
        let ideal = 360.0 / degree as f64;
        resolutions.push(min_gap / ideal);
    }
    let ia = min_over_avg(&resolutions);

    let rp = match reference {
        None => None,
        Some(reference) => {
            let mut changes = Vec::new();
            for (key, _) in g.edges() {
                let (Some(a0), Some(b0)) = (reference.get(key.a()), reference.get(key.b())) else {
                    continue;
                };
                let a1 = layout.position(key.a())?;
                let b1 = layout.position(key.b())?;
                let v0 = b0 - a0;
                let v1 = b1 - a1;
                if (v0.x == 0.0 && v0.y == 0.0) || (v1.x == 0.0 && v1.y == 0.0) {
                    continue;
                }
                let cross = (v0.x * v1.y - v0.y * v1.x).abs();
                let dot = v0.x * v1.x + v0.y * v1.y;
                changes.push(cross.atan2(dot).to_degrees());
            }
            if changes.is_empty() {
                Some(1.0)
            } else {
                Some(1.0 - changes.iter().sum::<f64>() / changes.len() as f64 / 180.0)
            }
        }
    };

    let mut deviations = Vec::with_capacity(g.edge_count());
    for (key, _) in g.edges() {
        let seg = layout.segment(key)?;
        let theta = {
            let mut t = (seg.q - seg.p).angle_deg();
            if t >= 180.0 {
                t -= 180.0;
            }
            t
        };
        let dev = theta.min((90.0 - theta).abs()).min(180.0 - theta) / 45.0;
        deviations.push(dev);
    }
    let or = if deviations.is_empty() {
        1.0
    } else {
        1.0 - deviations.iter().sum::<f64>() / deviations.len() as f64
    };

    let m = ((m_fraction * n as f64).ceil() as usize).clamp(1, n - 1);
    let points: Vec<geometry::Point> = g
        .node_ids()
        .map(|id| layout.get(id).expect("layout covers graph"))
        .collect();
    let mut pooled = Vec::with_capacity(n * m);
    for (i, p) in points.iter().enumerate() {
        let mut dists: Vec<f64> = points
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(_, q)| p.distance(*q))
            .collect();
        dists.sort_by(|a, b| a.partial_cmp(b).unwrap());
        pooled.extend_from_slice(&dists[..m]);
    }
    let lo = pooled.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = pooled.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let ev = if hi - lo == 0.0 {
        0.0
    } else {
        let normalized: Vec<f64> = pooled.iter().map(|d| (d - lo) / (hi - lo)).collect();
        let mean = normalized.iter().sum::<f64>() / normalized.len() as f64;
        let var = normalized.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>()
            / normalized.len() as f64;
        -var
    };

    Ok(MetricsReport {
        ex,
        el,
        nd,
        ia,
        rp,
        or,
        ev,
    })
}

/// Crossing count over raw segments; zero-length segments are rejected.
pub fn count_crossings(
    segments: &[crate::geometry::Segment],
) -> Result<usize, GeometryError> {
    geometry::count_crossings(segments)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point;
    use crate::graph::{EdgeKey, NodeId, NodeInfo, NodeKind};

    fn build(ids: &[&str], coords: &[(f64, f64)], edges: &[(&str, &str)]) -> (PowerGraph, Layout) {
        let nodes = ids.iter().map(|s| {
            (
                NodeId::new(s),
                NodeInfo {
                    kind: NodeKind::Real,
                    label: None,
                },
            )
        });
        let edges = edges
            .iter()
            .map(|(a, b)| (EdgeKey::new(NodeId::new(a), NodeId::new(b)), 1));
        let g = PowerGraph::new(nodes, edges).unwrap();
        let layout = Layout::from_iter(
            ids.iter()
                .zip(coords)
                .map(|(s, (x, y))| (NodeId::new(s), Point::new(*x, *y))),
        );
        (g, layout)
    }

    fn unit_square() -> (PowerGraph, Layout) {
        build(
            &["a", "b", "c", "d"],
            &[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)],
            &[("a", "b"), ("b", "c"), ("c", "d"), ("d", "a")],
        )
    }

    #[test]
    fn identical_reference_gives_rp_one() {
        let (g, layout) = unit_square();
        let report = compute_metrics(&g, &layout, Some(&layout), 0.10).unwrap();
        assert!((report.rp.unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn unit_square_scores() {
        let (g, layout) = unit_square();
        let report = compute_metrics(&g, &layout, None, 0.10).unwrap();
        assert!((report.or - 1.0).abs() < 1e-9);
        assert!((report.el - 1.0).abs() < 1e-9);
        assert!((report.ia - 1.0).abs() < 1e-9);
        assert_eq!(report.ex, 0);
        assert!(report.rp.is_none());
    }

    #[test]
    fn ex_matches_negated_crossing_count() {
        let (g, layout) = build(
            &["a", "b", "c", "d"],
            &[(0.0, 0.0), (2.0, 2.0), (0.0, 2.0), (2.0, 0.0)],
            &[("a", "b"), ("c", "d")],
        );
        let report = compute_metrics(&g, &layout, None, 0.10).unwrap();
        assert_eq!(report.ex, -1);
        assert_eq!(
            report.ex,
            -(count_layout_crossings(&g, &layout).unwrap() as i64)
        );
    }

    #[test]
    fn single_node_is_undefined() {
        let (g, layout) = build(&["a"], &[(0.0, 0.0)], &[]);
        assert!(matches!(
            compute_metrics(&g, &layout, None, 0.10),
            Err(MetricsError::UndefinedMetrics(1))
        ));
    }

    #[test]
    fn isolated_node_skipped_in_nd_and_ia() {
        let (g, layout) = build(
            &["a", "b", "z"],
            &[(0.0, 0.0), (1.0, 0.0), (5.0, 5.0)],
            &[("a", "b")],
        );
        let report = compute_metrics(&g, &layout, None, 0.10).unwrap();
        assert!((report.nd - 1.0).abs() < 1e-9);
        assert!(report.ia > 0.0);
    }

    #[test]
    fn rp_invariant_under_translation_and_scale() {
        let (g, layout) = unit_square();
        let moved = Layout::from_iter(
            layout
                .iter()
                .map(|(id, p)| (id.clone(), Point::new(p.x * 3.0 + 7.0, p.y * 3.0 - 2.0))),
        );
        let report = compute_metrics(&g, &moved, Some(&layout), 0.10).unwrap();
        assert!((report.rp.unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn or_invariant_under_quarter_turn() {
        let (g, layout) = build(
            &["a", "b", "c"],
            &[(0.0, 0.0), (3.0, 1.0), (1.0, 2.0)],
            &[("a", "b"), ("b", "c"), ("c", "a")],
        );
        let rotated = Layout::from_iter(
            layout
                .iter()
                .map(|(id, p)| (id.clone(), Point::new(-p.y, p.x))),
        );
        let a = compute_metrics(&g, &layout, None, 0.10).unwrap();
        let b = compute_metrics(&g, &rotated, None, 0.10).unwrap();
        assert!((a.or - b.or).abs() < 1e-9);
    }

    #[test]
    fn pure_function_repeats_bit_for_bit() {
        let (g, layout) = unit_square();
        let a = compute_metrics(&g, &layout, Some(&layout), 0.10).unwrap();
        let b = compute_metrics(&g, &layout, Some(&layout), 0.10).unwrap();
        assert_eq!(a, b);
    }
}
