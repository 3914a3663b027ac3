//! Spring-embedder baseline layout for metric comparisons. Deterministic for
//! a given seed; not part of the optimization pipeline.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::geometry::Point;
use crate::graph::{Layout, NodeId, PowerGraph};
use crate::metrics::MetricsError;

/// Classic attractive/repulsive scheme: repulsion `k^2/d` between all node
/// pairs, attraction `d^2/k` along edges, displacement capped by a linearly
/// cooling temperature.
pub fn force_directed_baseline(
    g: &PowerGraph,
    seed: u64,
    iterations: usize,
) -> Result<Layout, MetricsError> {
    if iterations == 0 {
        return Err(MetricsError::InvalidIterations);
    }
    let mut ids: Vec<NodeId> = g.node_ids().cloned().collect();
    ids.sort();
    let n = ids.len();
    if n == 0 {
        return Ok(Layout::new());
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pos: Vec<Point> = (0..n)
        .map(|_| Point::new(rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0)))
        .collect();

    let index: std::collections::HashMap<&NodeId, usize> =
        ids.iter().enumerate().map(|(i, id)| (id, i)).collect();
    let edges: Vec<(usize, usize)> = g
        .sorted_edge_keys()
        .into_iter()
        .map(|k| (index[k.a()], index[k.b()]))
        .collect();

    let k = (1.0 / n as f64).sqrt();
    let t0 = 0.1;
    for step in 0..iterations {
        let t = t0 * (1.0 - step as f64 / iterations as f64) + 1e-4;
        let mut disp = vec![Point::new(0.0, 0.0); n];
        for i in 0..n {
            for j in (i + 1)..n {
                let mut d = pos[i] - pos[j];
                let mut dist = d.norm();
                if dist < 1e-12 {
                    // Coincident nodes repel along a deterministic direction.
                    d = Point::new(1e-6 * (i as f64 + 1.0), 1e-6 * (j as f64 + 1.0));
                    dist = d.norm();
                }
                let f = k * k / dist;
                let push = Point::new(d.x / dist * f, d.y / dist * f);
                disp[i] = disp[i] + push;
                disp[j] = disp[j] - push;
            }
        }
        for &(a, b) in &edges {
            let d = pos[a] - pos[b];
            let dist = d.norm().max(1e-12);
            let f = dist * dist / k;
            let pull = Point::new(d.x / dist * f, d.y / dist * f);
            disp[a] = disp[a] - pull;
            disp[b] = disp[b] + pull;
        }
        for i in 0..n {
            let len = disp[i].norm();
            if len > 0.0 {
                let capped = len.min(t);
                pos[i] = pos[i] + Point::new(disp[i].x / len * capped, disp[i].y / len * capped);
            }
        }
    }

    // Exact duplicates would violate the layout contract; nudge apart.
    let mut layout = Layout::new();
    for (i, id) in ids.iter().enumerate() {
        let mut p = pos[i];
        let mut bump = 0;
        while layout.iter().any(|(_, q)| q == p) {
            bump += 1;
            p = Point::new(pos[i].x + 1e-9 * f64::from(bump), pos[i].y);
        }
        layout.set(id.clone(), p);
    }
    Ok(layout)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{EdgeKey, NodeInfo, NodeKind};

    fn graph(ids: &[&str], edges: &[(&str, &str)]) -> PowerGraph {
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
        PowerGraph::new(nodes, edges).unwrap()
    }

    #[test]
    fn deterministic_for_seed() {
        let g = graph(&["a", "b", "c"], &[("a", "b"), ("b", "c")]);
        let l1 = force_directed_baseline(&g, 42, 100).unwrap();
        let l2 = force_directed_baseline(&g, 42, 100).unwrap();
        assert_eq!(l1, l2);
        let l3 = force_directed_baseline(&g, 43, 100).unwrap();
        assert_ne!(l1, l3);
    }

    #[test]
    fn zero_iterations_rejected() {
        let g = graph(&["a", "b"], &[("a", "b")]);
        assert!(matches!(
            force_directed_baseline(&g, 1, 0),
            Err(MetricsError::InvalidIterations)
        ));
    }

    #[test]
    fn path_of_three_has_balanced_edge_lengths() {
        let g = graph(&["a", "b", "c"], &[("a", "b"), ("b", "c")]);
        let layout = force_directed_baseline(&g, 42, 500).unwrap();
        let l1 = layout
            .get(&NodeId::new("a"))
            .unwrap()
            .distance(layout.get(&NodeId::new("b")).unwrap());
        let l2 = layout
            .get(&NodeId::new("b"))
            .unwrap()
            .distance(layout.get(&NodeId::new("c")).unwrap());
        let ratio = l1.max(l2) / l1.min(l2);
        assert!(ratio < 2.0, "edge length ratio {ratio}");
    }

    #[test]
    fn k5_layout_is_finite_without_coincidences() {
        let ids = ["a", "b", "c", "d", "e"];
        let mut edges = Vec::new();
        for i in 0..5 {
            for j in (i + 1)..5 {
                edges.push((ids[i], ids[j]));
            }
        }
        let g = graph(&ids, &edges);
        let layout = force_directed_baseline(&g, 7, 300).unwrap();
        layout.validate_for(&g).unwrap();
    }
}
