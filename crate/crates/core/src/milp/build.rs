//! Translates a planarized drawing into the MILP: per-node coordinates on the
//! K axes and their quarter-turn counterparts, per-direction sector binaries
//! with windows around the input sector, alignment and length rows, cyclic
//! order blocks, optional planarity separation blocks, and the weighted
//! objective.

use std::f64::consts::PI;

use indexmap::{IndexMap, IndexSet};

use super::model::{MilpModel, Sense, VarKind};
use super::{Flexibility, MilpError, PlannerConfig};
use crate::graph::{EdgeKey, GraphError, Layout, NodeId, PowerGraph};

/// Sector index of `u` as seen from `v`, for every ordered adjacent pair.
pub type SectorMap = IndexMap<(NodeId, NodeId), u32>;

/// Sector of the direction vector `d` in a 2K-sector system: sector `j` is
/// bisected by the axis direction `j*pi/K`.
fn sector_of(d: crate::geometry::Point, k: u32) -> u32 {
    let two_k = 2 * k;
    let step = PI / f64::from(k);
    let mut angle = d.y.atan2(d.x);
    if angle < 0.0 {
        angle += 2.0 * PI;
    }
    let j = ((angle + step / 2.0) / step).floor() as i64;
    (j.rem_euclid(i64::from(two_k))) as u32
}

/// Computes the input sector for both directions of every edge. The reverse
/// direction is derived as `sigma + K (mod 2K)`, so the antipodal rule holds
/// exactly.
pub fn derive_sectors(g: &PowerGraph, layout: &Layout, k: u32) -> Result<SectorMap, MilpError> {
    let mut out = SectorMap::new();
    for key in g.sorted_edge_keys() {
        let pa = layout.position(key.a())?;
        let pb = layout.position(key.b())?;
        if pa == pb {
            return Err(MilpError::Graph(GraphError::DuplicateCoordinates(format!(
                "{} and {}",
                key.a(),
                key.b()
            ))));
        }
        let fwd = sector_of(pb - pa, k);
        out.insert((key.b().clone(), key.a().clone()), fwd);
        out.insert((key.a().clone(), key.b().clone()), (fwd + k) % (2 * k));
    }
    Ok(out)
}

/// Default planner parameters from the drawing. K comes from the tightest
/// average fan angle (at least one more than half the maximum degree); the
/// flexibility margin stays scalar 1 while the maximum degree fits
/// comfortably into the sector count.
pub fn suggest_params(g: &PowerGraph, layout: &Layout) -> Result<PlannerConfig, MilpError> {
    let mut max_ratio = 0.0f64;
    for v in g.node_ids() {
        let degree = g.degree(v);
        if degree < 2 {
            continue;
        }
        let pv = layout.position(v)?;
        let mut angles: Vec<f64> = g
            .neighbors(v)
            .map(|u| (layout.get(u).expect("layout covers graph") - pv).angle_deg())
            .collect();
        angles.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let span = angles.last().unwrap() - angles.first().unwrap();
        if span <= 0.0 {
            continue;
        }
        let avg_fan = span / degree as f64;
        max_ratio = max_ratio.max(180.0 / avg_fan);
    }
    let max_degree = g.max_degree() as u32;
    let k_floor = max_degree.div_ceil(2) + 1;
    let k = (max_ratio - 1e-9).ceil().max(2.0) as u32;
    let k = k.max(k_floor).max(2);
    let flexibility = if f64::from(max_degree) <= f64::from(2 * k) * (2.0 / 3.0) {
        Flexibility::Scalar(1)
    } else {
        Flexibility::PerNode
    };
    Ok(PlannerConfig {
        k,
        flexibility,
        ..PlannerConfig::default()
    })
}

/// Effective per-edge window radius, clamped to `K - 1` so windows never wrap
/// onto themselves.
pub(super) fn edge_slack(g: &PowerGraph, key: &EdgeKey, cfg: &PlannerConfig) -> u32 {
    let raw = match cfg.flexibility {
        Flexibility::Scalar(s) => s,
        Flexibility::PerNode => {
            let sa = (g.degree(key.a()) as u32).saturating_sub(1).div_ceil(2);
            let sb = (g.degree(key.b()) as u32).saturating_sub(1).div_ceil(2);
            sa.max(sb).max(1)
        }
    };
    raw.clamp(1, cfg.k - 1)
}

pub(super) struct ModelIndex {
    pub nodes: Vec<NodeId>,
    pub edges: Vec<EdgeKey>,
}

impl ModelIndex {
    pub fn new(g: &PowerGraph) -> Self {
        let mut nodes: Vec<NodeId> = g.node_ids().cloned().collect();
        nodes.sort();
        ModelIndex {
            nodes,
            edges: g.sorted_edge_keys(),
        }
    }

    pub fn node_pos(&self, id: &NodeId) -> usize {
        self.nodes.binary_search(id).expect("node indexed")
    }
}

/// Variable names for one directed edge: `u` relative to `v`.
fn dir_tag(edge_idx: usize, forward: bool) -> String {
    format!("e{edge_idx}{}", if forward { "f" } else { "r" })
}

/// Builds the full model for the drawing `layout` of `g` with input sectors
/// `sigma` and separation blocks for `planarity_pairs`.
pub fn build_model(
    g: &PowerGraph,
    layout: &Layout,
    sigma: &SectorMap,
    cfg: &PlannerConfig,
    planarity_pairs: &IndexSet<(EdgeKey, EdgeKey)>,
) -> Result<MilpModel, MilpError> {
    cfg.validate()?;
    let max_degree = g.max_degree() as u32;
    if 2 * cfg.k <= max_degree {
        return Err(MilpError::Config(format!(
            "K = {} cannot host a node of degree {max_degree}; need K > degree/2",
            cfg.k
        )));
    }

    let k = cfg.k;
    let two_k = 2 * k;
    let (lo, hi) = layout
        .bounding_box()
        .ok_or_else(|| MilpError::Config("empty layout".into()))?;
    let diameter = ((hi.x - lo.x).powi(2) + (hi.y - lo.y).powi(2)).sqrt().max(1.0);
    let coord_bound = 2.0 * diameter;
    let big_m_coord = 6.0 * diameter + cfg.min_edge_length + cfg.min_separation;
    let big_m_sec = f64::from(2 * two_k);

    let index = ModelIndex::new(g);
    let mut model = MilpModel::new("layout-plan");

    // Per node: x, y, z_i, zbar_i with the defining identities.
    let mut xy = Vec::with_capacity(index.nodes.len());
    let mut zs = Vec::with_capacity(index.nodes.len());
    let mut zbars = Vec::with_capacity(index.nodes.len());
    for (ni, _id) in index.nodes.iter().enumerate() {
        let x = model.add_var(format!("x_n{ni}"), VarKind::Continuous, -coord_bound, coord_bound);
        let y = model.add_var(format!("y_n{ni}"), VarKind::Continuous, -coord_bound, coord_bound);
        let mut z_row = Vec::with_capacity(k as usize);
        let mut zb_row = Vec::with_capacity(k as usize);
        for i in 0..k {
            let theta = f64::from(i) * PI / f64::from(k);
            let z = model.add_var(
                format!("z_n{ni}_{i}"),
                VarKind::Continuous,
                -coord_bound,
                coord_bound,
            );
            let zb = model.add_var(
                format!("zb_n{ni}_{i}"),
                VarKind::Continuous,
                -coord_bound,
                coord_bound,
            );
            model.add_constraint(
                format!("zdef_n{ni}_{i}"),
                vec![(z, 1.0), (x, -theta.cos()), (y, -theta.sin())],
                Sense::Eq,
                0.0,
            );
            model.add_constraint(
                format!("zbdef_n{ni}_{i}"),
                vec![(zb, 1.0), (x, theta.sin()), (y, -theta.cos())],
                Sense::Eq,
                0.0,
            );
            z_row.push(z);
            zb_row.push(zb);
        }
        xy.push((x, y));
        zs.push(z_row);
        zbars.push(zb_row);
    }

    // Per directed edge: sector binaries over the window, the sector integer,
    // alignment and length rows, orthogonality indicators.
    // sec_vars[(u, v)] = sector of u relative to v.
    let mut sec_vars: IndexMap<(NodeId, NodeId), usize> = IndexMap::new();
    let mut dir_hv: Vec<Vec<usize>> = Vec::with_capacity(index.edges.len());
    let mut diff_vars = Vec::with_capacity(index.edges.len());
    let mut len_vars = Vec::with_capacity(index.edges.len());
    let mut dev_vars = Vec::with_capacity(index.edges.len());
    let len_avg = model.add_var("len_avg", VarKind::Continuous, 0.0, 4.0 * diameter);

    for (ei, key) in index.edges.iter().enumerate() {
        let slack = edge_slack(g, key, cfg);
        let na = index.node_pos(key.a());
        let nb = index.node_pos(key.b());
        let mut hv_here = Vec::new();

        for forward in [true, false] {
            // "u relative to v": forward is b relative to a.
            let (u, v, nu, nv) = if forward {
                (key.b(), key.a(), nb, na)
            } else {
                (key.a(), key.b(), na, nb)
            };
            let tag = dir_tag(ei, forward);
            let sigma_uv = *sigma
                .get(&(u.clone(), v.clone()))
                .ok_or_else(|| MilpError::Config(format!("sector map misses ({u}, {v})")))?;

            // Window offsets around the input sector; the characteristic
            // filter simply does not declare binaries outside the window.
            let offsets: Vec<i64> = (-(slack as i64)..=(slack as i64)).collect();
            let mut in_vars = Vec::with_capacity(offsets.len());
            for &t in &offsets {
                let j = (i64::from(sigma_uv) + t).rem_euclid(i64::from(two_k)) as u32;
                let b = model.add_var(format!("in_{tag}_{j}"), VarKind::Binary, 0.0, 1.0);
                in_vars.push((t, j, b));
            }
            if in_vars.is_empty() {
                return Err(MilpError::Config(format!(
                    "empty sector window for edge {key}"
                )));
            }
            model.add_constraint(
                format!("inpick_{tag}"),
                in_vars.iter().map(|&(_, _, b)| (b, 1.0)).collect(),
                Sense::Eq,
                1.0,
            );
            let sec = model.add_var(format!("sec_{tag}"), VarKind::Integer, 0.0, f64::from(two_k - 1));
            let mut sec_def: Vec<(usize, f64)> = vec![(sec, 1.0)];
            for &(_, j, b) in &in_vars {
                sec_def.push((b, -f64::from(j)));
            }
            model.add_constraint(format!("secdef_{tag}"), sec_def, Sense::Eq, 0.0);
            sec_vars.insert((u.clone(), v.clone()), sec);

            for &(_, j, b) in &in_vars {
                let axis = (j % k) as usize;
                // Alignment: picking sector j forces equal quarter-turn
                // coordinates, i.e. the edge runs parallel to axis j mod K.
                model.add_constraint(
                    format!("alignp_{tag}_{j}"),
                    vec![(zbars[nu][axis], 1.0), (zbars[nv][axis], -1.0), (b, big_m_coord)],
                    Sense::Le,
                    big_m_coord,
                );
                model.add_constraint(
                    format!("alignn_{tag}_{j}"),
                    vec![(zbars[nv][axis], 1.0), (zbars[nu][axis], -1.0), (b, big_m_coord)],
                    Sense::Le,
                    big_m_coord,
                );
                // Minimum length along the axis, direction-aware.
                let (first, second) = if j < k { (nu, nv) } else { (nv, nu) };
                model.add_constraint(
                    format!("len_{tag}_{j}"),
                    vec![(zs[first][axis], 1.0), (zs[second][axis], -1.0), (b, -big_m_coord)],
                    Sense::Ge,
                    cfg.min_edge_length - big_m_coord,
                );
            }

            // Orthogonality indicators: hor forces sector 0, ver sector K/2.
            let hor = model.add_var(format!("hor_{tag}"), VarKind::Binary, 0.0, 1.0);
            model.add_constraint(
                format!("horp_{tag}"),
                vec![(sec, 1.0), (hor, big_m_sec)],
                Sense::Le,
                big_m_sec,
            );
            model.add_constraint(
                format!("horn_{tag}"),
                vec![(sec, -1.0), (hor, big_m_sec)],
                Sense::Le,
                big_m_sec,
            );
            hv_here.push(hor);
            if k % 2 == 0 {
                let ver = model.add_var(format!("ver_{tag}"), VarKind::Binary, 0.0, 1.0);
                let half_k = f64::from(k) / 2.0;
                model.add_constraint(
                    format!("verp_{tag}"),
                    vec![(sec, 1.0), (ver, big_m_sec)],
                    Sense::Le,
                    big_m_sec + half_k,
                );
                model.add_constraint(
                    format!("vern_{tag}"),
                    vec![(sec, -1.0), (ver, big_m_sec)],
                    Sense::Le,
                    big_m_sec - half_k,
                );
                hv_here.push(ver);
            }

            // Relative-position cost on the canonical direction, measured in
            // unwrapped window offsets so the distance is circular.
            if forward {
                let diff = model.add_var(
                    format!("diff_e{ei}"),
                    VarKind::Continuous,
                    0.0,
                    f64::from(two_k),
                );
                let mut pos_row: Vec<(usize, f64)> = vec![(diff, 1.0)];
                let mut neg_row: Vec<(usize, f64)> = vec![(diff, 1.0)];
                for &(t, _, b) in &in_vars {
                    if t != 0 {
                        pos_row.push((b, -t as f64));
                        neg_row.push((b, t as f64));
                    }
                }
                model.add_constraint(format!("diffp_e{ei}"), pos_row, Sense::Ge, 0.0);
                model.add_constraint(format!("diffn_e{ei}"), neg_row, Sense::Ge, 0.0);
                diff_vars.push(diff);
            }
        }

        // Antipodal link between the two directions, with a wrap binary
        // because the raw sum overflows the index range.
        let sec_fwd = sec_vars[&(key.b().clone(), key.a().clone())];
        let sec_rev = sec_vars[&(key.a().clone(), key.b().clone())];
        let wrap = model.add_var(format!("wrap_e{ei}"), VarKind::Binary, 0.0, 1.0);
        model.add_constraint(
            format!("link_e{ei}"),
            vec![(sec_rev, 1.0), (sec_fwd, -1.0), (wrap, f64::from(two_k))],
            Sense::Eq,
            f64::from(k),
        );

        // At most one orthogonal orientation across both directions.
        model.add_constraint(
            format!("hvcap_e{ei}"),
            hv_here.iter().map(|&b| (b, 1.0)).collect(),
            Sense::Le,
            1.0,
        );
        dir_hv.push(hv_here);

        // Edge length as the maximum axis coordinate difference, and its
        // deviation from the mean.
        let len = model.add_var(format!("len_e{ei}"), VarKind::Continuous, 0.0, 4.0 * diameter);
        for i in 0..k as usize {
            model.add_constraint(
                format!("lenp_e{ei}_{i}"),
                vec![(len, 1.0), (zs[na][i], -1.0), (zs[nb][i], 1.0)],
                Sense::Ge,
                0.0,
            );
            model.add_constraint(
                format!("lenn_e{ei}_{i}"),
                vec![(len, 1.0), (zs[na][i], 1.0), (zs[nb][i], -1.0)],
                Sense::Ge,
                0.0,
            );
        }
        let dev = model.add_var(format!("dev_e{ei}"), VarKind::Continuous, 0.0, 4.0 * diameter);
        model.add_constraint(
            format!("devp_e{ei}"),
            vec![(dev, 1.0), (len, -1.0), (len_avg, 1.0)],
            Sense::Ge,
            0.0,
        );
        model.add_constraint(
            format!("devn_e{ei}"),
            vec![(dev, 1.0), (len, 1.0), (len_avg, -1.0)],
            Sense::Ge,
            0.0,
        );
        len_vars.push(len);
        dev_vars.push(dev);
    }

    // Mean edge length.
    if !index.edges.is_empty() {
        let m = index.edges.len() as f64;
        let mut row: Vec<(usize, f64)> = vec![(len_avg, m)];
        for &len in &len_vars {
            row.push((len, -1.0));
        }
        model.add_constraint("lenavg", row, Sense::Eq, 0.0);
    }

    // Cyclic order of each node's neighbors, matching the input embedding.
    for (ni, v) in index.nodes.iter().enumerate() {
        let degree = g.degree(v);
        if degree < 2 {
            continue;
        }
        let pv = layout.position(v)?;
        let mut ring: Vec<(f64, f64, NodeId)> = g
            .neighbors(v)
            .map(|u| {
                let pu = layout.get(u).expect("layout covers graph");
                ((pu - pv).angle_deg(), pv.distance(pu), u.clone())
            })
            .collect();
        ring.sort_by(|a, b| {
            a.0.partial_cmp(&b.0)
                .unwrap()
                .then(a.1.partial_cmp(&b.1).unwrap())
                .then(a.2.cmp(&b.2))
        });
        let excs: Vec<usize> = (0..degree)
            .map(|t| model.add_var(format!("exc_n{ni}_{t}"), VarKind::Binary, 0.0, 1.0))
            .collect();
        model.add_constraint(
            format!("excpick_n{ni}"),
            excs.iter().map(|&b| (b, 1.0)).collect(),
            Sense::Eq,
            1.0,
        );
        for t in 0..degree {
            let u_here = &ring[t].2;
            let u_next = &ring[(t + 1) % degree].2;
            let sec_here = sec_vars[&(u_here.clone(), v.clone())];
            let sec_next = sec_vars[&(u_next.clone(), v.clone())];
            model.add_constraint(
                format!("cyc_n{ni}_{t}"),
                vec![(sec_here, 1.0), (sec_next, -1.0), (excs[t], -f64::from(two_k))],
                Sense::Le,
                -1.0,
            );
        }
    }

    // Staged planarity: constrained pairs must be separable along one sector
    // direction with margin, both endpoints of one edge beyond both of the
    // other's. Directions j >= K invert the differences.
    let mut sorted_pairs: Vec<(EdgeKey, EdgeKey)> = planarity_pairs.iter().cloned().collect();
    sorted_pairs.sort();
    for (pi, (ea, eb)) in sorted_pairs.iter().enumerate() {
        if ea.shares_endpoint(eb) {
            return Err(MilpError::Config(format!(
                "planarity pair ({ea}, {eb}) shares an endpoint"
            )));
        }
        let ends_a = [index.node_pos(ea.a()), index.node_pos(ea.b())];
        let ends_b = [index.node_pos(eb.a()), index.node_pos(eb.b())];
        let seps: Vec<(u32, usize)> = (0..two_k)
            .map(|j| (j, model.add_var(format!("sep_p{pi}_{j}"), VarKind::Binary, 0.0, 1.0)))
            .collect();
        model.add_constraint(
            format!("sepcover_p{pi}"),
            seps.iter().map(|&(_, b)| (b, 1.0)).collect(),
            Sense::Ge,
            1.0,
        );
        for &(j, b) in &seps {
            let axis = (j % k) as usize;
            let sign = if j < k { 1.0 } else { -1.0 };
            for (bi, &nb_) in ends_b.iter().enumerate() {
                for (ai, &na_) in ends_a.iter().enumerate() {
                    model.add_constraint(
                        format!("sep_p{pi}_{j}_{bi}{ai}"),
                        vec![(zs[nb_][axis], sign), (zs[na_][axis], -sign), (b, -big_m_coord)],
                        Sense::Ge,
                        cfg.min_separation - big_m_coord,
                    );
                }
            }
        }
    }

    // Objective: weighted relative-position, orthogonality, and evenness.
    let w = &cfg.weights;
    for &diff in &diff_vars {
        model.add_objective_term(diff, w.rp);
    }
    for hv in &dir_hv {
        for &b in hv {
            model.add_objective_term(b, -w.or);
        }
    }
    model.objective_constant = w.or * index.edges.len() as f64;
    if !index.edges.is_empty() {
        let inv_m = 1.0 / index.edges.len() as f64;
        for &len in &len_vars {
            model.add_objective_term(len, w.ev * inv_m);
        }
        for &dev in &dev_vars {
            model.add_objective_term(dev, w.ev * inv_m);
        }
    }

    model.validate()?;
    Ok(model)
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::geometry::Point;
    use crate::graph::{NodeInfo, NodeKind};

    fn nid(s: &str) -> NodeId {
        NodeId::new(s)
    }

    pub(crate) fn square() -> (PowerGraph, Layout) {
        let nodes = ["a", "b", "c", "d"].map(|s| {
            (
                nid(s),
                NodeInfo {
                    kind: NodeKind::Real,
                    label: None,
                },
            )
        });
        let edges = [
            (EdgeKey::new(nid("a"), nid("b")), 1),
            (EdgeKey::new(nid("b"), nid("c")), 1),
            (EdgeKey::new(nid("c"), nid("d")), 1),
            (EdgeKey::new(nid("d"), nid("a")), 1),
        ];
        let g = PowerGraph::new(nodes, edges).unwrap();
        let mut layout = Layout::new();
        layout.set(nid("a"), Point::new(0.0, 0.0));
        layout.set(nid("b"), Point::new(1.0, 0.0));
        layout.set(nid("c"), Point::new(1.0, 1.0));
        layout.set(nid("d"), Point::new(0.0, 1.0));
        (g, layout)
    }

    #[test]
    fn sector_arithmetic_matches_bisected_axes() {
        // K=4: sector width 45 deg, sector 0 bisected by the positive x axis.
        assert_eq!(sector_of(Point::new(1.0, 0.0), 4), 0);
        assert_eq!(sector_of(Point::new(1.0, 0.96), 4), 1); // ~44 degrees
        assert_eq!(sector_of(Point::new(0.0, 1.0), 4), 2);
        assert_eq!(sector_of(Point::new(-1.0, 0.0), 4), 4);
        assert_eq!(sector_of(Point::new(0.5, -0.5), 4), 7);
    }

    #[test]
    fn antipodal_rule_holds_for_random_pairs() {
        use rand::prelude::*;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
        for _ in 0..500 {
            let d = Point::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
            if d.norm() < 1e-9 {
                continue;
            }
            for k in [2u32, 3, 4, 6, 8] {
                let fwd = sector_of(d, k);
                let rev = sector_of(Point::new(-d.x, -d.y), k);
                // Derivation in `derive_sectors` forces this; the raw atan2
                // computation may disagree only on exact sector boundaries.
                let expected = (fwd + k) % (2 * k);
                if rev != expected {
                    let boundary = ((d.angle_deg() / (180.0 / f64::from(k))).fract()).abs();
                    assert!(boundary < 1e-9 || boundary > 1.0 - 1e-9);
                }
            }
        }
    }

    #[test]
    fn derived_sectors_are_antipodal_by_construction() {
        let (g, layout) = square();
        let sigma = derive_sectors(&g, &layout, 4).unwrap();
        for key in g.sorted_edge_keys() {
            let fwd = sigma[&(key.b().clone(), key.a().clone())];
            let rev = sigma[&(key.a().clone(), key.b().clone())];
            assert_eq!(rev, (fwd + 4) % 8);
        }
    }

    #[test]
    fn star_of_degree_seven_suggests_per_node_slack() {
        let mut nodes = vec![(
            nid("hub"),
            NodeInfo {
                kind: NodeKind::Real,
                label: None,
            },
        )];
        let mut edges = Vec::new();
        let mut layout = Layout::new();
        layout.set(nid("hub"), Point::new(0.0, 0.0));
        for i in 0..7 {
            let id = nid(&format!("s{i}"));
            nodes.push((
                id.clone(),
                NodeInfo {
                    kind: NodeKind::Real,
                    label: None,
                },
            ));
            let ang = f64::from(i) * std::f64::consts::TAU / 7.0;
            layout.set(id.clone(), Point::new(ang.cos(), ang.sin()));
            edges.push((EdgeKey::new(nid("hub"), id), 1));
        }
        let g = PowerGraph::new(nodes, edges).unwrap();
        let cfg = suggest_params(&g, &layout).unwrap();
        assert_eq!(cfg.flexibility, Flexibility::PerNode);
        // ceil((7-1)/2) = 3 on the hub's edges.
        let key = EdgeKey::new(nid("hub"), nid("s0"));
        assert_eq!(edge_slack(&g, &key, &cfg), 3);
    }

    #[test]
    fn bus30_fixture_suggests_table_defaults() {
        let raw = std::fs::read_to_string(concat!(
            env!("CARGO_MANIFEST_DIR"),
            "/fixtures/bus30.json"
        ))
        .unwrap();
        let (g, layout) = crate::io::load_graph_str(&raw).unwrap();
        let cfg = suggest_params(&g, &layout).unwrap();
        assert_eq!(cfg.k, 4);
        assert_eq!(cfg.flexibility, Flexibility::Scalar(1));
    }

    #[test]
    fn four_cycle_model_block_counts() {
        let (g, layout) = square();
        let cfg = PlannerConfig::default();
        let sigma = derive_sectors(&g, &layout, cfg.k).unwrap();
        let model = build_model(&g, &layout, &sigma, &cfg, &IndexSet::new()).unwrap();
        let stats = model.stats();
        let (n, m, k, s) = (4usize, 4usize, 4usize, 1usize);
        // Continuous: per node x, y, K z, K zbar; per edge diff, len, dev;
        // plus the mean length.
        let continuous = n * (2 + 2 * k) + 3 * m + 1;
        // Binaries: per direction window (2s+1) + hor + ver; per edge wrap;
        // per node degree exc (every node here has degree 2).
        let binaries = 2 * m * ((2 * s + 1) + 2) + m + n * 2;
        // Integers: one sector per direction.
        let integers = 2 * m;
        assert_eq!(stats.binaries, binaries);
        assert_eq!(stats.integers, integers);
        assert_eq!(stats.variables, continuous + binaries + integers);
        // Rows: 2K identities per node; per direction pick + secdef +
        // window*(2 align + 1 len) + 2 hor + 2 ver; per edge link + cap +
        // 2K len + 2 dev + 2 diff; lenavg; per node pick + degree cyclic rows.
        let rows = n * 2 * k
            + 2 * m * (2 + (2 * s + 1) * 3 + 4)
            + m * (1 + 1 + 2 * k + 2 + 2)
            + 1
            + n * (1 + 2);
        assert_eq!(stats.constraints, rows);
    }

    #[test]
    fn planarity_pair_adds_expected_block() {
        let (g, layout) = square();
        let cfg = PlannerConfig::default();
        let sigma = derive_sectors(&g, &layout, cfg.k).unwrap();
        let base = build_model(&g, &layout, &sigma, &cfg, &IndexSet::new()).unwrap();
        let mut pairs = IndexSet::new();
        pairs.insert((
            EdgeKey::new(nid("a"), nid("b")),
            EdgeKey::new(nid("c"), nid("d")),
        ));
        let with = build_model(&g, &layout, &sigma, &cfg, &pairs).unwrap();
        let db = with.stats().binaries - base.stats().binaries;
        let dr = with.stats().constraints - base.stats().constraints;
        assert_eq!(db, 8); // 2K separation binaries
        assert_eq!(dr, 1 + 32); // coverage + 4 * 2K separation rows
    }

    #[test]
    fn adjacent_planarity_pair_rejected() {
        let (g, layout) = square();
        let cfg = PlannerConfig::default();
        let sigma = derive_sectors(&g, &layout, cfg.k).unwrap();
        let mut pairs = IndexSet::new();
        pairs.insert((
            EdgeKey::new(nid("a"), nid("b")),
            EdgeKey::new(nid("b"), nid("c")),
        ));
        assert!(build_model(&g, &layout, &sigma, &cfg, &pairs).is_err());
    }

    #[test]
    fn big_m_rows_slack_satisfiable_at_bound_extremes() {
        // With an indicator at zero, every big-M row must hold even when the
        // coordinate terms sit at their box extremes.
        let (g, layout) = square();
        let cfg = PlannerConfig::default();
        let sigma = derive_sectors(&g, &layout, cfg.k).unwrap();
        let model = build_model(&g, &layout, &sigma, &cfg, &IndexSet::new()).unwrap();
        for c in model.constraints() {
            let is_big_m = c.name.starts_with("align")
                || c.name.starts_with("len_e") && c.name.matches('_').count() == 2
                || c.name.starts_with("sep_");
            if !is_big_m {
                continue;
            }
            // Worst-case lhs with the binary term dropped (indicator 0).
            let mut worst = 0.0;
            for &(v, coef) in &c.terms {
                let def = &model.vars()[v];
                if def.kind == VarKind::Binary {
                    continue;
                }
                worst += if coef >= 0.0 {
                    match c.sense {
                        Sense::Le => coef * def.upper,
                        _ => coef * def.lower,
                    }
                } else {
                    match c.sense {
                        Sense::Le => coef * def.lower,
                        _ => coef * def.upper,
                    }
                };
            }
            let ok = match c.sense {
                Sense::Le => worst <= c.rhs + 1e-9,
                Sense::Ge => worst >= c.rhs - 1e-9,
                Sense::Eq => unreachable!("big-M rows are inequalities"),
            };
            assert!(ok, "big-M row {} not slack-satisfiable ({worst} vs {})", c.name, c.rhs);
        }
    }
}
