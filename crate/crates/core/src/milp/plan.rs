//! The staged planning loop: solve without planarity rows, detect crossings
//! in the extracted layout, add separation blocks for exactly the offending
//! pairs, and repeat until a round comes out crossing-free.

use std::f64::consts::PI;

use indexmap::IndexSet;
use serde::Serialize;

use super::build::{build_model, derive_sectors, SectorMap};
use super::model::MilpModel;
use super::solve::{solve, SolveOptions, SolveOutcome, SolverBackend};
use super::{MilpError, PlannerConfig};
use crate::geometry::Point;
use crate::graph::{find_crossings, EdgeKey, Layout, NodeId, PowerGraph};

#[derive(Clone, Debug, Serialize)]
pub struct RoundLog {
    pub round: usize,
    pub vars: usize,
    pub rows: usize,
    pub objective: Option<f64>,
    pub gap: Option<f64>,
    pub new_pairs: usize,
    pub crossings: usize,
}

/// Reads node coordinates out of a solved assignment. Exact coordinate
/// duplicates (possible when disconnected pieces land on the same optimum)
/// are nudged apart deterministically.
pub fn extract_layout(model: &MilpModel, assignment: &[f64], g: &PowerGraph) -> Layout {
    let mut ids: Vec<NodeId> = g.node_ids().cloned().collect();
    ids.sort();
    let mut layout = Layout::new();
    for (ni, id) in ids.iter().enumerate() {
        let x = model
            .var_id(&format!("x_n{ni}"))
            .map(|v| assignment[v])
            .unwrap_or(0.0);
        let y = model
            .var_id(&format!("y_n{ni}"))
            .map(|v| assignment[v])
            .unwrap_or(0.0);
        let mut p = Point::new(x, y);
        let mut bump = 0u32;
        while layout.iter().any(|(_, q)| q == p) {
            bump += 1;
            p = Point::new(x + 1e-9 * f64::from(bump), y);
        }
        layout.set(id.clone(), p);
    }
    layout
}

/// Solves rounds of the planning model, adding separation constraints for
/// every edge pair found intersecting in the previous round's layout, until a
/// round is crossing-free or the round budget runs out. Returns the last
/// extracted layout and the per-round log.
pub fn iterative_plan(
    g: &PowerGraph,
    layout: &Layout,
    cfg: &PlannerConfig,
    backend: &dyn SolverBackend,
) -> Result<(Layout, Vec<RoundLog>), MilpError> {
    cfg.validate()?;
    let sigma = derive_sectors(g, layout, cfg.k)?;
    let opts = SolveOptions {
        relative_gap: cfg.relative_gap,
        time_limit: cfg.time_limit,
        threads: 1,
    };
    let mut pairs: IndexSet<(EdgeKey, EdgeKey)> = IndexSet::new();
    let mut logs: Vec<RoundLog> = Vec::new();
    let mut last: Option<Layout> = None;

    for round in 1..=cfg.max_rounds {
        let model = build_model(g, layout, &sigma, cfg, &pairs)
            .map_err(|e| wrap_round(round, e))?;
        let stats = model.stats();
        let outcome = solve(&model, backend, &opts).map_err(|e| wrap_round(round, e))?;
        let solution = match outcome {
            SolveOutcome::Solved(s) => s,
            SolveOutcome::Timeout { incumbent: Some(s) } => {
                log::warn!("round {round}: time limit hit; using incumbent");
                s
            }
            SolveOutcome::Timeout { incumbent: None } => {
                return Err(wrap_round(round, MilpError::Timeout));
            }
            SolveOutcome::Infeasible { hint } => {
                let hint = Some(format!(
                    "{} vars, {} rows, {} planarity pairs{}",
                    stats.variables,
                    stats.constraints,
                    pairs.len(),
                    hint.map(|h| format!("; {h}")).unwrap_or_default()
                ));
                return Err(wrap_round(round, MilpError::Infeasible { hint }));
            }
        };

        let extracted = extract_layout(&model, &solution.values, g);
        let crossings = find_crossings(g, &extracted).map_err(MilpError::Graph)?;
        let mut fresh = 0usize;
        for (a, b, _) in &crossings.pairs {
            let pair = if a <= b {
                (a.clone(), b.clone())
            } else {
                (b.clone(), a.clone())
            };
            if pairs.insert(pair) {
                fresh += 1;
            }
        }
        logs.push(RoundLog {
            round,
            vars: stats.variables,
            rows: stats.constraints,
            objective: Some(solution.objective),
            gap: solution.gap,
            new_pairs: fresh,
            crossings: crossings.count(),
        });
        let done = crossings.is_empty();
        last = Some(extracted);
        if done {
            break;
        }
        if fresh == 0 {
            return Err(wrap_round(
                round,
                MilpError::InvalidModel(
                    "layout still crosses but every offending pair is already constrained".into(),
                ),
            ));
        }
    }
    Ok((last.expect("at least one round ran"), logs))
}

fn wrap_round(round: usize, source: MilpError) -> MilpError {
    MilpError::Round {
        round,
        source: Box::new(source),
    }
}

/// Geometric audit of an extracted layout against the planning contract.
#[derive(Clone, Debug, Default, Serialize)]
pub struct LayoutAudit {
    pub axis_violations: Vec<String>,
    pub length_violations: Vec<String>,
    pub window_violations: Vec<String>,
    pub order_violations: Vec<String>,
}

impl LayoutAudit {
    pub fn is_clean(&self) -> bool {
        self.axis_violations.is_empty()
            && self.length_violations.is_empty()
            && self.window_violations.is_empty()
            && self.order_violations.is_empty()
    }
}

/// Recomputed output sector of `u` relative to `v`. Output edges sit on
/// sector bisectors, so the floor arithmetic is far from any boundary.
fn output_sector(from: Point, to: Point, k: u32) -> u32 {
    let step = PI / f64::from(k);
    let mut angle = (to.y - from.y).atan2(to.x - from.x);
    if angle < 0.0 {
        angle += 2.0 * PI;
    }
    let j = ((angle + step / 2.0) / step).floor() as i64;
    (j.rem_euclid(i64::from(2 * k))) as u32
}

/// Checks axis parallelism (1e-6 rad), minimum edge length, sector-window
/// membership against the input sectors, and per-node cyclic order
/// preservation.
pub fn audit_layout(
    g: &PowerGraph,
    input: &Layout,
    output: &Layout,
    sigma: &SectorMap,
    cfg: &PlannerConfig,
) -> Result<LayoutAudit, MilpError> {
    let mut audit = LayoutAudit::default();
    let k = cfg.k;
    let step = PI / f64::from(k);
    for key in g.sorted_edge_keys() {
        let pa = output.position(key.a())?;
        let pb = output.position(key.b())?;
        let d = pb - pa;
        let angle = d.y.atan2(d.x);
        let remainder = (angle % step + step) % step;
        let off_axis = remainder.min(step - remainder);
        if off_axis > 1e-6 {
            audit
                .axis_violations
                .push(format!("{key}: {off_axis:.2e} rad off the nearest axis"));
        }
        let len = d.norm();
        if len < cfg.min_edge_length - 1e-6 {
            audit
                .length_violations
                .push(format!("{key}: length {len} below {}", cfg.min_edge_length));
        }
        let slack = super::build::edge_slack(g, &key, cfg);
        let sec = output_sector(pa, pb, k);
        let sig = sigma[&(key.b().clone(), key.a().clone())];
        let circ = {
            let raw = (i64::from(sec) - i64::from(sig)).rem_euclid(i64::from(2 * k));
            raw.min(i64::from(2 * k) - raw)
        };
        if circ > i64::from(slack) {
            audit.window_violations.push(format!(
                "{key}: output sector {sec} is {circ} sectors from input {sig} (slack {slack})"
            ));
        }
    }
    for v in g.node_ids() {
        if g.degree(v) < 2 {
            continue;
        }
        let pv_in = input.position(v)?;
        let pv_out = output.position(v)?;
        let mut ring: Vec<(f64, f64, NodeId)> = g
            .neighbors(v)
            .map(|u| {
                let pu = input.get(u).expect("layout covers graph");
                ((pu - pv_in).angle_deg(), pv_in.distance(pu), u.clone())
            })
            .collect();
        ring.sort_by(|a, b| {
            a.0.partial_cmp(&b.0)
                .unwrap()
                .then(a.1.partial_cmp(&b.1).unwrap())
                .then(a.2.cmp(&b.2))
        });
        let secs: Vec<u32> = ring
            .iter()
            .map(|(_, _, u)| output_sector(pv_out, output.get(u).expect("covered"), k))
            .collect();
        let mut wraps = 0;
        for t in 0..secs.len() {
            let here = secs[t];
            let next = secs[(t + 1) % secs.len()];
            if next <= here {
                wraps += 1;
            }
        }
        if wraps != 1 {
            audit.order_violations.push(format!(
                "{v}: output sectors {secs:?} do not preserve the input cyclic order"
            ));
        }
    }
    Ok(audit)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::milp::HighsBackend;

    #[test]
    fn four_cycle_solves_to_axis_aligned_rectangle() {
        let (g, layout) = crate::milp::build::tests::square();
        let cfg = PlannerConfig {
            min_edge_length: 2.0,
            relative_gap: 0.0,
            ..PlannerConfig::default()
        };
        let (out, logs) = iterative_plan(&g, &layout, &cfg, &HighsBackend).unwrap();
        assert_eq!(logs.len(), 1, "planar optimum should take one round");
        assert_eq!(logs[0].crossings, 0);
        let sigma = derive_sectors(&g, &layout, cfg.k).unwrap();
        let audit = audit_layout(&g, &layout, &out, &sigma, &cfg).unwrap();
        assert!(audit.is_clean(), "{audit:?}");
        // All four edges horizontal or vertical with side length >= 2.
        for key in g.sorted_edge_keys() {
            let seg = out.segment(&key).unwrap();
            let d = seg.q - seg.p;
            assert!(d.x.abs() < 1e-6 || d.y.abs() < 1e-6, "edge {key} not axis aligned");
            assert!(seg.length() >= 2.0 - 1e-6);
        }
    }
}
