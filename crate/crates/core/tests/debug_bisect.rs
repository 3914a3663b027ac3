// Scratch diagnostics; removed once the model is stable.

use indexmap::IndexSet;
use topo::graph::{find_crossings, planarize_with_dummies};
use topo::milp::{
    build_model, derive_sectors, solve, HighsBackend, MilpModel, PlannerConfig, SolveOptions,
    SolveOutcome,
};
use topo::reduce::{reduce_crossings, ReductionConfig};

fn strip(model: &MilpModel, prefixes: &[&str]) -> MilpModel {
    let mut out = MilpModel::new(model.name.clone());
    for v in model.vars() {
        out.add_var(v.name.clone(), v.kind, v.lower, v.upper);
    }
    for c in model.constraints() {
        if prefixes.iter().any(|p| c.name.starts_with(p)) {
            continue;
        }
        out.add_constraint(c.name.clone(), c.terms.clone(), c.sense, c.rhs);
    }
    for &(v, k) in model.objective() {
        out.add_objective_term(v, k);
    }
    out.objective_constant = model.objective_constant;
    out
}

#[test]
#[ignore]
fn bisect_k5_infeasibility() {
    let raw = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/k5.json"))
        .unwrap();
    let (g, layout) = topo::io::load_graph_str(&raw).unwrap();
    let (rg, rl, _) = reduce_crossings(&g, &layout, &ReductionConfig::default()).unwrap();
    let crossings = find_crossings(&rg, &rl).unwrap();
    let (pg, pl) = planarize_with_dummies(&rg, &rl, &crossings).unwrap();
    eprintln!("planarized: {} nodes {} edges", pg.node_count(), pg.edge_count());
    for id in pg.node_ids() {
        eprint!("{}={} ", id, pg.degree(id));
    }
    eprintln!();
    let cfg = PlannerConfig::default();
    let sigma = derive_sectors(&pg, &pl, cfg.k).unwrap();
    let model = build_model(&pg, &pl, &sigma, &cfg, &IndexSet::new()).unwrap();
    let groups: Vec<(&str, Vec<&str>)> = vec![
        ("full", vec![]),
        ("no-cyc", vec!["cyc", "excpick"]),
        ("no-length", vec!["len_e"]),
        ("no-align", vec!["alignp", "alignn"]),
        ("no-link", vec!["link"]),
        ("no-horver", vec!["horp", "horn", "verp", "vern", "hvcap"]),
        ("no-window", vec!["inpick", "secdef", "diffp", "diffn"]),
        ("only-identities", vec!["cyc", "excpick", "len", "align", "link", "hor", "ver", "hvcap", "inpick", "secdef", "diff", "dev", "lenavg", "lenp", "lenn"]),
    ];
    for (label, prefixes) in groups {
        let m = strip(&model, &prefixes);
        let outcome = solve(&m, &HighsBackend, &SolveOptions::default()).unwrap();
        let status = match outcome {
            SolveOutcome::Solved(s) => format!("solved obj={:.3}", s.objective),
            SolveOutcome::Infeasible { .. } => "INFEASIBLE".to_string(),
            SolveOutcome::Timeout { .. } => "timeout".to_string(),
        };
        eprintln!("{label}: {status}");
    }
}

#[test]
#[ignore]
fn dump_k5_rings() {
    let raw = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/k5.json"))
        .unwrap();
    let (g, layout) = topo::io::load_graph_str(&raw).unwrap();
    let (rg, rl, _) = reduce_crossings(&g, &layout, &ReductionConfig::default()).unwrap();
    let crossings = find_crossings(&rg, &rl).unwrap();
    let (pg, pl) = planarize_with_dummies(&rg, &rl, &crossings).unwrap();
    let cfg = topo::milp::suggest_params(&pg, &pl).unwrap();
    eprintln!("suggested: k={} flexibility={:?}", cfg.k, cfg.flexibility);
    let sigma = derive_sectors(&pg, &pl, cfg.k).unwrap();
    for v in pg.node_ids() {
        let pv = pl.get(v).unwrap();
        let mut ring: Vec<(f64, String, u32)> = pg
            .neighbors(v)
            .map(|u| {
                let a = (pl.get(u).unwrap() - pv).angle_deg();
                (a, u.to_string(), sigma[&(u.clone(), v.clone())])
            })
            .collect();
        ring.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        let desc: Vec<String> = ring
            .iter()
            .map(|(a, u, s)| format!("{u}@{a:.1}deg s{s}"))
            .collect();
        eprintln!("{v}: {}", desc.join("  "));
    }
    // per-node cyc bisect: drop all cyc rows except one node's at a time
    let model = build_model(&pg, &pl, &sigma, &cfg, &IndexSet::new()).unwrap();
    let mut nodes: Vec<String> = pg.node_ids().map(|s| s.to_string()).collect();
    nodes.sort();
    for (ni, name) in nodes.iter().enumerate() {
        let keep_this = format!("cyc_n{ni}_");
        let stripped_names: Vec<String> = model
            .constraints()
            .iter()
            .filter(|c| c.name.starts_with("cyc_") && !c.name.starts_with(&keep_this))
            .map(|c| c.name.clone())
            .collect();
        let refs: Vec<&str> = stripped_names.iter().map(|s| s.as_str()).collect();
        let m = strip(&model, &refs);
        let outcome = solve(&m, &HighsBackend, &SolveOptions::default()).unwrap();
        let status = match outcome {
            SolveOutcome::Solved(_) => "ok",
            SolveOutcome::Infeasible { .. } => "INFEASIBLE",
            SolveOutcome::Timeout { .. } => "timeout",
        };
        eprintln!("cyc only for n{ni} ({name}): {status}");
    }
}
