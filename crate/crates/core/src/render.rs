//! Deterministic SVG emission: edges as lines, real nodes as blue dots,
//! detected crossings as orange markers, and dummy nodes or tie-line-induced
//! crossings in a distinct brown class.

use indexmap::IndexSet;

use crate::graph::{find_crossings, EdgeKey, GraphError, Layout, NodeKind, PowerGraph};

#[derive(Clone, Debug, Default)]
pub struct RenderOptions {
    /// Marker radius in layout units; derived from the drawing extent when
    /// unset.
    pub node_radius: Option<f64>,
    /// Crossings involving these edges are classed as tie-induced.
    pub tie_lines: IndexSet<EdgeKey>,
}

const NODE_COLOR: &str = "#1f77b4";
const CROSSING_COLOR: &str = "#ff7f0e";
const ALT_COLOR: &str = "#8c564b";
const EDGE_COLOR: &str = "#607080";
const INFLECTION_COLOR: &str = "#999999";

fn fmt(v: f64) -> String {
    format!("{v:.4}")
}

/// Renders the drawing. Pure function of its inputs: identical inputs yield
/// byte-identical documents.
pub fn render_svg(
    g: &PowerGraph,
    layout: &Layout,
    options: &RenderOptions,
) -> Result<String, GraphError> {
    let mut out = String::new();
    let bbox = layout.bounding_box().filter(|_| g.node_count() > 0);
    let (lo, hi) = match bbox {
        Some(b) => b,
        None => {
            out.push_str(
                "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 100 100\"></svg>\n",
            );
            return Ok(out);
        }
    };
    let width = (hi.x - lo.x).max(1e-9);
    let height = (hi.y - lo.y).max(1e-9);
    let margin = 0.05 * width.max(height);
    let radius = options
        .node_radius
        .unwrap_or_else(|| 0.012 * width.max(height).max(1e-9));
    // Flip y so larger y draws upward.
    let fy = |y: f64| hi.y + lo.y - y;

    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"{} {} {} {}\">\n",
        fmt(lo.x - margin),
        fmt(lo.y - margin),
        fmt(width + 2.0 * margin),
        fmt(height + 2.0 * margin),
    ));
    out.push_str(&format!(
        "<style>.edge{{stroke:{EDGE_COLOR};stroke-width:{sw}}}.node{{fill:{NODE_COLOR}}}.inflection{{fill:{INFLECTION_COLOR}}}.crossing{{fill:{CROSSING_COLOR}}}.crossing-alt{{fill:{ALT_COLOR}}}</style>\n",
        sw = fmt(radius * 0.35),
    ));

    for key in g.sorted_edge_keys() {
        let seg = layout.segment(&key)?;
        out.push_str(&format!(
            "<line class=\"edge\" x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\"/>\n",
            fmt(seg.p.x),
            fmt(fy(seg.p.y)),
            fmt(seg.q.x),
            fmt(fy(seg.q.y)),
        ));
    }

    let mut ids: Vec<_> = g.node_ids().collect();
    ids.sort();
    for id in ids {
        let p = layout.position(id)?;
        let (class, r) = match g.kind(id).expect("node listed") {
            NodeKind::Real => ("node", radius),
            NodeKind::Inflection => ("inflection", radius * 0.6),
            NodeKind::Dummy => ("crossing-alt", radius * 0.8),
        };
        out.push_str(&format!(
            "<circle class=\"{class}\" cx=\"{}\" cy=\"{}\" r=\"{}\"><title>{}</title></circle>\n",
            fmt(p.x),
            fmt(fy(p.y)),
            fmt(r),
            id,
        ));
    }

    for (a, b, p) in &find_crossings(g, layout)?.pairs {
        let class = if options.tie_lines.contains(a) || options.tie_lines.contains(b) {
            "crossing-alt"
        } else {
            "crossing"
        };
        out.push_str(&format!(
            "<circle class=\"{class}\" cx=\"{}\" cy=\"{}\" r=\"{}\"/>\n",
            fmt(p.x),
            fmt(fy(p.y)),
            fmt(radius * 0.8),
        ));
    }
    out.push_str("</svg>\n");
    Ok(out)
}
