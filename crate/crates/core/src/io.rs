//! JSON grid format:
//! `{"nodes":[{"id","x","y","label"?,"kind"?}],"edges":[{"a","b","count"?}]}`.
//! Parallel edge records merge into one abstract edge with a multiplicity.
//! Saved documents carry a `"kind"` field on dummy/inflection nodes and are
//! loadable again, so every emitted artifact round-trips.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::geometry::Point;
use crate::graph::{EdgeKey, GraphError, Layout, NodeId, NodeInfo, NodeKind, PowerGraph};

#[derive(Serialize, Deserialize)]
struct NodeDoc {
    id: NodeId,
    x: f64,
    y: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    label: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    kind: Option<NodeKind>,
}

#[derive(Serialize, Deserialize)]
struct EdgeDoc {
    a: NodeId,
    b: NodeId,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    count: Option<u32>,
}

#[derive(Serialize, Deserialize)]
struct GraphDoc {
    nodes: Vec<NodeDoc>,
    edges: Vec<EdgeDoc>,
}

/// Parses the JSON grid format, merging parallel edges and building the
/// adjacency index. Returns the graph and the initial layout.
pub fn load_graph(mut source: impl Read) -> Result<(PowerGraph, Layout), GraphError> {
    let mut raw = String::new();
    source.read_to_string(&mut raw)?;
    load_graph_str(&raw)
}

pub fn load_graph_str(raw: &str) -> Result<(PowerGraph, Layout), GraphError> {
    let doc: GraphDoc = serde_json::from_str(raw).map_err(|e| GraphError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;

    let mut nodes: Vec<(NodeId, NodeInfo)> = Vec::with_capacity(doc.nodes.len());
    let mut layout = Layout::new();
    for n in &doc.nodes {
        nodes.push((
            n.id.clone(),
            NodeInfo {
                kind: n.kind.unwrap_or(NodeKind::Real),
                label: n.label.clone(),
            },
        ));
        layout.set(n.id.clone(), Point::new(n.x, n.y));
    }
    let edges = doc
        .edges
        .iter()
        .map(|e| (EdgeKey::new(e.a.clone(), e.b.clone()), e.count.unwrap_or(1)));
    let graph = PowerGraph::new(nodes, edges)?;
    layout.validate_for(&graph)?;
    Ok((graph, layout))
}

/// Serializes graph + layout to the grid format. Nodes and edges are sorted
/// by id so output is canonical: structurally equal inputs produce identical
/// bytes.
pub fn save_document(
    g: &PowerGraph,
    layout: &Layout,
    mut sink: impl Write,
) -> Result<(), GraphError> {
    let text = to_document_string(g, layout)?;
    sink.write_all(text.as_bytes())?;
    Ok(())
}

pub fn to_document_string(g: &PowerGraph, layout: &Layout) -> Result<String, GraphError> {
    let mut ids: Vec<&NodeId> = g.node_ids().collect();
    ids.sort();
    let mut nodes = Vec::with_capacity(ids.len());
    for id in ids {
        let info = g.info(id).expect("node listed");
        let p = layout.position(id)?;
        nodes.push(NodeDoc {
            id: id.clone(),
            x: p.x,
            y: p.y,
            label: info.label.clone(),
            kind: match info.kind {
                NodeKind::Real => None,
                other => Some(other),
            },
        });
    }
    let edges = g
        .sorted_edge_keys()
        .into_iter()
        .map(|k| {
            let count = g.multiplicity(&k).expect("edge listed");
            EdgeDoc {
                a: k.a().clone(),
                b: k.b().clone(),
                count: if count == 1 { None } else { Some(count) },
            }
        })
        .collect();
    let doc = GraphDoc { nodes, edges };
    Ok(serde_json::to_string_pretty(&doc).expect("document serializes"))
}
