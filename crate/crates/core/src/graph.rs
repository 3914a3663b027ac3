//! Graph and layout data model plus the structural edits the pipeline needs:
//! parallel-edge merging, dummy nodes for residual crossings, and inflection
//! nodes for edge bending.

use std::fmt;
use std::sync::Arc;

use indexmap::{IndexMap, IndexSet};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::geometry::{CrossingReport, Point, Segment};

/// Stable node identifier. Dummy and inflection nodes live in the reserved
/// `__dummy_k` / `__inflect_k` namespaces so runs are reproducible.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(Arc<str>);

impl NodeId {
    pub fn new(id: impl AsRef<str>) -> Self {
        NodeId(Arc::from(id.as_ref()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "NodeId({})", self.0)
    }
}

impl From<&str> for NodeId {
    fn from(s: &str) -> Self {
        NodeId::new(s)
    }
}

impl From<String> for NodeId {
    fn from(s: String) -> Self {
        NodeId(Arc::from(s))
    }
}

impl Serialize for NodeId {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.0)
    }
}

impl<'de> Deserialize<'de> for NodeId {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        if s.is_empty() {
            return Err(D::Error::custom("node id must be non-empty"));
        }
        Ok(NodeId::from(s))
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NodeKind {
    Real,
    /// Degree-4 auxiliary node standing in for a residual crossing.
    Dummy,
    /// Degree-2 auxiliary node bending an edge without changing connectivity.
    Inflection,
}

/// Unordered node pair identifying one abstract edge. Endpoints are stored in
/// sorted order so `(a, b)` and `(b, a)` compare equal.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize)]
pub struct EdgeKey(NodeId, NodeId);

impl EdgeKey {
    pub fn new(a: NodeId, b: NodeId) -> Self {
        if a <= b {
            EdgeKey(a, b)
        } else {
            EdgeKey(b, a)
        }
    }

    pub fn a(&self) -> &NodeId {
        &self.0
    }

    pub fn b(&self) -> &NodeId {
        &self.1
    }

    pub fn touches(&self, n: &NodeId) -> bool {
        &self.0 == n || &self.1 == n
    }

    /// The endpoint opposite `n`, if `n` is an endpoint.
    pub fn other(&self, n: &NodeId) -> Option<&NodeId> {
        if &self.0 == n {
            Some(&self.1)
        } else if &self.1 == n {
            Some(&self.0)
        } else {
            None
        }
    }

    pub fn shares_endpoint(&self, other: &EdgeKey) -> bool {
        self.touches(other.a()) || self.touches(other.b())
    }
}

impl fmt::Display for EdgeKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.0, self.1)
    }
}

#[derive(Clone, Debug)]
pub struct NodeInfo {
    pub kind: NodeKind,
    pub label: Option<String>,
}

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("JSON parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("edge ({a},{b}) references undeclared node {missing}")]
    UndeclaredNode { a: String, b: String, missing: String },
    #[error("self-loop on node {0} is not allowed")]
    SelfLoop(NodeId),
    #[error("duplicate node id {0}")]
    DuplicateNode(NodeId),
    #[error("nodes share the same coordinates: {0}")]
    DuplicateCoordinates(String),
    #[error("non-finite coordinates on node {0}")]
    NonFiniteCoordinates(NodeId),
    #[error("{kind:?} node {id} has degree {degree}, expected {expected}")]
    KindDegree {
        id: NodeId,
        kind: NodeKind,
        degree: usize,
        expected: usize,
    },
    #[error("edge {0} not found")]
    EdgeNotFound(EdgeKey),
    #[error("node {0} not found")]
    NodeNotFound(NodeId),
    #[error("crossing point ({x}, {y}) coincides with node {node}; perturb the layout first")]
    DegenerateCrossing { node: NodeId, x: f64, y: f64 },
    #[error("node {0} is not an inflection node")]
    NotInflection(NodeId),
    #[error("layout is missing coordinates for node {0}")]
    MissingCoordinates(NodeId),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

/// Undirected multigraph of grid nodes. Parallel lines are merged into one
/// abstract edge carrying a multiplicity count. Edits return new values; a
/// built graph is never mutated in place.
#[derive(Clone, Debug, Default)]
pub struct PowerGraph {
    nodes: IndexMap<NodeId, NodeInfo>,
    edges: IndexMap<EdgeKey, u32>,
    adjacency: IndexMap<NodeId, IndexSet<NodeId>>,
}

impl PowerGraph {
    /// Builds a validated graph. Parallel edge records must already be merged
    /// (use [`crate::io::load_graph`] for raw input, which merges them).
    pub fn new(
        nodes: impl IntoIterator<Item = (NodeId, NodeInfo)>,
        edges: impl IntoIterator<Item = (EdgeKey, u32)>,
    ) -> Result<Self, GraphError> {
        let mut g = PowerGraph::default();
        for (id, info) in nodes {
            if g.nodes.contains_key(&id) {
                return Err(GraphError::DuplicateNode(id));
            }
            g.adjacency.insert(id.clone(), IndexSet::new());
            g.nodes.insert(id, info);
        }
        for (key, mult) in edges {
            g.insert_edge(key, mult)?;
        }
        g.validate_kind_degrees()?;
        Ok(g)
    }

    /// Builds a graph without the kind/degree validation. Used for extracted
    /// sub-universes (e.g. the local neighbourhood handed to the arrangement)
    /// where auxiliary nodes legitimately lose incident edges.
    pub(crate) fn from_parts_unchecked(
        nodes: impl IntoIterator<Item = (NodeId, NodeInfo)>,
        edges: impl IntoIterator<Item = (EdgeKey, u32)>,
    ) -> Result<Self, GraphError> {
        let mut g = PowerGraph::default();
        for (id, info) in nodes {
            g.adjacency.insert(id.clone(), IndexSet::new());
            g.nodes.insert(id, info);
        }
        for (key, mult) in edges {
            g.insert_edge(key, mult)?;
        }
        Ok(g)
    }

    fn insert_edge(&mut self, key: EdgeKey, mult: u32) -> Result<(), GraphError> {
        if key.a() == key.b() {
            return Err(GraphError::SelfLoop(key.a().clone()));
        }
        for end in [key.a(), key.b()] {
            if !self.nodes.contains_key(end) {
                return Err(GraphError::UndeclaredNode {
                    a: key.a().to_string(),
                    b: key.b().to_string(),
                    missing: end.to_string(),
                });
            }
        }
        *self.edges.entry(key.clone()).or_insert(0) += mult.max(1);
        self.adjacency[key.a()].insert(key.b().clone());
        self.adjacency[key.b()].insert(key.a().clone());
        Ok(())
    }

    fn remove_edge(&mut self, key: &EdgeKey) -> Result<u32, GraphError> {
        let mult = self
            .edges
            .shift_remove(key)
            .ok_or_else(|| GraphError::EdgeNotFound(key.clone()))?;
        self.adjacency[key.a()].shift_remove(key.b());
        self.adjacency[key.b()].shift_remove(key.a());
        Ok(mult)
    }

    pub fn validate_kind_degrees(&self) -> Result<(), GraphError> {
        for (id, info) in &self.nodes {
            let expected = match info.kind {
                NodeKind::Real => continue,
                NodeKind::Dummy => 4,
                NodeKind::Inflection => 2,
            };
            let degree = self.degree(id);
            if degree != expected {
                return Err(GraphError::KindDegree {
                    id: id.clone(),
                    kind: info.kind,
                    degree,
                    expected,
                });
            }
        }
        Ok(())
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Number of abstract edges (multiplicity not counted).
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn contains_node(&self, id: &NodeId) -> bool {
        self.nodes.contains_key(id)
    }

    pub fn contains_edge(&self, key: &EdgeKey) -> bool {
        self.edges.contains_key(key)
    }

    pub fn multiplicity(&self, key: &EdgeKey) -> Option<u32> {
        self.edges.get(key).copied()
    }

    pub fn node_ids(&self) -> impl Iterator<Item = &NodeId> {
        self.nodes.keys()
    }

    pub fn nodes(&self) -> impl Iterator<Item = (&NodeId, &NodeInfo)> {
        self.nodes.iter()
    }

    pub fn info(&self, id: &NodeId) -> Option<&NodeInfo> {
        self.nodes.get(id)
    }

    pub fn kind(&self, id: &NodeId) -> Option<NodeKind> {
        self.nodes.get(id).map(|i| i.kind)
    }

    pub fn edges(&self) -> impl Iterator<Item = (&EdgeKey, u32)> {
        self.edges.iter().map(|(k, m)| (k, *m))
    }

    pub fn edge_keys(&self) -> impl Iterator<Item = &EdgeKey> {
        self.edges.keys()
    }

    pub fn degree(&self, id: &NodeId) -> usize {
        self.adjacency.get(id).map_or(0, |n| n.len())
    }

    pub fn max_degree(&self) -> usize {
        self.nodes.keys().map(|id| self.degree(id)).max().unwrap_or(0)
    }

    pub fn neighbors(&self, id: &NodeId) -> impl Iterator<Item = &NodeId> {
        self.adjacency.get(id).into_iter().flatten()
    }

    /// Neighbors in sorted id order, for deterministic traversals.
    pub fn neighbors_sorted(&self, id: &NodeId) -> Vec<NodeId> {
        let mut out: Vec<NodeId> = self.neighbors(id).cloned().collect();
        out.sort();
        out
    }

    pub fn edges_incident(&self, id: &NodeId) -> Vec<EdgeKey> {
        self.neighbors(id)
            .map(|n| EdgeKey::new(id.clone(), n.clone()))
            .collect()
    }

    /// Edge keys in sorted order.
    pub fn sorted_edge_keys(&self) -> Vec<EdgeKey> {
        let mut keys: Vec<EdgeKey> = self.edges.keys().cloned().collect();
        keys.sort();
        keys
    }

    pub fn with_edge_removed(&self, key: &EdgeKey) -> Result<(Self, u32), GraphError> {
        let mut g = self.clone();
        let mult = g.remove_edge(key)?;
        Ok((g, mult))
    }

    pub fn with_edge_added(&self, key: EdgeKey, mult: u32) -> Result<Self, GraphError> {
        let mut g = self.clone();
        g.insert_edge(key, mult)?;
        Ok(g)
    }

    /// Next free index in a reserved id namespace such as `__dummy_`.
    fn next_reserved(&self, prefix: &str) -> usize {
        self.nodes
            .keys()
            .filter_map(|id| id.as_str().strip_prefix(prefix))
            .filter_map(|suffix| suffix.parse::<usize>().ok())
            .map(|k| k + 1)
            .max()
            .unwrap_or(0)
    }

    /// Induced subgraph on `keep`, including only edges with both endpoints
    /// inside. Kind/degree invariants are not re-checked: boundary-adjacent
    /// auxiliary nodes may lose incident edges.
    pub fn induced(&self, keep: &IndexSet<NodeId>) -> PowerGraph {
        let nodes = self
            .nodes
            .iter()
            .filter(|(id, _)| keep.contains(*id))
            .map(|(id, info)| (id.clone(), info.clone()));
        let edges = self
            .edges
            .iter()
            .filter(|(k, _)| keep.contains(k.a()) && keep.contains(k.b()))
            .map(|(k, m)| (k.clone(), *m));
        PowerGraph::from_parts_unchecked(nodes, edges).expect("induced subgraph is consistent")
    }
}

/// Mapping from node id to a point on the dimensionless canvas.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Layout {
    coords: IndexMap<NodeId, Point>,
}

impl Layout {
    pub fn new() -> Self {
        Layout::default()
    }

    pub fn from_iter(points: impl IntoIterator<Item = (NodeId, Point)>) -> Self {
        Layout {
            coords: points.into_iter().collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn get(&self, id: &NodeId) -> Option<Point> {
        self.coords.get(id).copied()
    }

    pub fn position(&self, id: &NodeId) -> Result<Point, GraphError> {
        self.get(id)
            .ok_or_else(|| GraphError::MissingCoordinates(id.clone()))
    }

    pub fn set(&mut self, id: NodeId, p: Point) {
        self.coords.insert(id, p);
    }

    pub fn remove(&mut self, id: &NodeId) {
        self.coords.shift_remove(id);
    }

    pub fn iter(&self) -> impl Iterator<Item = (&NodeId, Point)> {
        self.coords.iter().map(|(k, p)| (k, *p))
    }

    pub fn with(&self, id: NodeId, p: Point) -> Self {
        let mut l = self.clone();
        l.set(id, p);
        l
    }

    /// Axis-aligned bounding box `(min, max)`, or `None` when empty.
    pub fn bounding_box(&self) -> Option<(Point, Point)> {
        let mut it = self.coords.values();
        let first = *it.next()?;
        let (mut lo, mut hi) = (first, first);
        for p in it {
            lo.x = lo.x.min(p.x);
            lo.y = lo.y.min(p.y);
            hi.x = hi.x.max(p.x);
            hi.y = hi.y.max(p.y);
        }
        Some((lo, hi))
    }

    pub fn centroid(&self) -> Option<Point> {
        if self.coords.is_empty() {
            return None;
        }
        let n = self.coords.len() as f64;
        let (sx, sy) = self
            .coords
            .values()
            .fold((0.0, 0.0), |(sx, sy), p| (sx + p.x, sy + p.y));
        Some(Point::new(sx / n, sy / n))
    }

    /// Checks that every node of `g` has finite coordinates and that no two
    /// nodes share the exact same point.
    pub fn validate_for(&self, g: &PowerGraph) -> Result<(), GraphError> {
        for id in g.node_ids() {
            let p = self.position(id)?;
            if !p.x.is_finite() || !p.y.is_finite() {
                return Err(GraphError::NonFiniteCoordinates(id.clone()));
            }
        }
        let mut seen: IndexMap<(u64, u64), &NodeId> = IndexMap::new();
        let mut offenders: Vec<String> = Vec::new();
        for id in g.node_ids() {
            let p = self.get(id).expect("checked above");
            let key = (p.x.to_bits(), p.y.to_bits());
            if let Some(prev) = seen.get(&key) {
                offenders.push(format!("{prev} and {id} at ({}, {})", p.x, p.y));
            } else {
                seen.insert(key, id);
            }
        }
        if !offenders.is_empty() {
            return Err(GraphError::DuplicateCoordinates(offenders.join("; ")));
        }
        Ok(())
    }

    /// Segment drawn for an abstract edge.
    pub fn segment(&self, key: &EdgeKey) -> Result<Segment, GraphError> {
        Ok(Segment::new(self.position(key.a())?, self.position(key.b())?))
    }
}

/// Crossings between graph edges, i.e. the set `P` driving planarization and
/// edge re-insertion.
#[derive(Clone, Debug, Default)]
pub struct EdgeCrossings {
    pub pairs: Vec<(EdgeKey, EdgeKey, Point)>,
}

impl EdgeCrossings {
    pub fn count(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Crossings lying on each edge.
    pub fn per_edge(&self) -> IndexMap<EdgeKey, usize> {
        let mut out: IndexMap<EdgeKey, usize> = IndexMap::new();
        for (a, b, _) in &self.pairs {
            *out.entry(a.clone()).or_insert(0) += 1;
            *out.entry(b.clone()).or_insert(0) += 1;
        }
        out
    }
}

/// Runs the intersection sweep over the drawn abstract edges of `g`.
pub fn find_crossings(g: &PowerGraph, layout: &Layout) -> Result<EdgeCrossings, GraphError> {
    let keys = g.sorted_edge_keys();
    let mut segments = Vec::with_capacity(keys.len());
    for k in &keys {
        segments.push(layout.segment(k)?);
    }
    let report = crate::geometry::sweep_intersections(&segments)
        .unwrap_or_else(|e| panic!("layout produced degenerate segments: {e}"));
    Ok(lift_report(&report, &keys))
}

pub(crate) fn lift_report(report: &CrossingReport, keys: &[EdgeKey]) -> EdgeCrossings {
    let mut pairs: Vec<(EdgeKey, EdgeKey, Point)> = report
        .pairs
        .iter()
        .map(|c| {
            let (i, j) = c.segments;
            let (a, b) = if keys[i] <= keys[j] {
                (keys[i].clone(), keys[j].clone())
            } else {
                (keys[j].clone(), keys[i].clone())
            };
            (a, b, c.point)
        })
        .collect();
    pairs.sort_by(|l, r| (&l.0, &l.1).cmp(&(&r.0, &r.1)));
    EdgeCrossings { pairs }
}

/// Number of crossings in the drawing of `g` under `layout`.
pub fn count_layout_crossings(g: &PowerGraph, layout: &Layout) -> Result<usize, GraphError> {
    Ok(find_crossings(g, layout)?.count())
}

/// Replaces every reported crossing with a degree-4 dummy node placed at the
/// intersection point, splitting both crossing edges. The result draws the
/// same connections with zero crossings among the produced segments.
///
/// Three or more edges through one point are split pairwise in deterministic
/// edge-id order; the chained dummy nodes are displaced by 1e-9 canvas units
/// to keep every node degree-4.
pub fn planarize_with_dummies(
    g: &PowerGraph,
    layout: &Layout,
    crossings: &EdgeCrossings,
) -> Result<(PowerGraph, Layout), GraphError> {
    if crossings.is_empty() {
        return Ok((g.clone(), layout.clone()));
    }

    // Pieces of each original edge, kept ordered from endpoint a to b.
    #[derive(Clone)]
    struct Piece {
        from: NodeId,
        to: NodeId,
    }
    let mut pieces: IndexMap<EdgeKey, Vec<Piece>> = IndexMap::new();
    let mut mults: IndexMap<EdgeKey, u32> = IndexMap::new();

    let mut ordered = crossings.pairs.clone();
    ordered.sort_by(|l, r| (&l.0, &l.1).cmp(&(&r.0, &r.1)));

    let mut new_layout = layout.clone();
    let mut nodes: Vec<(NodeId, NodeInfo)> = g.nodes().map(|(i, n)| (i.clone(), n.clone())).collect();
    let mut next_dummy = g.next_reserved("__dummy_");

    for (ea, eb, point) in &ordered {
        for e in [ea, eb] {
            if !pieces.contains_key(e) {
                let mult = g
                    .multiplicity(e)
                    .ok_or_else(|| GraphError::EdgeNotFound(e.clone()))?;
                mults.insert(e.clone(), mult);
                pieces.insert(
                    e.clone(),
                    vec![Piece {
                        from: e.a().clone(),
                        to: e.b().clone(),
                    }],
                );
            }
        }

        // Find a position strictly inside a piece of both edges; chained
        // splits at a shared point get displaced.
        let mut p = *point;
        let locate = |pieces: &IndexMap<EdgeKey, Vec<Piece>>, e: &EdgeKey, p: Point, lay: &Layout| {
            let list = &pieces[e];
            let mut best = 0usize;
            let mut best_d = f64::INFINITY;
            for (idx, piece) in list.iter().enumerate() {
                let a = lay.get(&piece.from).expect("piece endpoint placed");
                let b = lay.get(&piece.to).expect("piece endpoint placed");
                let d = Segment::new(a, b).distance_to_point(p);
                if d < best_d {
                    best_d = d;
                    best = idx;
                }
            }
            best
        };
        let mut shifted = 0u32;
        loop {
            let clash = new_layout.iter().find(|(_, q)| *q == p).map(|(id, _)| id.clone());
            match clash {
                None => break,
                Some(node) => {
                    // A brand-new chained dummy sits exactly here; nudge.
                    if g.contains_node(&node) {
                        return Err(GraphError::DegenerateCrossing {
                            node,
                            x: p.x,
                            y: p.y,
                        });
                    }
                    shifted += 1;
                    p = Point::new(point.x + 1e-9 * f64::from(shifted), point.y);
                }
            }
        }

        let dummy = NodeId::new(format!("__dummy_{next_dummy}"));
        next_dummy += 1;
        nodes.push((
            dummy.clone(),
            NodeInfo {
                kind: NodeKind::Dummy,
                label: None,
            },
        ));
        new_layout.set(dummy.clone(), p);

        for e in [ea, eb] {
            let idx = locate(&pieces, e, p, &new_layout);
            let list = pieces.get_mut(e).expect("piece list exists");
            let old = list[idx].clone();
            list.splice(
                idx..=idx,
                [
                    Piece {
                        from: old.from,
                        to: dummy.clone(),
                    },
                    Piece {
                        from: dummy.clone(),
                        to: old.to,
                    },
                ],
            );
        }
    }

    let mut edges: Vec<(EdgeKey, u32)> = Vec::new();
    for (key, mult) in g.edges() {
        match pieces.get(key) {
            None => edges.push((key.clone(), mult)),
            Some(list) => {
                for piece in list {
                    edges.push((EdgeKey::new(piece.from.clone(), piece.to.clone()), mults[key]));
                }
            }
        }
    }

    let out = PowerGraph::new(nodes, edges)?;
    Ok((out, new_layout))
}

/// Splits `edge` at its midpoint with a new degree-2 inflection node.
/// Multiplicity carries over to both halves.
pub fn add_inflection_node(
    g: &PowerGraph,
    layout: &Layout,
    edge: &EdgeKey,
) -> Result<(PowerGraph, Layout, NodeId), GraphError> {
    let mult = g
        .multiplicity(edge)
        .ok_or_else(|| GraphError::EdgeNotFound(edge.clone()))?;
    let pa = layout.position(edge.a())?;
    let pb = layout.position(edge.b())?;
    let mid = Point::new((pa.x + pb.x) / 2.0, (pa.y + pb.y) / 2.0);

    let id = NodeId::new(format!("__inflect_{}", g.next_reserved("__inflect_")));
    let mut nodes: Vec<(NodeId, NodeInfo)> = g.nodes().map(|(i, n)| (i.clone(), n.clone())).collect();
    nodes.push((
        id.clone(),
        NodeInfo {
            kind: NodeKind::Inflection,
            label: None,
        },
    ));
    let mut edges: Vec<(EdgeKey, u32)> = Vec::new();
    for (key, m) in g.edges() {
        if key == edge {
            edges.push((EdgeKey::new(edge.a().clone(), id.clone()), mult));
            edges.push((EdgeKey::new(id.clone(), edge.b().clone()), mult));
        } else {
            edges.push((key.clone(), m));
        }
    }
    let out = PowerGraph::new(nodes, edges)?;
    let new_layout = layout.with(id.clone(), mid);
    Ok((out, new_layout, id))
}

/// Reverses [`add_inflection_node`]: merges the two halves around the
/// inflection node back into one abstract edge.
pub fn remove_inflection_node(
    g: &PowerGraph,
    layout: &Layout,
    id: &NodeId,
) -> Result<(PowerGraph, Layout), GraphError> {
    match g.kind(id) {
        Some(NodeKind::Inflection) => {}
        Some(_) => return Err(GraphError::NotInflection(id.clone())),
        None => return Err(GraphError::NodeNotFound(id.clone())),
    }
    let nb = g.neighbors_sorted(id);
    if nb.len() != 2 {
        return Err(GraphError::KindDegree {
            id: id.clone(),
            kind: NodeKind::Inflection,
            degree: nb.len(),
            expected: 2,
        });
    }
    let half_a = EdgeKey::new(id.clone(), nb[0].clone());
    let mult = g.multiplicity(&half_a).expect("incident edge exists");

    let nodes = g
        .nodes()
        .filter(|(i, _)| *i != id)
        .map(|(i, n)| (i.clone(), n.clone()));
    let mut edges: Vec<(EdgeKey, u32)> = g
        .edges()
        .filter(|(k, _)| !k.touches(id))
        .map(|(k, m)| (k.clone(), m))
        .collect();
    edges.push((EdgeKey::new(nb[0].clone(), nb[1].clone()), mult));
    let out = PowerGraph::new(nodes, edges)?;
    let mut new_layout = layout.clone();
    new_layout.remove(id);
    Ok((out, new_layout))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn n(s: &str) -> NodeId {
        NodeId::new(s)
    }

    fn real(ids: &[&str], coords: &[(f64, f64)]) -> (PowerGraph, Layout) {
        let nodes = ids.iter().map(|s| {
            (
                n(s),
                NodeInfo {
                    kind: NodeKind::Real,
                    label: None,
                },
            )
        });
        let g = PowerGraph::new(nodes, []).unwrap();
        let layout = Layout::from_iter(
            ids.iter()
                .zip(coords)
                .map(|(s, (x, y))| (n(s), Point::new(*x, *y))),
        );
        (g, layout)
    }

    #[test]
    fn edge_key_normalizes() {
        assert_eq!(EdgeKey::new(n("b"), n("a")), EdgeKey::new(n("a"), n("b")));
    }

    #[test]
    fn degree_sum_is_twice_edge_count() {
        let nodes = ["a", "b", "c", "d"].map(|s| {
            (
                n(s),
                NodeInfo {
                    kind: NodeKind::Real,
                    label: None,
                },
            )
        });
        let edges = [
            (EdgeKey::new(n("a"), n("b")), 1),
            (EdgeKey::new(n("b"), n("c")), 2),
            (EdgeKey::new(n("c"), n("d")), 1),
        ];
        let g = PowerGraph::new(nodes, edges).unwrap();
        let degree_sum: usize = g.node_ids().map(|v| g.degree(v)).sum();
        assert_eq!(degree_sum, 2 * g.edge_count());
    }

    #[test]
    fn self_loop_rejected() {
        let nodes = [(
            n("a"),
            NodeInfo {
                kind: NodeKind::Real,
                label: None,
            },
        )];
        let err = PowerGraph::new(nodes, [(EdgeKey::new(n("a"), n("a")), 1)]).unwrap_err();
        assert!(matches!(err, GraphError::SelfLoop(_)));
    }

    #[test]
    fn inflection_midpoint_and_multiplicity() {
        let (g, layout) = real(&["u", "v"], &[(0.0, 0.0), (2.0, 0.0)]);
        let g = g.with_edge_added(EdgeKey::new(n("u"), n("v")), 2).unwrap();
        let (g2, l2, id) = add_inflection_node(&g, &layout, &EdgeKey::new(n("u"), n("v"))).unwrap();
        assert_eq!(l2.get(&id), Some(Point::new(1.0, 0.0)));
        assert_eq!(g2.multiplicity(&EdgeKey::new(n("u"), id.clone())), Some(2));
        assert_eq!(g2.multiplicity(&EdgeKey::new(n("v"), id.clone())), Some(2));
        assert_eq!(g2.degree(&id), 2);
        assert!(!g2.contains_edge(&EdgeKey::new(n("u"), n("v"))));
    }

    #[test]
    fn inflection_round_trip_restores_graph() {
        let (g, layout) = real(
            &["u", "v", "w"],
            &[(0.0, 0.0), (2.0, 0.0), (1.0, 3.0)],
        );
        let g = g
            .with_edge_added(EdgeKey::new(n("u"), n("v")), 1)
            .unwrap()
            .with_edge_added(EdgeKey::new(n("v"), n("w")), 3)
            .unwrap();
        let before = crate::io::to_document_string(&g, &layout).unwrap();
        let (g2, l2, id) = add_inflection_node(&g, &layout, &EdgeKey::new(n("v"), n("w"))).unwrap();
        let (g3, l3) = remove_inflection_node(&g2, &l2, &id).unwrap();
        let after = crate::io::to_document_string(&g3, &l3).unwrap();
        assert_eq!(before, after);
    }

    #[test]
    fn planarize_single_crossing() {
        let (g, layout) = real(
            &["a", "b", "c", "d"],
            &[(0.0, 0.0), (2.0, 2.0), (0.0, 2.0), (2.0, 0.0)],
        );
        let g = g
            .with_edge_added(EdgeKey::new(n("a"), n("b")), 1)
            .unwrap()
            .with_edge_added(EdgeKey::new(n("c"), n("d")), 1)
            .unwrap();
        let crossings = find_crossings(&g, &layout).unwrap();
        assert_eq!(crossings.count(), 1);
        let (g2, l2) = planarize_with_dummies(&g, &layout, &crossings).unwrap();
        assert_eq!(g2.node_count(), 5);
        assert_eq!(g2.edge_count(), 4);
        assert_eq!(count_layout_crossings(&g2, &l2).unwrap(), 0);
        let dummy = n("__dummy_0");
        assert_eq!(g2.degree(&dummy), 4);
        assert_eq!(l2.get(&dummy), Some(Point::new(1.0, 1.0)));
    }

    #[test]
    fn planarize_empty_report_is_identity() {
        let (g, layout) = real(&["a", "b"], &[(0.0, 0.0), (1.0, 0.0)]);
        let g = g.with_edge_added(EdgeKey::new(n("a"), n("b")), 1).unwrap();
        let (g2, l2) = planarize_with_dummies(&g, &layout, &EdgeCrossings::default()).unwrap();
        assert_eq!(g2.edge_count(), g.edge_count());
        assert_eq!(l2, layout);
    }

    #[test]
    fn planarize_rejects_crossing_on_node() {
        let (g, layout) = real(
            &["a", "b", "c", "d", "m"],
            &[(0.0, 0.0), (2.0, 2.0), (0.0, 2.0), (2.0, 0.0), (1.0, 1.0)],
        );
        let g = g
            .with_edge_added(EdgeKey::new(n("a"), n("b")), 1)
            .unwrap()
            .with_edge_added(EdgeKey::new(n("c"), n("d")), 1)
            .unwrap();
        let crossings = find_crossings(&g, &layout).unwrap();
        let err = planarize_with_dummies(&g, &layout, &crossings).unwrap_err();
        assert!(matches!(err, GraphError::DegenerateCrossing { .. }));
    }

    #[test]
    fn duplicate_coordinates_detected() {
        let (g, mut layout) = real(&["a", "b"], &[(0.0, 0.0), (1.0, 0.0)]);
        layout.set(n("b"), Point::new(0.0, 0.0));
        let err = layout.validate_for(&g).unwrap_err();
        assert!(matches!(err, GraphError::DuplicateCoordinates(_)));
    }
}
