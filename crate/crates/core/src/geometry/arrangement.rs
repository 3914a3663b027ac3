//! Planar subdivision of a bounded convex canvas by visibility-region
//! boundaries. Every demarcation edge knows what it lies on (a drawn graph
//! edge, a sight ray, or the canvas border), which drives the per-face
//! crossing increments of the dual graph.
//!
//! All construction happens in exact rational coordinates; faces expose
//! double-precision polygons at the boundary.

use std::collections::BTreeMap;

use indexmap::IndexMap;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::Serialize;

use super::exact::{orient2d_rational, ExactPoint, Orientation};
use super::{ConvexPolygon, GeometryError, Point, VisibilityBoundary};
use crate::graph::{EdgeKey, Layout, NodeId, PowerGraph};

pub type FaceId = usize;

/// Origin of a demarcation edge.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize)]
pub enum BoundaryLabel {
    /// Lies on the drawn segment of a graph edge.
    GraphEdge(EdgeKey),
    /// Lies on the sight ray of `observer` emanating from `source`.
    SightRay { observer: NodeId, source: NodeId },
    /// Part of the canvas border.
    Canvas,
}

/// A visibility boundary tagged with the graph identities that produced it.
/// The boundary's edge segment must run from the position of `edge.a()` to
/// the position of `edge.b()`.
#[derive(Clone, Debug)]
pub struct LabeledBoundary {
    pub observer: NodeId,
    pub edge: EdgeKey,
    pub boundary: VisibilityBoundary,
}

struct RawPiece {
    a: ExactPoint,
    b: ExactPoint,
    label: BoundaryLabel,
}

#[derive(Clone, Debug)]
struct HalfEdge {
    from: usize,
    to: usize,
    twin: usize,
    next: usize,
    face: FaceId,
}

#[derive(Clone, Debug)]
struct EdgeRec {
    v1: usize,
    v2: usize,
    labels: Vec<BoundaryLabel>,
}

#[derive(Clone, Debug)]
pub struct FaceData {
    /// Cycle of vertex indices, interior on the left.
    cycle: Vec<usize>,
    outer: bool,
}

pub struct Arrangement {
    vertices_exact: Vec<ExactPoint>,
    vertices: Vec<Point>,
    half_edges: Vec<HalfEdge>,
    edges: Vec<EdgeRec>,
    faces: Vec<FaceData>,
    outer_face: FaceId,
}

impl Arrangement {
    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Face count including the outer face.
    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    pub fn interior_faces(&self) -> impl Iterator<Item = FaceId> + '_ {
        (0..self.faces.len()).filter(move |&f| f != self.outer_face)
    }

    pub fn outer_face(&self) -> FaceId {
        self.outer_face
    }

    pub fn face_polygon(&self, f: FaceId) -> Vec<Point> {
        self.faces[f].cycle.iter().map(|&v| self.vertices[v]).collect()
    }

    /// Euler relation `V - E + F = 2` for the connected subdivision.
    pub fn euler_check(&self) -> bool {
        self.vertices.len() as i64 - self.edges.len() as i64 + self.faces.len() as i64 == 2
    }

    fn point_on_cycle_edge(&self, f: FaceId, p: &ExactPoint) -> Option<usize> {
        let cycle = &self.faces[f].cycle;
        let n = cycle.len();
        for i in 0..n {
            let a = &self.vertices_exact[cycle[i]];
            let b = &self.vertices_exact[cycle[(i + 1) % n]];
            if on_exact_segment(a, b, p) {
                return Some(i);
            }
        }
        None
    }

    fn strictly_inside(&self, f: FaceId, p: &ExactPoint) -> bool {
        if self.faces[f].outer {
            return false;
        }
        if self.point_on_cycle_edge(f, p).is_some() {
            return false;
        }
        let cycle = &self.faces[f].cycle;
        let n = cycle.len();
        let mut parity = false;
        for i in 0..n {
            let a = &self.vertices_exact[cycle[i]];
            let b = &self.vertices_exact[cycle[(i + 1) % n]];
            if (a.y > p.y) != (b.y > p.y) {
                // x of the edge at height p.y, compared to p.x exactly.
                let t = (&p.y - &a.y) / (&b.y - &a.y);
                let x = &a.x + &t * (&b.x - &a.x);
                if x > p.x {
                    parity = !parity;
                }
            }
        }
        parity
    }

    /// Face containing `p`. Points exactly on a demarcation resolve to the
    /// face on the left of the demarcation's canonical direction (smaller
    /// endpoint to larger); points on a vertex resolve to the smallest
    /// incident interior face id.
    pub fn locate_face(&self, p: Point) -> Result<FaceId, GeometryError> {
        let ep = ExactPoint::from_point(p);
        // Vertex hit?
        if let Some(v) = self.vertices_exact.iter().position(|q| *q == ep) {
            let mut best: Option<FaceId> = None;
            for h in &self.half_edges {
                if h.from == v && !self.faces[h.face].outer {
                    best = Some(best.map_or(h.face, |b| b.min(h.face)));
                }
            }
            return best.ok_or(GeometryError::OutsideCanvas { x: p.x, y: p.y });
        }
        // Demarcation hit? Ties resolve to the face on the left of the
        // demarcation's canonical direction (smaller endpoint to larger).
        for (ei, e) in self.edges.iter().enumerate() {
            let a = &self.vertices_exact[e.v1];
            let b = &self.vertices_exact[e.v2];
            if on_exact_segment(a, b, &ep) {
                // Half edges of edge `ei` sit at 2*ei (v1->v2) and 2*ei+1.
                let h = if a <= b { 2 * ei } else { 2 * ei + 1 };
                let face = self.half_edges[h].face;
                if !self.faces[face].outer {
                    return Ok(face);
                }
                let twin_face = self.half_edges[self.half_edges[h].twin].face;
                if !self.faces[twin_face].outer {
                    return Ok(twin_face);
                }
                return Err(GeometryError::OutsideCanvas { x: p.x, y: p.y });
            }
        }
        for f in self.interior_faces() {
            if self.strictly_inside(f, &ep) {
                return Ok(f);
            }
        }
        Err(GeometryError::OutsideCanvas { x: p.x, y: p.y })
    }

    /// Deterministic interior point of a face: the polygon centroid when it
    /// is strictly interior, otherwise the midpoint of the longest interior
    /// chord of a fan triangulation.
    pub fn face_representative(&self, f: FaceId) -> Result<Point, GeometryError> {
        let poly = self.face_polygon(f);
        let n = poly.len();
        if n < 3 || self.faces[f].outer {
            return Err(GeometryError::NoRepresentative(f));
        }
        let centroid = polygon_centroid(&poly);
        if self.strictly_inside(f, &ExactPoint::from_point(centroid)) {
            return Ok(centroid);
        }
        let mut best: Option<(f64, Point)> = None;
        for i in 0..n {
            for j in (i + 2)..n {
                if i == 0 && j == n - 1 {
                    continue; // adjacent around the cycle
                }
                let mid = Point::new((poly[i].x + poly[j].x) / 2.0, (poly[i].y + poly[j].y) / 2.0);
                if !self.strictly_inside(f, &ExactPoint::from_point(mid)) {
                    continue;
                }
                let chord = super::Segment::new(poly[i], poly[j]);
                let crosses = (0..n).any(|k| {
                    let edge = super::Segment::new(poly[k], poly[(k + 1) % n]);
                    super::exact::segments_properly_cross(&chord, &edge)
                });
                if crosses {
                    continue;
                }
                let len = chord.length();
                if best.as_ref().map_or(true, |(l, _)| len > *l) {
                    best = Some((len, mid));
                }
            }
        }
        best.map(|(_, p)| p).ok_or(GeometryError::NoRepresentative(f))
    }

    /// Debug dump: faces as polygon vertex lists, optionally dual edges with
    /// their increment labels.
    pub fn to_debug_json(&self, dual: Option<&DualGraph>) -> serde_json::Value {
        let faces: Vec<serde_json::Value> = (0..self.faces.len())
            .map(|f| {
                let poly: Vec<[f64; 2]> =
                    self.face_polygon(f).iter().map(|p| [p.x, p.y]).collect();
                serde_json::json!({
                    "id": f,
                    "outer": self.faces[f].outer,
                    "polygon": poly,
                })
            })
            .collect();
        let mut doc = serde_json::json!({
            "vertices": self.vertices.iter().map(|p| [p.x, p.y]).collect::<Vec<_>>(),
            "faces": faces,
        });
        if let Some(d) = dual {
            let edges: Vec<serde_json::Value> = d
                .edges()
                .map(|(f, g, delta)| serde_json::json!({"f": f, "g": g, "delta": delta}))
                .collect();
            doc["dual"] = serde_json::Value::Array(edges);
        }
        doc
    }

    fn labels(&self, edge: usize) -> &[BoundaryLabel] {
        &self.edges[edge].labels
    }
}

fn on_exact_segment(a: &ExactPoint, b: &ExactPoint, p: &ExactPoint) -> bool {
    if orient2d_rational(a, b, p) != Orientation::Collinear {
        return false;
    }
    let (lox, hix) = if a.x <= b.x { (&a.x, &b.x) } else { (&b.x, &a.x) };
    let (loy, hiy) = if a.y <= b.y { (&a.y, &b.y) } else { (&b.y, &a.y) };
    &p.x >= lox && &p.x <= hix && &p.y >= loy && &p.y <= hiy
}

fn polygon_centroid(poly: &[Point]) -> Point {
    let n = poly.len();
    let mut area2 = 0.0;
    let (mut cx, mut cy) = (0.0, 0.0);
    for i in 0..n {
        let p = poly[i];
        let q = poly[(i + 1) % n];
        let w = p.x * q.y - q.x * p.y;
        area2 += w;
        cx += (p.x + q.x) * w;
        cy += (p.y + q.y) * w;
    }
    if area2.abs() < 1e-300 {
        // Nearly zero signed area; fall back to the vertex mean.
        let inv = 1.0 / n as f64;
        return Point::new(
            poly.iter().map(|p| p.x).sum::<f64>() * inv,
            poly.iter().map(|p| p.y).sum::<f64>() * inv,
        );
    }
    Point::new(cx / (3.0 * area2), cy / (3.0 * area2))
}

/// Builds the planar subdivision of `canvas` induced by the boundary set.
/// Boundary segments and rays are clipped to the canvas; ray geometry is kept
/// exactly collinear with the observer-source line.
pub fn build_arrangement(
    boundaries: &[LabeledBoundary],
    canvas: &ConvexPolygon,
) -> Result<Arrangement, GeometryError> {
    let mut pieces: Vec<RawPiece> = Vec::new();

    for (a, b) in canvas.edges() {
        pieces.push(RawPiece {
            a: ExactPoint::from_point(a),
            b: ExactPoint::from_point(b),
            label: BoundaryLabel::Canvas,
        });
    }

    for lb in boundaries {
        let seg = lb.boundary.edge();
        let u = ExactPoint::from_point(lb.boundary.observer());
        let pa = ExactPoint::from_point(seg.p);
        let pb = ExactPoint::from_point(seg.q);
        if let Some((ca, cb)) = canvas.clip_segment_exact(&pa, &pb) {
            pieces.push(RawPiece {
                a: ca,
                b: cb,
                label: BoundaryLabel::GraphEdge(lb.edge.clone()),
            });
        }
        for (origin, source) in [(&pa, lb.edge.a()), (&pb, lb.edge.b())] {
            let dir = (&origin.x - &u.x, &origin.y - &u.y);
            if dir.0.is_zero() && dir.1.is_zero() {
                continue;
            }
            if let Some((ra, rb)) = canvas.clip_ray_exact(origin, &dir) {
                pieces.push(RawPiece {
                    a: ra,
                    b: rb,
                    label: BoundaryLabel::SightRay {
                        observer: lb.observer.clone(),
                        source: source.clone(),
                    },
                });
            }
        }
    }

    // Split points per piece, from pairwise exact intersections.
    let mut splits: Vec<Vec<ExactPoint>> = vec![Vec::new(); pieces.len()];
    for i in 0..pieces.len() {
        for j in (i + 1)..pieces.len() {
            let pts = exact_segment_intersections(
                (&pieces[i].a, &pieces[i].b),
                (&pieces[j].a, &pieces[j].b),
            );
            for p in pts {
                splits[i].push(p.clone());
                splits[j].push(p);
            }
        }
    }

    // Elementary sub-edges between consecutive split points, merged by
    // endpoint pair so overlapping collinear pieces share labels.
    let mut vertex_ids: BTreeMap<ExactPoint, usize> = BTreeMap::new();
    let mut vertices_exact: Vec<ExactPoint> = Vec::new();
    let intern = |p: ExactPoint, vertices_exact: &mut Vec<ExactPoint>,
                      vertex_ids: &mut BTreeMap<ExactPoint, usize>| {
        if let Some(&id) = vertex_ids.get(&p) {
            return id;
        }
        let id = vertices_exact.len();
        vertices_exact.push(p.clone());
        vertex_ids.insert(p, id);
        id
    };

    let mut edge_map: IndexMap<(usize, usize), Vec<BoundaryLabel>> = IndexMap::new();
    for (piece, split) in pieces.iter().zip(splits.iter_mut()) {
        let dir = (&piece.b.x - &piece.a.x, &piece.b.y - &piece.a.y);
        let norm2 = &dir.0 * &dir.0 + &dir.1 * &dir.1;
        if norm2.is_zero() {
            continue;
        }
        let mut stations: Vec<(BigRational, ExactPoint)> = Vec::with_capacity(split.len() + 2);
        stations.push((BigRational::zero(), piece.a.clone()));
        stations.push((norm2.clone(), piece.b.clone()));
        for p in split.drain(..) {
            let t = (&p.x - &piece.a.x) * &dir.0 + (&p.y - &piece.a.y) * &dir.1;
            stations.push((t, p));
        }
        stations.sort_by(|l, r| l.0.cmp(&r.0));
        stations.dedup_by(|l, r| l.0 == r.0);
        for w in stations.windows(2) {
            let va = intern(w[0].1.clone(), &mut vertices_exact, &mut vertex_ids);
            let vb = intern(w[1].1.clone(), &mut vertices_exact, &mut vertex_ids);
            if va == vb {
                continue;
            }
            let key = (va.min(vb), va.max(vb));
            let labels = edge_map.entry(key).or_default();
            if !labels.contains(&piece.label) {
                labels.push(piece.label.clone());
            }
        }
    }

    let vertices: Vec<Point> = vertices_exact.iter().map(|p| p.to_point()).collect();

    // Half-edge structure with rotational ordering around each vertex.
    let mut edges: Vec<EdgeRec> = Vec::with_capacity(edge_map.len());
    let mut half_edges: Vec<HalfEdge> = Vec::with_capacity(edge_map.len() * 2);
    let mut outgoing: Vec<Vec<usize>> = vec![Vec::new(); vertices.len()];
    for ((v1, v2), labels) in edge_map {
        let _e = edges.len();
        let h1 = half_edges.len();
        let h2 = h1 + 1;
        half_edges.push(HalfEdge {
            from: v1,
            to: v2,
            twin: h2,
            next: usize::MAX,
            face: usize::MAX,
        });
        half_edges.push(HalfEdge {
            from: v2,
            to: v1,
            twin: h1,
            next: usize::MAX,
            face: usize::MAX,
        });
        outgoing[v1].push(h1);
        outgoing[v2].push(h2);
        edges.push(EdgeRec { v1, v2, labels });
    }

    for (v, list) in outgoing.iter_mut().enumerate() {
        let origin = vertices_exact[v].clone();
        list.sort_by(|&h1, &h2| {
            let d1 = direction(&origin, &vertices_exact[half_edges[h1].to]);
            let d2 = direction(&origin, &vertices_exact[half_edges[h2].to]);
            compare_directions(&d1, &d2)
        });
    }

    // next(h) = clockwise-next outgoing edge from twin(h)'s origin, which
    // traces every face with its interior on the left.
    let he_count = half_edges.len();
    for h in 0..he_count {
        let twin = half_edges[h].twin;
        let at = half_edges[twin].from;
        let ring = &outgoing[at];
        let pos = ring.iter().position(|&x| x == twin).expect("twin registered");
        let prev = ring[(pos + ring.len() - 1) % ring.len()];
        half_edges[h].next = prev;
    }

    // Trace faces.
    let mut faces: Vec<FaceData> = Vec::new();
    for h0 in 0..he_count {
        if half_edges[h0].face != usize::MAX {
            continue;
        }
        let id = faces.len();
        let mut cycle = Vec::new();
        let mut h = h0;
        loop {
            half_edges[h].face = id;
            cycle.push(half_edges[h].from);
            h = half_edges[h].next;
            if h == h0 {
                break;
            }
        }
        faces.push(FaceData { cycle, outer: false });
    }

    // The unique negative-area cycle is the outside of the canvas.
    let mut outer_face = usize::MAX;
    for (id, face) in faces.iter_mut().enumerate() {
        if exact_cycle_area_sign(&face.cycle, &vertices_exact) < 0 {
            face.outer = true;
            if outer_face != usize::MAX {
                return Err(GeometryError::Inconsistent(
                    "multiple outer faces; boundary pieces must be connected to the canvas".into(),
                ));
            }
            outer_face = id;
        }
    }
    if outer_face == usize::MAX {
        return Err(GeometryError::Inconsistent("no outer face found".into()));
    }

    let arr = Arrangement {
        vertices_exact,
        vertices,
        half_edges,
        edges,
        faces,
        outer_face,
    };
    if !arr.euler_check() {
        return Err(GeometryError::Inconsistent(format!(
            "Euler check failed: V={} E={} F={}",
            arr.vertex_count(),
            arr.edge_count(),
            arr.face_count()
        )));
    }
    Ok(arr)
}

fn direction(from: &ExactPoint, to: &ExactPoint) -> (BigRational, BigRational) {
    (&to.x - &from.x, &to.y - &from.y)
}

/// Counter-clockwise direction order starting from the positive x axis.
fn compare_directions(
    d1: &(BigRational, BigRational),
    d2: &(BigRational, BigRational),
) -> std::cmp::Ordering {
    let half = |d: &(BigRational, BigRational)| -> u8 {
        if d.1.is_positive() || (d.1.is_zero() && d.0.is_positive()) {
            0
        } else {
            1
        }
    };
    half(d1).cmp(&half(d2)).then_with(|| {
        let cross = &d1.0 * &d2.1 - &d1.1 * &d2.0;
        if cross.is_positive() {
            std::cmp::Ordering::Less
        } else if cross.is_negative() {
            std::cmp::Ordering::Greater
        } else {
            std::cmp::Ordering::Equal
        }
    })
}

fn exact_cycle_area_sign(cycle: &[usize], vertices: &[ExactPoint]) -> i32 {
    let mut area = BigRational::zero();
    let n = cycle.len();
    for i in 0..n {
        let p = &vertices[cycle[i]];
        let q = &vertices[cycle[(i + 1) % n]];
        area += &p.x * &q.y - &q.x * &p.y;
    }
    if area.is_positive() {
        1
    } else if area.is_negative() {
        -1
    } else {
        0
    }
}

/// All intersection points of two closed exact segments: one point for a
/// transversal meeting (including touches), or the overlap interval ends for
/// collinear overlaps.
fn exact_segment_intersections(
    s: (&ExactPoint, &ExactPoint),
    t: (&ExactPoint, &ExactPoint),
) -> Vec<ExactPoint> {
    let d1 = (&s.1.x - &s.0.x, &s.1.y - &s.0.y);
    let d2 = (&t.1.x - &t.0.x, &t.1.y - &t.0.y);
    let denom = &d1.0 * &d2.1 - &d1.1 * &d2.0;
    let w = (&t.0.x - &s.0.x, &t.0.y - &s.0.y);
    if !denom.is_zero() {
        let tt = (&w.0 * &d2.1 - &w.1 * &d2.0) / &denom;
        let ss = (&w.0 * &d1.1 - &w.1 * &d1.0) / &denom;
        let zero = BigRational::zero();
        let one = BigRational::from_integer(1.into());
        if tt >= zero && tt <= one && ss >= zero && ss <= one {
            return vec![ExactPoint {
                x: &s.0.x + &tt * &d1.0,
                y: &s.0.y + &tt * &d1.1,
            }];
        }
        return Vec::new();
    }
    // Parallel; collinear iff the offset is parallel too.
    let cross = &w.0 * &d1.1 - &w.1 * &d1.0;
    if !cross.is_zero() {
        return Vec::new();
    }
    // Collinear: overlap interval in s's parameter.
    let len2 = &d1.0 * &d1.0 + &d1.1 * &d1.1;
    if len2.is_zero() {
        return Vec::new();
    }
    let param = |p: &ExactPoint| (&p.x - &s.0.x) * &d1.0 + (&p.y - &s.0.y) * &d1.1;
    let (mut t0, mut t1) = (param(t.0), param(t.1));
    if t0 > t1 {
        std::mem::swap(&mut t0, &mut t1);
    }
    let lo = if t0 < BigRational::zero() { BigRational::zero() } else { t0 };
    let hi = if t1 > len2 { len2.clone() } else { t1 };
    if lo > hi {
        return Vec::new();
    }
    let at = |t: &BigRational| ExactPoint {
        x: &s.0.x + t / &len2 * &d1.0,
        y: &s.0.y + t / &len2 * &d1.1,
    };
    if lo == hi {
        vec![at(&lo)]
    } else {
        vec![at(&lo), at(&hi)]
    }
}

/// Dual graph of an arrangement: one node per interior face, one edge per
/// interior demarcation, carrying the crossing increment for moving `v`
/// across it.
pub struct DualGraph {
    adjacency: Vec<Vec<(FaceId, i64)>>,
}

impl DualGraph {
    pub fn neighbors(&self, f: FaceId) -> &[(FaceId, i64)] {
        &self.adjacency[f]
    }

    pub fn edges(&self) -> impl Iterator<Item = (FaceId, FaceId, i64)> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(f, list)| list.iter().map(move |&(g, d)| (f, g, d)))
    }

    /// Breadth-first accumulated increments from `start`. Increments are
    /// potential differences, so the path does not matter; BFS is used for
    /// determinism.
    pub fn accumulate_from(&self, start: FaceId) -> Vec<Option<i64>> {
        let mut delta: Vec<Option<i64>> = vec![None; self.adjacency.len()];
        delta[start] = Some(0);
        let mut queue = std::collections::VecDeque::new();
        queue.push_back(start);
        while let Some(f) = queue.pop_front() {
            let base = delta[f].expect("visited");
            for &(g, d) in &self.adjacency[f] {
                if delta[g].is_none() {
                    delta[g] = Some(base + d);
                    queue.push_back(g);
                }
            }
        }
        delta
    }
}


/// Builds the dual with per-edge increments for moving node `v`.
///
/// `g` is the edge universe represented in the arrangement (for H1, the local
/// subgraph). Demarcations on a graph edge `e` change the crossing count by
/// the difference of `v`-neighbor counts on the two sides of `e`'s line;
/// demarcations on a sight ray through `(observer, source)` change it by the
/// difference of `source`-neighbor counts, with the opposite sign. Neighbors
/// exactly on a demarcation line count for neither side (a warning is
/// logged). Canvas demarcations get no dual edge.
pub fn dual_with_increments(
    arr: &Arrangement,
    g: &PowerGraph,
    layout: &Layout,
    v: &NodeId,
) -> Result<DualGraph, GeometryError> {
    let mut adjacency: Vec<Vec<(FaceId, i64)>> = vec![Vec::new(); arr.faces.len()];
    for ei in 0..arr.edges.len() {
        let h = &arr.half_edges[2 * ei];
        let f_left = h.face;
        let f_right = arr.half_edges[h.twin].face;
        if arr.faces[f_left].outer || arr.faces[f_right].outer {
            continue;
        }
        let labels = arr.labels(ei);
        if labels.iter().all(|l| matches!(l, BoundaryLabel::Canvas)) {
            continue;
        }
        let a = &arr.vertices_exact[h.from];
        let b = &arr.vertices_exact[h.to];

        // Signed side of a node w.r.t. the directed demarcation a -> b:
        // +1 left (face side of h), -1 right.
        let side = |w: &NodeId| -> i32 {
            let p = layout.get(w).expect("layout covers universe");
            let ep = ExactPoint::from_point(p);
            let o = orient2d_rational(a, b, &ep);
            if o == Orientation::Collinear {
                log::warn!("node {w} lies exactly on a demarcation line; counted on neither side");
            }
            o.sign()
        };

        let mut delta_lr: i64 = 0; // crossing increment for left -> right
        for label in labels {
            match label {
                BoundaryLabel::Canvas => {}
                BoundaryLabel::GraphEdge(e) => {
                    // Rule for demarcations on a drawn edge: neighbors of v,
                    // excluding the edge's endpoints.
                    for u in g.neighbors(v) {
                        if e.touches(u) {
                            continue;
                        }
                        delta_lr += i64::from(side(u));
                    }
                }
                BoundaryLabel::SightRay { observer, source } => {
                    // Neighbors of the ray source, excluding v and the
                    // observer; sign is inverted relative to the edge rule.
                    for w in g.neighbors(source) {
                        if w == v || w == observer {
                            continue;
                        }
                        delta_lr -= i64::from(side(w));
                    }
                }
            }
        }
        adjacency[f_left].push((f_right, delta_lr));
        adjacency[f_right].push((f_left, -delta_lr));
    }
    for list in &mut adjacency {
        list.sort();
        list.dedup();
    }
    // A face pair adjacent along several demarcations must agree on the
    // increment; disagreement means the label bookkeeping is broken.
    for (f, list) in adjacency.iter().enumerate() {
        for w in list.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(GeometryError::Inconsistent(format!(
                    "faces {f} and {} disagree on increments {} vs {}",
                    w[0].0, w[0].1, w[1].1
                )));
            }
        }
    }
    Ok(DualGraph { adjacency })
}
