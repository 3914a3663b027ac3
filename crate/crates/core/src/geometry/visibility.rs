//! Visibility regions: the locus of positions `p` such that a segment from
//! `p` to the observer avoids a fixed edge. The boundary is the edge itself
//! plus two rays leaving the edge endpoints away from the observer.

use super::exact::{orient2d, segments_touch, Orientation};
use super::{GeometryError, Point, Ray, Segment};

/// Boundary of the visibility region of observer `u` against edge `e`.
///
/// A point is inside the region exactly when the segment from it to the
/// observer shares no point with the edge. The complement (the shadow wedge
/// behind the edge) is bounded by the edge and the two rays.
#[derive(Clone, Debug)]
pub struct VisibilityBoundary {
    observer: Point,
    edge: Segment,
}

impl VisibilityBoundary {
    pub fn observer(&self) -> Point {
        self.observer
    }

    pub fn edge(&self) -> Segment {
        self.edge
    }

    /// Ray from the first edge endpoint, directed away from the observer.
    pub fn ray_p(&self) -> Ray {
        Ray::new(self.edge.p, self.edge.p - self.observer)
    }

    /// Ray from the second edge endpoint, directed away from the observer.
    pub fn ray_q(&self) -> Ray {
        Ray::new(self.edge.q, self.edge.q - self.observer)
    }

    /// Membership by orientation tests, not by segment intersection. `p` is
    /// in the region exactly when the segment from `p` to the observer shares
    /// no point with the closed edge; boundary points of the region (on the
    /// edge or on a shadow ray) are therefore outside.
    pub fn contains(&self, p: Point) -> bool {
        let u = self.observer;
        let (a, b) = (self.edge.p, self.edge.q);
        let side_u = orient2d(a, b, u).sign();
        debug_assert_ne!(side_u, 0, "constructor rejects collinear observers");
        let side_p = orient2d(a, b, p).sign();
        if side_p == side_u {
            return true; // strictly on the observer's side of the edge line
        }
        if side_p == 0 {
            // On the edge line: visible iff outside the closed edge segment.
            let inside_box = p.x >= a.x.min(b.x)
                && p.x <= a.x.max(b.x)
                && p.y >= a.y.min(b.y)
                && p.y <= a.y.max(b.y);
            return !inside_box;
        }
        // Strictly beyond the edge: visible iff strictly outside the closed
        // shadow wedge between the two rays.
        let side_b_of_ua = orient2d(u, a, b).sign();
        let pa = orient2d(u, a, p).sign();
        if pa == 0 {
            return false; // on the ray beyond `a`
        }
        if pa != side_b_of_ua {
            return true;
        }
        let side_a_of_ub = orient2d(u, b, a).sign();
        let pb = orient2d(u, b, p).sign();
        if pb == 0 {
            return false; // on the ray beyond `b`
        }
        pb != side_a_of_ub
    }

    /// Oracle form of the membership test: direct segment intersection.
    pub fn contains_by_intersection(&self, p: Point) -> bool {
        if p == self.observer {
            return true;
        }
        !segments_touch(&Segment::new(p, self.observer), &self.edge)
    }
}

/// Builds the visibility boundary of `u` against `e`. Fails when `u` lies on
/// the line through `e`: the shadow degenerates to a set with empty interior
/// (callers may treat the whole plane as visible or perturb the input).
pub fn visibility_boundary(u: Point, e: Segment) -> Result<VisibilityBoundary, GeometryError> {
    if e.is_degenerate() {
        return Err(GeometryError::ZeroLengthSegment { x: e.p.x, y: e.p.y });
    }
    if orient2d(e.p, e.q, u) == Orientation::Collinear {
        return Err(GeometryError::CollinearObserver);
    }
    Ok(VisibilityBoundary { observer: u, edge: e })
}
