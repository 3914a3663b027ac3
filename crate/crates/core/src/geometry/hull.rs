//! Convex hulls, outward polygon offsets, and convex clipping of segments
//! and rays against a bounded canvas.

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::exact::{orient2d, rational_to_f64, ExactPoint, Orientation};
use super::{GeometryError, Point};

const DEGENERATE_HALF_WIDTH: f64 = 1e-6;

/// Convex polygon with vertices in counter-clockwise order.
#[derive(Clone, Debug)]
pub struct ConvexPolygon {
    vertices: Vec<Point>,
}

impl ConvexPolygon {
    pub fn new(vertices: Vec<Point>) -> Result<Self, GeometryError> {
        if vertices.len() < 3 {
            return Err(GeometryError::DegenerateCanvas);
        }
        let n = vertices.len();
        for i in 0..n {
            let o = orient2d(vertices[i], vertices[(i + 1) % n], vertices[(i + 2) % n]);
            if o != Orientation::CounterClockwise {
                return Err(GeometryError::DegenerateCanvas);
            }
        }
        Ok(ConvexPolygon { vertices })
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn edges(&self) -> impl Iterator<Item = (Point, Point)> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| (self.vertices[i], self.vertices[(i + 1) % n]))
    }

    /// Closed containment: boundary points count as inside.
    pub fn contains(&self, p: Point) -> bool {
        self.edges()
            .all(|(a, b)| orient2d(a, b, p) != Orientation::Clockwise)
    }

    /// Strict containment.
    pub fn contains_strict(&self, p: Point) -> bool {
        self.edges()
            .all(|(a, b)| orient2d(a, b, p) == Orientation::CounterClockwise)
    }

    pub fn diameter(&self) -> f64 {
        let mut d: f64 = 0.0;
        for (i, a) in self.vertices.iter().enumerate() {
            for b in &self.vertices[i + 1..] {
                d = d.max(a.distance(*b));
            }
        }
        d
    }

    /// Clips the closed segment `[a, b]` (given as exact points) to the
    /// polygon. Returns the parameter interval `[t0, t1]` of the retained
    /// part, or `None` when the segment misses the polygon.
    pub(crate) fn clip_parametric(
        &self,
        a: &ExactPoint,
        d: &(BigRational, BigRational),
        t_lo: BigRational,
        t_hi: BigRational,
    ) -> Option<(BigRational, BigRational)> {
        let mut lo = t_lo;
        let mut hi = t_hi;
        for (pa, pb) in self.edges() {
            // Inside condition: cross(pb - pa, x - pa) >= 0 for CCW polygons.
            let ea = ExactPoint::from_point(pa);
            let eb = ExactPoint::from_point(pb);
            let ex = &eb.x - &ea.x;
            let ey = &eb.y - &ea.y;
            // f(t) = cross(e, a + t*d - pa) = c0 + t*c1
            let c0 = &ex * (&a.y - &ea.y) - &ey * (&a.x - &ea.x);
            let c1 = &ex * &d.1 - &ey * &d.0;
            if c1.is_zero() {
                if c0.is_negative() {
                    return None;
                }
            } else {
                let t = -&c0 / &c1;
                if c1.is_positive() {
                    if t > lo {
                        lo = t;
                    }
                } else if t < hi {
                    hi = t;
                }
            }
            if lo > hi {
                return None;
            }
        }
        Some((lo, hi))
    }

    /// Exact clipped sub-segment of `[a, b]`, or `None`.
    pub(crate) fn clip_segment_exact(
        &self,
        a: &ExactPoint,
        b: &ExactPoint,
    ) -> Option<(ExactPoint, ExactPoint)> {
        let d = (&b.x - &a.x, &b.y - &a.y);
        let (lo, hi) = self.clip_parametric(a, &d, BigRational::zero(), BigRational::one())?;
        if lo >= hi {
            return None;
        }
        Some((param_point(a, &d, &lo), param_point(a, &d, &hi)))
    }

    /// Exact clipped part of the ray `a + t*d, t >= 0`, or `None`.
    pub(crate) fn clip_ray_exact(
        &self,
        a: &ExactPoint,
        d: &(BigRational, BigRational),
    ) -> Option<(ExactPoint, ExactPoint)> {
        // Upper parameter bound: far enough to pass every canvas vertex even
        // when the origin lies well outside the polygon.
        let origin = a.to_point();
        let reach = self
            .vertices
            .iter()
            .map(|v| origin.distance(*v))
            .fold(0.0f64, f64::max)
            .max(1.0);
        let dn = (rational_to_f64(&d.0), rational_to_f64(&d.1));
        let norm = dn.0.hypot(dn.1);
        if norm == 0.0 {
            return None;
        }
        let hi = BigRational::from_float((reach / norm) * 4.0 + 1.0).unwrap();
        let (lo, hi) = self.clip_parametric(a, d, BigRational::zero(), hi)?;
        if lo >= hi {
            return None;
        }
        Some((param_point(a, d, &lo), param_point(a, d, &hi)))
    }
}

fn param_point(a: &ExactPoint, d: &(BigRational, BigRational), t: &BigRational) -> ExactPoint {
    ExactPoint {
        x: &a.x + t * &d.0,
        y: &a.y + t * &d.1,
    }
}

/// Convex hull by monotone chain, counter-clockwise, collinear points dropped.
pub fn convex_hull(points: &[Point]) -> Result<Vec<Point>, GeometryError> {
    if points.is_empty() {
        return Err(GeometryError::EmptyPointSet);
    }
    let mut pts: Vec<Point> = points.to_vec();
    pts.sort_by(|a, b| a.x.partial_cmp(&b.x).unwrap().then(a.y.partial_cmp(&b.y).unwrap()));
    pts.dedup();
    if pts.len() < 3 {
        return Ok(pts);
    }
    let mut lower: Vec<Point> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2
            && orient2d(lower[lower.len() - 2], lower[lower.len() - 1], p)
                != Orientation::CounterClockwise
        {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<Point> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2
            && orient2d(upper[upper.len() - 2], upper[upper.len() - 1], p)
                != Orientation::CounterClockwise
        {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    Ok(lower)
}

/// Convex hull expanded outward by `r`: each hull edge's supporting line is
/// shifted by `r` and adjacent shifted lines are intersected (miter joins).
/// Degenerate hulls (all points collinear) fall back to the bounding box
/// expanded by `max(r, eps)` on every side.
pub fn hull_and_offset(points: &[Point], r: f64) -> Result<ConvexPolygon, GeometryError> {
    if r < 0.0 {
        return Err(GeometryError::NegativeRadius(r));
    }
    let hull = convex_hull(points)?;
    if hull.len() < 3 {
        let pad = r.max(DEGENERATE_HALF_WIDTH);
        let (mut lo, mut hi) = (hull[0], hull[0]);
        for p in &hull {
            lo.x = lo.x.min(p.x);
            lo.y = lo.y.min(p.y);
            hi.x = hi.x.max(p.x);
            hi.y = hi.y.max(p.y);
        }
        return ConvexPolygon::new(vec![
            Point::new(lo.x - pad, lo.y - pad),
            Point::new(hi.x + pad, lo.y - pad),
            Point::new(hi.x + pad, hi.y + pad),
            Point::new(lo.x - pad, hi.y + pad),
        ]);
    }
    if r == 0.0 {
        return ConvexPolygon::new(hull);
    }
    let n = hull.len();
    // Shifted supporting line of edge i: passes a_i + r*n_i with the same
    // direction; n_i is the outward normal (right of the CCW direction).
    let shifted: Vec<(Point, Point)> = (0..n)
        .map(|i| {
            let a = hull[i];
            let b = hull[(i + 1) % n];
            let d = b - a;
            let len = d.norm();
            let normal = Point::new(d.y / len, -d.x / len);
            (a + normal * r, b + normal * r)
        })
        .collect();
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let (a1, b1) = shifted[i];
        let (a2, b2) = shifted[(i + 1) % n];
        out.push(line_intersection(a1, b1, a2, b2).ok_or(GeometryError::DegenerateCanvas)?);
    }
    ConvexPolygon::new(out)
}

fn line_intersection(a1: Point, b1: Point, a2: Point, b2: Point) -> Option<Point> {
    let d1 = b1 - a1;
    let d2 = b2 - a2;
    let denom = d1.x * d2.y - d1.y * d2.x;
    if denom.abs() < 1e-300 {
        return None;
    }
    let t = ((a2.x - a1.x) * d2.y - (a2.y - a1.y) * d2.x) / denom;
    Some(Point::new(a1.x + t * d1.x, a1.y + t * d1.y))
}
