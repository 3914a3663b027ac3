//! Exact geometric predicates: fast floating-point evaluation with an error
//! bound filter, falling back to arbitrary-precision rational arithmetic when
//! the filter cannot certify the sign.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use super::{Point, Segment};

/// Error bound constant for the orientation filter (Shewchuk's A-stage
/// coefficient for IEEE doubles).
const CCW_ERRBOUND_A: f64 = (3.0 + 16.0 * f64::EPSILON) * f64::EPSILON;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Orientation {
    Clockwise,
    Collinear,
    CounterClockwise,
}

impl Orientation {
    pub fn sign(self) -> i32 {
        match self {
            Orientation::Clockwise => -1,
            Orientation::Collinear => 0,
            Orientation::CounterClockwise => 1,
        }
    }
}

fn rat(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite coordinate")
}

/// Exact rational point. Intersection points are kept in this form inside the
/// arrangement so that coincident constructions compare equal.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct ExactPoint {
    pub x: BigRational,
    pub y: BigRational,
}

impl ExactPoint {
    pub fn from_point(p: Point) -> Self {
        ExactPoint {
            x: rat(p.x),
            y: rat(p.y),
        }
    }

    pub fn to_point(&self) -> Point {
        Point::new(rational_to_f64(&self.x), rational_to_f64(&self.y))
    }
}

pub fn rational_to_f64(r: &BigRational) -> f64 {
    let num = r.numer();
    let den = r.denom();
    // Scale into f64 range via bit lengths to avoid overflow on huge numerators.
    let nb = num.bits() as i64;
    let db = den.bits() as i64;
    let shift = (nb.max(db) - 60).max(0);
    let num = num >> shift;
    let den = den >> shift;
    let n = bigint_to_f64(&num);
    let d = bigint_to_f64(&den);
    if d == 0.0 {
        return 0.0;
    }
    n / d
}

fn bigint_to_f64(v: &BigInt) -> f64 {
    use num_traits::ToPrimitive;
    v.to_f64().unwrap_or(0.0)
}

/// Sign of the cross product `(b - a) x (c - a)`: counter-clockwise when
/// positive, i.e. `c` lies to the left of the directed line `a -> b`.
pub fn orient2d(a: Point, b: Point, c: Point) -> Orientation {
    let detleft = (b.x - a.x) * (c.y - a.y);
    let detright = (b.y - a.y) * (c.x - a.x);
    let det = detleft - detright;

    let detsum = if detleft > 0.0 {
        if detright <= 0.0 {
            return sign_to_orientation(det);
        }
        detleft + detright
    } else if detleft < 0.0 {
        if detright >= 0.0 {
            return sign_to_orientation(det);
        }
        -detleft - detright
    } else {
        return sign_to_orientation(det);
    };

    let errbound = CCW_ERRBOUND_A * detsum;
    if det >= errbound || -det >= errbound {
        return sign_to_orientation(det);
    }
    orient2d_exact(a, b, c)
}

fn sign_to_orientation(det: f64) -> Orientation {
    if det > 0.0 {
        Orientation::CounterClockwise
    } else if det < 0.0 {
        Orientation::Clockwise
    } else {
        Orientation::Collinear
    }
}

fn orient2d_exact(a: Point, b: Point, c: Point) -> Orientation {
    let (ax, ay) = (rat(a.x), rat(a.y));
    let (bx, by) = (rat(b.x), rat(b.y));
    let (cx, cy) = (rat(c.x), rat(c.y));
    let det = (&bx - &ax) * (&cy - &ay) - (&by - &ay) * (&cx - &ax);
    if det.is_positive() {
        Orientation::CounterClockwise
    } else if det.is_negative() {
        Orientation::Clockwise
    } else {
        Orientation::Collinear
    }
}

/// Exact orientation for rational inputs (used inside the arrangement where
/// constructed points are already rational).
pub fn orient2d_rational(a: &ExactPoint, b: &ExactPoint, c: &ExactPoint) -> Orientation {
    let det = (&b.x - &a.x) * (&c.y - &a.y) - (&b.y - &a.y) * (&c.x - &a.x);
    if det.is_positive() {
        Orientation::CounterClockwise
    } else if det.is_negative() {
        Orientation::Clockwise
    } else {
        Orientation::Collinear
    }
}

/// True when the two segments cross at a single point strictly interior to
/// both. Shared endpoints, T-junctions and collinear overlaps do not count.
pub fn segments_properly_cross(s: &Segment, t: &Segment) -> bool {
    let d1 = orient2d(s.p, s.q, t.p).sign();
    let d2 = orient2d(s.p, s.q, t.q).sign();
    if d1 * d2 >= 0 {
        return false;
    }
    let d3 = orient2d(t.p, t.q, s.p).sign();
    let d4 = orient2d(t.p, t.q, s.q).sign();
    d3 * d4 < 0
}

/// Intersection point of two properly crossing segments, exact.
pub fn proper_crossing_point(s: &Segment, t: &Segment) -> ExactPoint {
    let p = ExactPoint::from_point(s.p);
    let r = (
        rat(s.q.x) - rat(s.p.x),
        rat(s.q.y) - rat(s.p.y),
    );
    let q = ExactPoint::from_point(t.p);
    let u = (
        rat(t.q.x) - rat(t.p.x),
        rat(t.q.y) - rat(t.p.y),
    );
    let denom = &r.0 * &u.1 - &r.1 * &u.0;
    debug_assert!(!denom.is_zero(), "parallel segments cannot properly cross");
    let qp = (&q.x - &p.x, &q.y - &p.y);
    let tt = (&qp.0 * &u.1 - &qp.1 * &u.0) / denom;
    ExactPoint {
        x: &p.x + &tt * &r.0,
        y: &p.y + &tt * &r.1,
    }
}

/// True when `p` lies on the closed segment, including endpoints.
pub fn point_on_segment(seg: &Segment, p: Point) -> bool {
    if orient2d(seg.p, seg.q, p) != Orientation::Collinear {
        return false;
    }
    p.x >= seg.p.x.min(seg.q.x)
        && p.x <= seg.p.x.max(seg.q.x)
        && p.y >= seg.p.y.min(seg.q.y)
        && p.y <= seg.p.y.max(seg.q.y)
}

/// True when the closed segments share at least one point (any contact).
pub fn segments_touch(s: &Segment, t: &Segment) -> bool {
    let d1 = orient2d(s.p, s.q, t.p).sign();
    let d2 = orient2d(s.p, s.q, t.q).sign();
    let d3 = orient2d(t.p, t.q, s.p).sign();
    let d4 = orient2d(t.p, t.q, s.q).sign();
    if d1 * d2 < 0 && d3 * d4 < 0 {
        return true;
    }
    (d1 == 0 && point_on_segment(s, t.p))
        || (d2 == 0 && point_on_segment(s, t.q))
        || (d3 == 0 && point_on_segment(t, s.p))
        || (d4 == 0 && point_on_segment(t, s.q))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn orientation_basics() {
        let a = Point::new(0.0, 0.0);
        let b = Point::new(1.0, 0.0);
        assert_eq!(orient2d(a, b, Point::new(0.5, 1.0)), Orientation::CounterClockwise);
        assert_eq!(orient2d(a, b, Point::new(0.5, -1.0)), Orientation::Clockwise);
        assert_eq!(orient2d(a, b, Point::new(2.0, 0.0)), Orientation::Collinear);
    }

    #[test]
    fn near_degenerate_orientation_is_exact() {
        // Classic filter-buster: points nearly collinear at double precision.
        let a = Point::new(0.5, 0.5);
        let b = Point::new(12.0, 12.0);
        let c = Point::new(24.0, 24.0);
        assert_eq!(orient2d(a, b, c), Orientation::Collinear);
        let c_up = Point::new(24.0, 24.000000000000004);
        assert_eq!(orient2d(a, b, c_up), Orientation::CounterClockwise);
    }

    #[test]
    fn proper_cross_excludes_shared_endpoints() {
        let s = Segment::new(Point::new(0.0, 0.0), Point::new(2.0, 2.0));
        let t = Segment::new(Point::new(0.0, 2.0), Point::new(2.0, 0.0));
        assert!(segments_properly_cross(&s, &t));
        let shared = Segment::new(Point::new(0.0, 0.0), Point::new(3.0, -1.0));
        assert!(!segments_properly_cross(&s, &shared));
        // T-junction: endpoint of one interior to the other.
        let tee = Segment::new(Point::new(1.0, 1.0), Point::new(5.0, 1.0));
        assert!(!segments_properly_cross(&s, &tee));
    }

    #[test]
    fn crossing_point_exact_symmetric_x() {
        let s = Segment::new(Point::new(0.0, 0.0), Point::new(2.0, 2.0));
        let t = Segment::new(Point::new(0.0, 2.0), Point::new(2.0, 0.0));
        let p = proper_crossing_point(&s, &t).to_point();
        assert_eq!(p, Point::new(1.0, 1.0));
    }

    proptest! {
        #[test]
        fn proper_cross_is_symmetric(
            ax in -10.0..10.0f64, ay in -10.0..10.0f64,
            bx in -10.0..10.0f64, by in -10.0..10.0f64,
            cx in -10.0..10.0f64, cy in -10.0..10.0f64,
            dx in -10.0..10.0f64, dy in -10.0..10.0f64,
        ) {
            let s = Segment::new(Point::new(ax, ay), Point::new(bx, by));
            let t = Segment::new(Point::new(cx, cy), Point::new(dx, dy));
            prop_assume!(!s.is_degenerate() && !t.is_degenerate());
            prop_assert_eq!(segments_properly_cross(&s, &t), segments_properly_cross(&t, &s));
            if segments_properly_cross(&s, &t) {
                let p = proper_crossing_point(&s, &t).to_point();
                prop_assert!(s.distance_to_point(p) < 1e-9);
                prop_assert!(t.distance_to_point(p) < 1e-9);
            }
        }
    }
}
