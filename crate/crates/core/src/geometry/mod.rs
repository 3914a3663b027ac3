//! Computational geometry for the layout pipeline: exact predicates, the
//! segment intersection sweep, visibility-region boundaries, bounded-canvas
//! arrangements with crossing-increment duals, convex hulls and offsets.
//!
//! Predicates are evaluated with a floating-point filter backed by exact
//! rational arithmetic; constructed points are rounded to doubles only at the
//! module boundary.

mod arrangement;
mod exact;
mod hull;
mod sweep;
mod visibility;

pub use arrangement::{
    build_arrangement, dual_with_increments, Arrangement, BoundaryLabel, DualGraph, FaceId,
    LabeledBoundary,
};
pub use hull::{convex_hull, hull_and_offset, ConvexPolygon};
pub use sweep::{count_crossings, pairwise_intersections, sweep_intersections, Crossing, CrossingReport};
pub use visibility::{visibility_boundary, VisibilityBoundary};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GeometryError {
    #[error("zero-length segment at ({x}, {y})")]
    ZeroLengthSegment { x: f64, y: f64 },
    #[error("segments {a} and {b} have numerically coincident distinct endpoints")]
    CoincidentEndpoints { a: usize, b: usize },
    #[error("observer lies on the line through the edge; visibility region degenerates")]
    CollinearObserver,
    #[error("canvas polygon is degenerate")]
    DegenerateCanvas,
    #[error("offset radius must be non-negative, got {0}")]
    NegativeRadius(f64),
    #[error("point ({x}, {y}) lies outside the canvas")]
    OutsideCanvas { x: f64, y: f64 },
    #[error("hull requires at least one point")]
    EmptyPointSet,
    #[error("no face representative found for face {0}")]
    NoRepresentative(usize),
    #[error("arrangement is inconsistent: {0}")]
    Inconsistent(String),
}

#[derive(Clone, Copy, PartialEq, Debug, Default, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn distance(&self, other: Point) -> f64 {
        (*self - other).norm()
    }

    pub fn norm(&self) -> f64 {
        self.x.hypot(self.y)
    }

    /// Angle to the positive x axis in degrees, in `[0, 360)`.
    pub fn angle_deg(&self) -> f64 {
        let a = self.y.atan2(self.x).to_degrees();
        if a < 0.0 {
            a + 360.0
        } else {
            a
        }
    }
}

impl std::ops::Sub for Point {
    type Output = Point;
    fn sub(self, rhs: Point) -> Point {
        Point::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl std::ops::Add for Point {
    type Output = Point;
    fn add(self, rhs: Point) -> Point {
        Point::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl std::ops::Mul<f64> for Point {
    type Output = Point;
    fn mul(self, rhs: f64) -> Point {
        Point::new(self.x * rhs, self.y * rhs)
    }
}

#[derive(Clone, Copy, PartialEq, Debug)]
pub struct Segment {
    pub p: Point,
    pub q: Point,
}

impl Segment {
    pub fn new(p: Point, q: Point) -> Self {
        Segment { p, q }
    }

    pub fn length(&self) -> f64 {
        self.p.distance(self.q)
    }

    pub fn midpoint(&self) -> Point {
        Point::new((self.p.x + self.q.x) / 2.0, (self.p.y + self.q.y) / 2.0)
    }

    pub fn is_degenerate(&self) -> bool {
        self.p == self.q
    }

    pub fn distance_to_point(&self, r: Point) -> f64 {
        let d = self.q - self.p;
        let len2 = d.x * d.x + d.y * d.y;
        if len2 == 0.0 {
            return self.p.distance(r);
        }
        let t = ((r.x - self.p.x) * d.x + (r.y - self.p.y) * d.y) / len2;
        let t = t.clamp(0.0, 1.0);
        r.distance(Point::new(self.p.x + t * d.x, self.p.y + t * d.y))
    }
}

/// Half-line from `origin` along `direction` (unit length).
#[derive(Clone, Copy, Debug)]
pub struct Ray {
    pub origin: Point,
    pub direction: Point,
}

impl Ray {
    /// Direction is normalized; panics on a zero vector.
    pub fn new(origin: Point, direction: Point) -> Self {
        let n = direction.norm();
        assert!(n > 0.0, "ray direction must be nonzero");
        Ray {
            origin,
            direction: Point::new(direction.x / n, direction.y / n),
        }
    }
}

pub(crate) use exact::segments_properly_cross;
