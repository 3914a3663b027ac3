//! Segment intersection sweep: endpoint events in lexicographic order drive
//! an active set; each segment is tested against the set once, on insertion.
//! All pair decisions go through the exact predicates, so the reported pair
//! set matches exhaustive enumeration exactly.

use super::exact::{proper_crossing_point, segments_properly_cross};
use super::{GeometryError, Point, Segment};

/// Distinct endpoints closer than this are treated as a modeling defect.
const COINCIDENT_ENDPOINT_EPS: f64 = 1e-12;

/// One proper interior crossing between two input segments.
#[derive(Clone, Debug, PartialEq)]
pub struct Crossing {
    /// Indices into the input slice, `segments.0 < segments.1`.
    pub segments: (usize, usize),
    pub point: Point,
}

/// Deduplicated proper crossings, sorted by index pair.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct CrossingReport {
    pub pairs: Vec<Crossing>,
}

impl CrossingReport {
    pub fn count(&self) -> usize {
        self.pairs.len()
    }

    pub fn pair_set(&self) -> Vec<(usize, usize)> {
        self.pairs.iter().map(|c| c.segments).collect()
    }
}

fn validate(segments: &[Segment]) -> Result<(), GeometryError> {
    for s in segments {
        if s.is_degenerate() {
            return Err(GeometryError::ZeroLengthSegment { x: s.p.x, y: s.p.y });
        }
    }
    // Scan endpoints for numerically coincident but distinct points.
    let mut endpoints: Vec<(Point, usize)> = Vec::with_capacity(segments.len() * 2);
    for (i, s) in segments.iter().enumerate() {
        endpoints.push((s.p, i));
        endpoints.push((s.q, i));
    }
    endpoints.sort_by(|a, b| {
        a.0.x
            .partial_cmp(&b.0.x)
            .unwrap()
            .then(a.0.y.partial_cmp(&b.0.y).unwrap())
    });
    for i in 0..endpoints.len() {
        let (p, si) = endpoints[i];
        for &(q, sj) in endpoints[i + 1..].iter() {
            if q.x - p.x >= COINCIDENT_ENDPOINT_EPS {
                break;
            }
            if p != q && p.distance(q) < COINCIDENT_ENDPOINT_EPS {
                return Err(GeometryError::CoincidentEndpoints {
                    a: si.min(sj),
                    b: si.max(sj),
                });
            }
        }
    }
    Ok(())
}

fn lex_min_max(s: &Segment) -> (Point, Point) {
    let pk = (s.p.x, s.p.y);
    let qk = (s.q.x, s.q.y);
    if pk <= qk {
        (s.p, s.q)
    } else {
        (s.q, s.p)
    }
}

/// Reports every unordered pair of input segments with a proper interior
/// intersection. Segments sharing an endpoint are never reported.
pub fn sweep_intersections(segments: &[Segment]) -> Result<CrossingReport, GeometryError> {
    validate(segments)?;

    #[derive(Clone, Copy, PartialEq)]
    enum Kind {
        Enter,
        Exit,
    }
    let mut events: Vec<(f64, f64, Kind, usize)> = Vec::with_capacity(segments.len() * 2);
    for (i, s) in segments.iter().enumerate() {
        let (lo, hi) = lex_min_max(s);
        events.push((lo.x, lo.y, Kind::Enter, i));
        events.push((hi.x, hi.y, Kind::Exit, i));
    }
    // Exits sort before enters at the same point; a pair meeting only at a
    // shared event point cannot properly cross.
    events.sort_by(|a, b| {
        a.0.partial_cmp(&b.0)
            .unwrap()
            .then(a.1.partial_cmp(&b.1).unwrap())
            .then_with(|| match (a.2, b.2) {
                (Kind::Exit, Kind::Enter) => std::cmp::Ordering::Less,
                (Kind::Enter, Kind::Exit) => std::cmp::Ordering::Greater,
                _ => std::cmp::Ordering::Equal,
            })
            .then(a.3.cmp(&b.3))
    });

    let mut active: Vec<usize> = Vec::new();
    let mut pairs: Vec<Crossing> = Vec::new();
    for (_, _, kind, idx) in events {
        match kind {
            Kind::Exit => {
                if let Some(pos) = active.iter().position(|&a| a == idx) {
                    active.swap_remove(pos);
                }
            }
            Kind::Enter => {
                let s = &segments[idx];
                for &other in &active {
                    let t = &segments[other];
                    if segments_properly_cross(s, t) {
                        let point = proper_crossing_point(s, t).to_point();
                        pairs.push(Crossing {
                            segments: (idx.min(other), idx.max(other)),
                            point,
                        });
                    }
                }
                active.push(idx);
            }
        }
    }
    pairs.sort_by_key(|c| c.segments);
    pairs.dedup_by_key(|c| c.segments);
    Ok(CrossingReport { pairs })
}

/// Exhaustive pairwise enumeration. Kept as the independent oracle for the
/// sweep; do not reroute it through `sweep_intersections`.
pub fn pairwise_intersections(segments: &[Segment]) -> Result<CrossingReport, GeometryError> {
    validate(segments)?;
    let mut pairs = Vec::new();
    for i in 0..segments.len() {
        for j in (i + 1)..segments.len() {
            if segments_properly_cross(&segments[i], &segments[j]) {
                let point = proper_crossing_point(&segments[i], &segments[j]).to_point();
                pairs.push(Crossing {
                    segments: (i, j),
                    point,
                });
            }
        }
    }
    Ok(CrossingReport { pairs })
}

/// Number of properly crossing segment pairs.
pub fn count_crossings(segments: &[Segment]) -> Result<usize, GeometryError> {
    Ok(sweep_intersections(segments)?.count())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn seg(ax: f64, ay: f64, bx: f64, by: f64) -> Segment {
        Segment::new(Point::new(ax, ay), Point::new(bx, by))
    }

    #[test]
    fn symmetric_x_reports_one_pair() {
        let segs = [seg(0.0, 0.0, 2.0, 2.0), seg(0.0, 2.0, 2.0, 0.0)];
        let report = sweep_intersections(&segs).unwrap();
        assert_eq!(report.count(), 1);
        assert_eq!(report.pairs[0].point, Point::new(1.0, 1.0));
    }

    #[test]
    fn parallel_disjoint_is_empty() {
        let segs = [seg(0.0, 0.0, 1.0, 0.0), seg(0.0, 1.0, 1.0, 1.0)];
        assert_eq!(sweep_intersections(&segs).unwrap().count(), 0);
    }

    #[test]
    fn shared_endpoint_not_reported() {
        let segs = [seg(0.0, 0.0, 1.0, 1.0), seg(1.0, 1.0, 2.0, 0.0)];
        assert_eq!(sweep_intersections(&segs).unwrap().count(), 0);
    }

    #[test]
    fn zero_length_rejected() {
        let segs = [seg(0.0, 0.0, 0.0, 0.0)];
        assert!(matches!(
            sweep_intersections(&segs),
            Err(GeometryError::ZeroLengthSegment { .. })
        ));
    }

    #[test]
    fn coincident_endpoints_rejected() {
        let segs = [seg(0.0, 0.0, 1.0, 0.0), seg(1e-13, 0.0, 0.0, 1.0)];
        assert!(matches!(
            sweep_intersections(&segs),
            Err(GeometryError::CoincidentEndpoints { .. })
        ));
    }

    #[test]
    fn vertical_segments_handled() {
        let segs = [seg(1.0, -1.0, 1.0, 1.0), seg(0.0, 0.0, 2.0, 0.0)];
        let report = sweep_intersections(&segs).unwrap();
        assert_eq!(report.count(), 1);
        assert_eq!(report.pairs[0].point, Point::new(1.0, 0.0));
    }

    #[test]
    fn matches_pairwise_oracle_on_random_sets() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let segs: Vec<Segment> = (0..50)
                .map(|_| {
                    seg(
                        rng.gen_range(-10.0..10.0),
                        rng.gen_range(-10.0..10.0),
                        rng.gen_range(-10.0..10.0),
                        rng.gen_range(-10.0..10.0),
                    )
                })
                .collect();
            let fast = sweep_intersections(&segs).unwrap();
            let slow = pairwise_intersections(&segs).unwrap();
            assert_eq!(fast.pair_set(), slow.pair_set());
        }
    }
}
