use super::point::Point2;
use super::polyline::Polyline;

/// Tolerance used to merge intersections reported by adjacent segments.
const MERGE_EPSILON: f64 = 1e-9;

/// One crossing between two polylines.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Crossing {
    pub point: Point2,
    /// Arc length along the first curve at which the crossing occurs.
    pub along_a: f64,
    /// Arc length along the second curve.
    pub along_b: f64,
    /// Segment of the second curve that was hit, and the position within it.
    pub b_segment: usize,
    pub b_local: f64,
}

struct Hit {
    a_lo: f64,
    a_hi: f64,
    crossing: Crossing,
}

/// All crossings of `a` with `b`, ordered by arc length along `a`.
///
/// A crossing through a shared segment endpoint is reported once, and a
/// collinear overlap (including one spanning several segments) counts as a
/// single crossing.
pub fn crossings(a: &Polyline, b: &Polyline) -> Vec<Crossing> {
    if !boxes_overlap(a.points(), b.points()) {
        return Vec::new();
    }
    let cum_a = a.cumulative();
    let cum_b = b.cumulative();
    let mut hits = Vec::new();
    for (i, sa) in a.points().windows(2).enumerate() {
        for (j, sb) in b.points().windows(2).enumerate() {
            let Some(h) = segment_hit(sa[0], sa[1], sb[0], sb[1]) else {
                continue;
            };
            let len_a = cum_a[i + 1] - cum_a[i];
            let len_b = cum_b[j + 1] - cum_b[j];
            let (t_lo, t_hi, u) = match h {
                SegHit::Point { t, u } => (t, t, u),
                SegHit::Overlap { t_lo, t_hi, u } => (t_lo, t_hi, u),
            };
            hits.push(Hit {
                a_lo: cum_a[i] + t_lo * len_a,
                a_hi: cum_a[i] + t_hi * len_a,
                crossing: Crossing {
                    point: sa[0].lerp(sa[1], t_lo),
                    along_a: cum_a[i] + t_lo * len_a,
                    along_b: cum_b[j] + u * len_b,
                    b_segment: j,
                    b_local: u,
                },
            });
        }
    }
    hits.sort_by(|x, y| {
        x.a_lo
            .total_cmp(&y.a_lo)
            .then(x.crossing.along_b.total_cmp(&y.crossing.along_b))
    });
    let mut merged: Vec<Hit> = Vec::with_capacity(hits.len());
    for h in hits {
        if let Some(last) = merged.last_mut() {
            if h.a_lo <= last.a_hi + MERGE_EPSILON
                && (h.crossing.point.distance(last.crossing.point) <= MERGE_EPSILON
                    || h.a_hi > h.a_lo
                    || last.a_hi > last.a_lo)
            {
                last.a_hi = last.a_hi.max(h.a_hi);
                continue;
            }
        }
        merged.push(h);
    }
    merged.into_iter().map(|h| h.crossing).collect()
}

pub fn count_crossings(a: &Polyline, b: &Polyline) -> usize {
    crossings(a, b).len()
}

enum SegHit {
    Point { t: f64, u: f64 },
    Overlap { t_lo: f64, t_hi: f64, u: f64 },
}

fn segment_hit(p0: Point2, p1: Point2, q0: Point2, q1: Point2) -> Option<SegHit> {
    let r = p1 - p0;
    let s = q1 - q0;
    let qp = q0 - p0;
    let denom = r.cross(s);
    let scale = r.norm() * s.norm();
    const EPS: f64 = 1e-12;
    if denom.abs() <= EPS * scale {
        // parallel; only collinear overlaps count
        if qp.cross(r).abs() > EPS * r.norm() * (qp.norm() + r.norm()) {
            return None;
        }
        let rr = r.norm_squared();
        let t0 = qp.dot(r) / rr;
        let t1 = (q1 - p0).dot(r) / rr;
        let lo = t0.min(t1).max(0.0);
        let hi = t0.max(t1).min(1.0);
        if lo > hi + EPS {
            return None;
        }
        let start = p0 + r * lo;
        let ss = s.norm_squared();
        let u = ((start - q0).dot(s) / ss).clamp(0.0, 1.0);
        return Some(SegHit::Overlap {
            t_lo: lo,
            t_hi: hi.max(lo),
            u,
        });
    }
    let t = qp.cross(s) / denom;
    let u = qp.cross(r) / denom;
    if (-EPS..=1.0 + EPS).contains(&t) && (-EPS..=1.0 + EPS).contains(&u) {
        Some(SegHit::Point {
            t: t.clamp(0.0, 1.0),
            u: u.clamp(0.0, 1.0),
        })
    } else {
        None
    }
}

fn boxes_overlap(a: &[Point2], b: &[Point2]) -> bool {
    let bounds = |pts: &[Point2]| {
        pts.iter().fold(
            (f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY),
            |(x0, y0, x1, y1), p| (x0.min(p.x), y0.min(p.y), x1.max(p.x), y1.max(p.y)),
        )
    };
    let (ax0, ay0, ax1, ay1) = bounds(a);
    let (bx0, by0, bx1, by1) = bounds(b);
    let e = MERGE_EPSILON;
    ax0 <= bx1 + e && bx0 <= ax1 + e && ay0 <= by1 + e && by0 <= ay1 + e
}
