use serde::{Deserialize, Serialize};

use super::point::{centroid, Point2};
use crate::error::{Error, Result};

/// Two points closer than this are treated as duplicates when cleaning raw
/// stroke input.
pub const DEDUP_EPSILON: f64 = 1e-9;

/// An ordered list of at least two finite points with positive arc length.
///
/// This is the single curve representation used for strokes, squidget
/// curves, continuous paths and contours.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Point2>", into = "Vec<Point2>")]
pub struct Polyline {
    points: Vec<Point2>,
}

/// Closest-point query result, see [`Polyline::project`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Projection {
    pub point: Point2,
    /// Normalized arc-length parameter in `[0, 1]`.
    pub param: f64,
    pub distance: f64,
    /// Index of the segment holding the closest point.
    pub segment: usize,
    /// Position within that segment, in `[0, 1]`.
    pub local: f64,
}

impl Polyline {
    pub fn new(points: Vec<Point2>) -> Result<Self> {
        if points.iter().any(|p| !p.is_finite()) {
            return Err(Error::NonFinite);
        }
        if points.len() < 2 {
            return Err(Error::DegenerateCurve);
        }
        let line = Self { points };
        if line.arc_length() <= 0.0 {
            return Err(Error::DegenerateCurve);
        }
        Ok(line)
    }

    /// Builds a polyline from raw pointer samples, dropping consecutive
    /// duplicates. Fewer than two distinct points is a degenerate stroke.
    pub fn from_stroke(raw: &[Point2]) -> Result<Self> {
        let mut points: Vec<Point2> = Vec::with_capacity(raw.len());
        for &p in raw {
            if !p.is_finite() {
                return Err(Error::NonFinite);
            }
            match points.last() {
                Some(&q) if q.distance(p) <= DEDUP_EPSILON => {}
                _ => points.push(p),
            }
        }
        Self::new(points)
    }

    #[inline]
    pub fn points(&self) -> &[Point2] {
        &self.points
    }

    pub fn into_points(self) -> Vec<Point2> {
        self.points
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.points.len()
    }

    /// Always false; a polyline holds at least two points.
    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn first(&self) -> Point2 {
        self.points[0]
    }

    #[inline]
    pub fn last(&self) -> Point2 {
        self.points[self.points.len() - 1]
    }

    /// True when the curve ends where it starts.
    pub fn is_closed(&self) -> bool {
        self.len() > 2 && self.first().distance(self.last()) <= DEDUP_EPSILON
    }

    pub fn arc_length(&self) -> f64 {
        self.points.windows(2).map(|w| w[0].distance(w[1])).sum()
    }

    /// Running arc length at each vertex; `cumulative()[0] == 0`.
    pub fn cumulative(&self) -> Vec<f64> {
        let mut acc = 0.0;
        let mut out = Vec::with_capacity(self.len());
        out.push(0.0);
        for w in self.points.windows(2) {
            acc += w[0].distance(w[1]);
            out.push(acc);
        }
        out
    }

    pub fn centroid(&self) -> Point2 {
        centroid(&self.points)
    }

    pub fn reversed(&self) -> Polyline {
        let mut points = self.points.clone();
        points.reverse();
        Polyline { points }
    }

    pub fn translated(&self, v: Point2) -> Polyline {
        self.map(|p| p + v)
    }

    /// Applies `f` to every point. `f` must be injective enough to keep the
    /// curve non-degenerate (rigid and similarity maps are).
    pub fn map(&self, f: impl Fn(Point2) -> Point2) -> Polyline {
        Polyline {
            points: self.points.iter().map(|&p| f(p)).collect(),
        }
    }

    /// Resamples to `n` points spaced uniformly by arc length. The first and
    /// last output points equal the input endpoints exactly.
    pub fn resample(&self, n: usize) -> Result<Polyline> {
        if n < 2 {
            return Err(Error::DegenerateCurve);
        }
        let cum = self.cumulative();
        let total = cum[cum.len() - 1];
        if !(total > 0.0) {
            return Err(Error::DegenerateCurve);
        }
        let mut out = Vec::with_capacity(n);
        out.push(self.first());
        let mut seg = 0;
        for k in 1..n - 1 {
            let target = total * k as f64 / (n - 1) as f64;
            while seg + 2 < cum.len() && cum[seg + 1] < target {
                seg += 1;
            }
            let len = cum[seg + 1] - cum[seg];
            let t = if len > 0.0 {
                ((target - cum[seg]) / len).clamp(0.0, 1.0)
            } else {
                0.0
            };
            out.push(self.points[seg].lerp(self.points[seg + 1], t));
        }
        out.push(self.last());
        Ok(Polyline { points: out })
    }

    /// Point at normalized arc-length parameter `t` (clamped to `[0, 1]`).
    pub fn point_at(&self, t: f64) -> Point2 {
        let cum = self.cumulative();
        let total = cum[cum.len() - 1];
        let target = t.clamp(0.0, 1.0) * total;
        if target >= total {
            return self.last();
        }
        let seg = cum.partition_point(|&c| c <= target).saturating_sub(1);
        let seg = seg.min(self.len() - 2);
        let len = cum[seg + 1] - cum[seg];
        let u = if len > 0.0 {
            (target - cum[seg]) / len
        } else {
            0.0
        };
        self.points[seg].lerp(self.points[seg + 1], u.clamp(0.0, 1.0))
    }

    /// Sub-curve between normalized arc-length parameters `from < to`.
    /// On a closed curve `to` may exceed 1, in which case the sub-curve wraps
    /// through the start point.
    pub fn sub_curve(&self, from: f64, to: f64) -> Result<Polyline> {
        let cum = self.cumulative();
        let total = cum[cum.len() - 1];
        let mut points = vec![self.point_at(from)];
        let push_range = |lo: f64, hi: f64, points: &mut Vec<Point2>| {
            for (i, &c) in cum.iter().enumerate() {
                let s = c / total;
                if s > lo && s < hi {
                    points.push(self.points[i]);
                }
            }
        };
        if to <= 1.0 {
            push_range(from, to, &mut points);
            points.push(self.point_at(to));
        } else {
            push_range(from, 1.0, &mut points);
            points.push(self.last());
            push_range(0.0, to - 1.0, &mut points);
            points.push(self.point_at(to - 1.0));
        }
        Polyline::from_stroke(&points)
    }

    /// Closest point on the curve to `q`. Ties between equidistant segments
    /// resolve to the smallest arc-length parameter.
    pub fn project(&self, q: Point2) -> Projection {
        let cum = self.cumulative();
        let total = cum[cum.len() - 1];
        let mut best = Projection {
            point: self.first(),
            param: 0.0,
            distance: f64::INFINITY,
            segment: 0,
            local: 0.0,
        };
        let mut best_d2 = f64::INFINITY;
        for (i, w) in self.points.windows(2).enumerate() {
            let (a, b) = (w[0], w[1]);
            let d = b - a;
            let len2 = d.norm_squared();
            let u = if len2 > 0.0 {
                ((q - a).dot(d) / len2).clamp(0.0, 1.0)
            } else {
                0.0
            };
            let c = a + d * u;
            let d2 = c.distance_squared(q);
            if best_d2.is_infinite() || d2 < best_d2 - 1e-12 * (1.0 + best_d2) {
                best_d2 = d2;
                best = Projection {
                    point: c,
                    param: ((cum[i] + u * (cum[i + 1] - cum[i])) / total).clamp(0.0, 1.0),
                    distance: d2.sqrt(),
                    segment: i,
                    local: u,
                };
            }
        }
        best
    }

    /// Corner-cutting (Chaikin) smoothing applied `iterations` times. The
    /// endpoints are kept exactly.
    pub fn smooth(&self, iterations: usize) -> Polyline {
        let mut pts = self.points.clone();
        for _ in 0..iterations {
            let mut next = Vec::with_capacity(2 * pts.len());
            next.push(pts[0]);
            for w in pts.windows(2) {
                next.push(w[0].lerp(w[1], 0.25));
                next.push(w[0].lerp(w[1], 0.75));
            }
            next.push(pts[pts.len() - 1]);
            pts = next;
        }
        Polyline { points: pts }
    }
}

impl TryFrom<Vec<Point2>> for Polyline {
    type Error = Error;
    fn try_from(points: Vec<Point2>) -> Result<Self> {
        Polyline::new(points)
    }
}

impl From<Polyline> for Vec<Point2> {
    fn from(p: Polyline) -> Self {
        p.points
    }
}

pub fn arc_length(p: &Polyline) -> f64 {
    p.arc_length()
}

pub fn resample(p: &Polyline, n: usize) -> Result<Polyline> {
    p.resample(n)
}

pub fn smooth(p: &Polyline, iterations: usize) -> Polyline {
    p.smooth(iterations)
}

pub fn project_to_polyline(q: Point2, p: &Polyline) -> (Point2, f64) {
    let hit = p.project(q);
    (hit.point, hit.param)
}

/// Sum of squared distances between corresponding points. With `centered`
/// both point lists are first shifted so their centroids sit at the origin.
pub fn pairwise_dist(s: &[Point2], c: &[Point2], centered: bool) -> Result<f64> {
    if s.len() != c.len() {
        return Err(Error::CountMismatch(s.len(), c.len()));
    }
    let (cs, cc) = if centered {
        (centroid(s), centroid(c))
    } else {
        (Point2::ZERO, Point2::ZERO)
    };
    Ok(s.iter()
        .zip(c)
        .map(|(&a, &b)| ((a - cs) - (b - cc)).norm_squared())
        .sum())
}

/// `pairwise_dist` against both the given and the reversed ordering of `s`,
/// returning the smaller.
pub fn dist_min_reverse(s: &[Point2], c: &[Point2], centered: bool) -> Result<f64> {
    let forward = pairwise_dist(s, c, centered)?;
    let rev: Vec<Point2> = s.iter().rev().copied().collect();
    let backward = pairwise_dist(&rev, c, centered)?;
    Ok(forward.min(backward))
}
