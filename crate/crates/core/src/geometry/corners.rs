//! ShortStraw corner finding.
//!
//! The curve is resampled to a fixed number of evenly spaced points and each
//! point gets a "straw": the chord between its neighbours `window` samples
//! before and after. Straws shrink where the curve turns, so runs of straws
//! below `threshold × median` mark corners, one per run at its minimum.
//! Closed curves use a cyclic window so corners at the seam are found too.

use serde::{Deserialize, Serialize};

use super::point::Point2;
use super::polyline::Polyline;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShortStrawConfig {
    pub resample: usize,
    pub window: usize,
    pub threshold: f64,
}

impl Default for ShortStrawConfig {
    fn default() -> Self {
        Self {
            resample: 64,
            window: 3,
            threshold: 0.95,
        }
    }
}

/// Resampled curve plus the corner indices found on it.
#[derive(Debug, Clone, PartialEq)]
pub struct CornerSplit {
    /// Evenly spaced samples. For a closed curve the closing duplicate is
    /// omitted, so sample `k` sits at normalized arc length `k / len`.
    /// For an open curve sample `k` sits at `k / (len - 1)`.
    pub samples: Vec<Point2>,
    pub corners: Vec<usize>,
    pub closed: bool,
}

impl CornerSplit {
    /// Normalized arc-length parameter of sample `k`.
    pub fn param(&self, k: usize) -> f64 {
        if self.closed {
            k as f64 / self.samples.len() as f64
        } else {
            k as f64 / (self.samples.len() - 1) as f64
        }
    }
}

pub fn find_corners(p: &Polyline, cfg: &ShortStrawConfig) -> CornerSplit {
    let closed = p.is_closed();
    let n = cfg.resample.max(2 * cfg.window + 3);
    let samples: Vec<Point2> = if closed {
        let mut pts = p
            .resample(n + 1)
            .expect("polyline has positive length")
            .into_points();
        pts.pop();
        pts
    } else {
        p.resample(n).expect("polyline has positive length").into_points()
    };
    let w = cfg.window;
    let corners = if closed {
        cyclic_corners(&samples, w, cfg.threshold)
    } else {
        open_corners(&samples, w, cfg.threshold)
    };
    CornerSplit {
        samples,
        corners,
        closed,
    }
}

/// Sorted interior corner indices on the resampled curve.
pub fn detect_corners(p: &Polyline, cfg: &ShortStrawConfig) -> Vec<usize> {
    find_corners(p, cfg).corners
}

fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len().is_multiple_of(2) {
        0.5 * (v[m - 1] + v[m])
    } else {
        v[m]
    }
}

fn open_corners(pts: &[Point2], w: usize, threshold: f64) -> Vec<usize> {
    let n = pts.len();
    if n < 2 * w + 1 {
        return Vec::new();
    }
    let straws: Vec<f64> = (w..n - w).map(|i| pts[i - w].distance(pts[i + w])).collect();
    let t = median(&straws) * threshold;
    let mut corners = Vec::new();
    let mut k = 0;
    while k < straws.len() {
        if straws[k] < t {
            let mut best = k;
            while k < straws.len() && straws[k] < t {
                if straws[k] < straws[best] {
                    best = k;
                }
                k += 1;
            }
            corners.push(best + w);
        } else {
            k += 1;
        }
    }
    corners
}

fn cyclic_corners(pts: &[Point2], w: usize, threshold: f64) -> Vec<usize> {
    let n = pts.len();
    let straws: Vec<f64> = (0..n)
        .map(|i| pts[(i + n - w) % n].distance(pts[(i + w) % n]))
        .collect();
    let t = median(&straws) * threshold;
    // start scanning just after a straw at or above the threshold so no run
    // is split by the seam
    let Some(start) = (0..n).find(|&i| straws[i] >= t) else {
        return Vec::new();
    };
    let mut corners = Vec::new();
    let mut step = 1;
    while step <= n {
        let i = (start + step) % n;
        if straws[i] < t {
            let mut best = i;
            while step <= n && straws[(start + step) % n] < t {
                let j = (start + step) % n;
                if straws[j] < straws[best] {
                    best = j;
                }
                step += 1;
            }
            corners.push(best);
        } else {
            step += 1;
        }
    }
    corners.sort_unstable();
    corners
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::TAU;

    fn pl(pts: &[(f64, f64)]) -> Polyline {
        Polyline::new(pts.iter().map(|&p| p.into()).collect()).unwrap()
    }

    fn circle(n: usize) -> Polyline {
        let mut pts: Vec<Point2> = (0..n)
            .map(|i| {
                let a = TAU * i as f64 / n as f64;
                Point2::new(a.cos(), a.sin())
            })
            .collect();
        pts.push(pts[0]);
        Polyline::new(pts).unwrap()
    }

    #[test]
    fn straight_segment_has_no_corners() {
        let line = pl(&[(0.0, 0.0), (10.0, 3.0)]);
        assert!(detect_corners(&line, &ShortStrawConfig::default()).is_empty());
    }

    #[test]
    fn l_shape_has_one_corner_at_bend() {
        let l = pl(&[(0.0, 10.0), (0.0, 0.0), (10.0, 0.0)]);
        let split = find_corners(&l, &ShortStrawConfig::default());
        assert_eq!(split.corners.len(), 1);
        // the bend sits at half the arc length: sample 31.5 of 0..=63
        let c = split.corners[0] as f64;
        assert!((c - 31.5).abs() <= 2.0, "corner at {c}");
    }

    #[test]
    fn z_shape_has_two_corners() {
        let z = pl(&[(0.0, 10.0), (10.0, 10.0), (0.0, 0.0), (10.0, 0.0)]);
        assert_eq!(detect_corners(&z, &ShortStrawConfig::default()).len(), 2);
    }

    #[test]
    fn square_has_four_corners() {
        let sq = pl(&[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0), (0.0, 0.0)]);
        let split = find_corners(&sq, &ShortStrawConfig::default());
        assert!(split.closed);
        assert_eq!(split.corners, vec![0, 16, 32, 48]);
    }

    #[test]
    fn circles_have_no_corners() {
        for n in [32, 33, 47, 64, 100, 257] {
            assert!(
                detect_corners(&circle(n), &ShortStrawConfig::default()).is_empty(),
                "circle sampled at {n}"
            );
        }
    }
}
