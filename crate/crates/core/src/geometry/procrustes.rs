//! Least-squares rigid and similarity registration of corresponding 2D
//! point sets.
//!
//! The rotation is the orthogonal polar factor of the centered
//! cross-covariance matrix. In two dimensions that factor has the closed form
//! `atan2(Σ sᵢ×tᵢ, Σ sᵢ·tᵢ)` over centered pairs, so no SVD is needed. The
//! translation then maps the rotated source centroid onto the target
//! centroid.

use super::point::{centroid, Point2};
use super::transform::{Affine2, RigidTransform2};
use crate::error::{Error, Result};

/// Relative spread below which the source is treated as a single point.
const RANK_EPSILON: f64 = 1e-24;

struct Moments {
    source_centroid: Point2,
    target_centroid: Point2,
    dot: f64,
    cross: f64,
    source_spread: f64,
    target_spread: f64,
}

fn moments(source: &[Point2], target: &[Point2]) -> Result<Moments> {
    if source.len() != target.len() {
        return Err(Error::CountMismatch(source.len(), target.len()));
    }
    if source.len() < 2 {
        return Err(Error::RankDeficient);
    }
    let cs = centroid(source);
    let ct = centroid(target);
    let mut m = Moments {
        source_centroid: cs,
        target_centroid: ct,
        dot: 0.0,
        cross: 0.0,
        source_spread: 0.0,
        target_spread: 0.0,
    };
    for (&s, &t) in source.iter().zip(target) {
        let (s, t) = (s - cs, t - ct);
        m.dot += s.dot(t);
        m.cross += s.cross(t);
        m.source_spread += s.norm_squared();
        m.target_spread += t.norm_squared();
    }
    let magnitude = source
        .iter()
        .map(|p| p.norm_squared())
        .fold(0.0, f64::max)
        .max(1.0);
    if m.source_spread <= RANK_EPSILON * magnitude {
        return Err(Error::RankDeficient);
    }
    Ok(m)
}

/// The rotation + translation minimizing `Σ‖targetᵢ − (R·sourceᵢ + t)‖²`.
pub fn best_fit_rigid(source: &[Point2], target: &[Point2]) -> Result<RigidTransform2> {
    let m = moments(source, target)?;
    let angle = if m.dot == 0.0 && m.cross == 0.0 {
        0.0
    } else {
        m.cross.atan2(m.dot)
    };
    let translation = m.target_centroid - m.source_centroid.rotated(angle);
    Ok(RigidTransform2::new(angle, translation))
}

/// Rigid fit extended with a uniform scale taken from the ratio of RMS
/// centered radii.
pub fn best_fit_similarity(source: &[Point2], target: &[Point2]) -> Result<Affine2> {
    let m = moments(source, target)?;
    let angle = if m.dot == 0.0 && m.cross == 0.0 {
        0.0
    } else {
        m.cross.atan2(m.dot)
    };
    let scale = (m.target_spread / m.source_spread).sqrt();
    if !(scale > 0.0) {
        return Err(Error::RankDeficient);
    }
    let translation = m.target_centroid - m.source_centroid.rotated(angle) * scale;
    Ok(Affine2::similarity(scale, angle, translation))
}

/// `Σ‖targetᵢ − A·sourceᵢ‖²` for a rigid `A`.
pub fn rigid_residual(source: &[Point2], target: &[Point2], a: &RigidTransform2) -> f64 {
    source
        .iter()
        .zip(target)
        .map(|(&s, &t)| a.apply(s).distance_squared(t))
        .sum()
}
