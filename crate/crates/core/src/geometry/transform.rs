use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::point::Point2;

/// Wraps an angle into `(-π, π]`.
pub fn wrap_angle(a: f64) -> f64 {
    let w = (a + PI).rem_euclid(2.0 * PI) - PI;
    if w <= -PI {
        w + 2.0 * PI
    } else {
        w
    }
}

/// Rotation about the origin followed by a translation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RigidTransform2 {
    pub rotation: f64,
    pub translation: Point2,
}

impl Default for RigidTransform2 {
    fn default() -> Self {
        Self::IDENTITY
    }
}

impl RigidTransform2 {
    pub const IDENTITY: RigidTransform2 = RigidTransform2 {
        rotation: 0.0,
        translation: Point2::ZERO,
    };

    pub fn new(rotation: f64, translation: Point2) -> Self {
        Self {
            rotation: wrap_angle(rotation),
            translation,
        }
    }

    pub fn translation(v: Point2) -> Self {
        Self::new(0.0, v)
    }

    #[inline]
    pub fn apply(&self, p: Point2) -> Point2 {
        p.rotated(self.rotation) + self.translation
    }

    /// `self ∘ other`: applies `other` first.
    pub fn compose(&self, other: &RigidTransform2) -> RigidTransform2 {
        RigidTransform2::new(
            self.rotation + other.rotation,
            self.apply(other.translation),
        )
    }

    pub fn inverse(&self) -> RigidTransform2 {
        RigidTransform2::new(-self.rotation, -self.translation.rotated(-self.rotation))
    }

    pub fn to_affine(&self) -> Affine2 {
        Affine2::similarity(1.0, self.rotation, self.translation)
    }
}

/// General 2D affine map `p ↦ M·p + t`, with `M` stored row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Affine2 {
    pub m: [[f64; 2]; 2],
    pub t: Point2,
}

impl Default for Affine2 {
    fn default() -> Self {
        Self::IDENTITY
    }
}

impl Affine2 {
    pub const IDENTITY: Affine2 = Affine2 {
        m: [[1.0, 0.0], [0.0, 1.0]],
        t: Point2::ZERO,
    };

    /// Uniform scale, then rotation, then translation.
    pub fn similarity(scale: f64, rotation: f64, translation: Point2) -> Self {
        let (s, c) = rotation.sin_cos();
        Affine2 {
            m: [[scale * c, -scale * s], [scale * s, scale * c]],
            t: translation,
        }
    }

    #[inline]
    pub fn apply(&self, p: Point2) -> Point2 {
        self.apply_linear(p) + self.t
    }

    #[inline]
    pub fn apply_linear(&self, v: Point2) -> Point2 {
        Point2::new(
            self.m[0][0] * v.x + self.m[0][1] * v.y,
            self.m[1][0] * v.x + self.m[1][1] * v.y,
        )
    }

    /// `self ∘ other`: applies `other` first.
    pub fn compose(&self, other: &Affine2) -> Affine2 {
        let a = &self.m;
        let b = &other.m;
        Affine2 {
            m: [
                [
                    a[0][0] * b[0][0] + a[0][1] * b[1][0],
                    a[0][0] * b[0][1] + a[0][1] * b[1][1],
                ],
                [
                    a[1][0] * b[0][0] + a[1][1] * b[1][0],
                    a[1][0] * b[0][1] + a[1][1] * b[1][1],
                ],
            ],
            t: self.apply(other.t),
        }
    }

    pub fn determinant(&self) -> f64 {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    /// Inverse map; `None` when the linear part is singular.
    pub fn inverse(&self) -> Option<Affine2> {
        let det = self.determinant();
        if det == 0.0 || !det.is_finite() {
            return None;
        }
        let m = [
            [self.m[1][1] / det, -self.m[0][1] / det],
            [-self.m[1][0] / det, self.m[0][0] / det],
        ];
        let inv = Affine2 { m, t: Point2::ZERO };
        let t = -inv.apply_linear(self.t);
        Some(Affine2 { m, t })
    }

    /// Rotation angle of the linear part, assuming it is a similarity.
    pub fn rotation(&self) -> f64 {
        self.m[1][0].atan2(self.m[0][0])
    }

    /// Uniform scale of the linear part, assuming it is a similarity.
    pub fn uniform_scale(&self) -> f64 {
        self.determinant().abs().sqrt()
    }

    /// Drops the scale of a similarity, leaving rotation and translation.
    pub fn to_rigid(&self) -> RigidTransform2 {
        RigidTransform2::new(self.rotation(), self.t)
    }
}
