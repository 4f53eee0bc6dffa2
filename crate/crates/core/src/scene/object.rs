use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use super::attribute::AttrRange;
use crate::geometry::{Affine2, Point2};

/// Local placement of an object relative to its parent: uniform scale, then
/// rotation, then translation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LocalTransform {
    pub tx: f64,
    pub ty: f64,
    pub rotation: f64,
    pub scale: f64,
}

impl Default for LocalTransform {
    fn default() -> Self {
        Self {
            tx: 0.0,
            ty: 0.0,
            rotation: 0.0,
            scale: 1.0,
        }
    }
}

impl LocalTransform {
    pub fn at(tx: f64, ty: f64) -> Self {
        Self {
            tx,
            ty,
            ..Self::default()
        }
    }

    pub fn to_affine(&self) -> Affine2 {
        Affine2::similarity(self.scale, self.rotation, Point2::new(self.tx, self.ty))
    }
}

/// Largest spotlight tilt; keeps the hot-spot an ellipse for every legal
/// cone angle.
pub const MAX_TILT: f64 = 0.7;

/// Vertical squash applied to the hot-spot so the ground ellipse reads as
/// seen from slightly above.
pub const HOTSPOT_DEPTH_RATIO: f64 = 0.35;

/// Kind-specific geometry and shape parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Shape {
    /// Closed polygon with fixed local vertices.
    Polygon { vertices: Vec<Point2> },
    #[serde(rename_all = "kebab-case")]
    Ellipse { radius_x: f64, radius_y: f64 },
    /// Apex at the local origin, shining along local −y onto a ground line
    /// `throw` units away. `cone_angle` is the full aperture and `tilt`
    /// swings the cone axis toward +x.
    #[serde(rename_all = "kebab-case")]
    Spotlight {
        cone_angle: f64,
        tilt: f64,
        throw: f64,
    },
    /// Stick figure: torso and head over a hip at the local origin, with
    /// one joint angle per limb measured from hanging straight down.
    #[serde(rename_all = "kebab-case")]
    ArticulatedFigure {
        shoulder_l: f64,
        shoulder_r: f64,
        hip_l: f64,
        hip_r: f64,
    },
    Group,
}

impl Shape {
    pub fn kind_name(&self) -> &'static str {
        match self {
            Shape::Polygon { .. } => "polygon",
            Shape::Ellipse { .. } => "ellipse",
            Shape::Spotlight { .. } => "spotlight",
            Shape::ArticulatedFigure { .. } => "articulated-figure",
            Shape::Group => "group",
        }
    }

    /// Scalar shape parameters as `(name, range)`.
    pub fn parameters(&self) -> &'static [(&'static str, AttrRange)] {
        const JOINT: AttrRange = AttrRange::Closed(-PI, PI);
        match self {
            Shape::Polygon { .. } | Shape::Group => &[],
            Shape::Ellipse { .. } => &[
                ("radius-x", AttrRange::Positive),
                ("radius-y", AttrRange::Positive),
            ],
            Shape::Spotlight { .. } => &[
                ("cone-angle", AttrRange::Open(0.0, FRAC_PI_2)),
                ("tilt", AttrRange::Closed(-MAX_TILT, MAX_TILT)),
                ("throw", AttrRange::Positive),
            ],
            Shape::ArticulatedFigure { .. } => &[
                ("shoulder-l", JOINT),
                ("shoulder-r", JOINT),
                ("hip-l", JOINT),
                ("hip-r", JOINT),
            ],
        }
    }

    fn slot(&mut self, name: &str) -> Option<&mut f64> {
        Some(match (self, name) {
            (Shape::Ellipse { radius_x, .. }, "radius-x") => radius_x,
            (Shape::Ellipse { radius_y, .. }, "radius-y") => radius_y,
            (Shape::Spotlight { cone_angle, .. }, "cone-angle") => cone_angle,
            (Shape::Spotlight { tilt, .. }, "tilt") => tilt,
            (Shape::Spotlight { throw, .. }, "throw") => throw,
            (Shape::ArticulatedFigure { shoulder_l, .. }, "shoulder-l") => shoulder_l,
            (Shape::ArticulatedFigure { shoulder_r, .. }, "shoulder-r") => shoulder_r,
            (Shape::ArticulatedFigure { hip_l, .. }, "hip-l") => hip_l,
            (Shape::ArticulatedFigure { hip_r, .. }, "hip-r") => hip_r,
            _ => return None,
        })
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        Some(match (self, name) {
            (Shape::Ellipse { radius_x, .. }, "radius-x") => *radius_x,
            (Shape::Ellipse { radius_y, .. }, "radius-y") => *radius_y,
            (Shape::Spotlight { cone_angle, .. }, "cone-angle") => *cone_angle,
            (Shape::Spotlight { tilt, .. }, "tilt") => *tilt,
            (Shape::Spotlight { throw, .. }, "throw") => *throw,
            (Shape::ArticulatedFigure { shoulder_l, .. }, "shoulder-l") => *shoulder_l,
            (Shape::ArticulatedFigure { shoulder_r, .. }, "shoulder-r") => *shoulder_r,
            (Shape::ArticulatedFigure { hip_l, .. }, "hip-l") => *hip_l,
            (Shape::ArticulatedFigure { hip_r, .. }, "hip-r") => *hip_r,
            _ => return None,
        })
    }

    pub fn set(&mut self, name: &str, value: f64) -> bool {
        match self.slot(name) {
            Some(v) => {
                *v = value;
                true
            }
            None => false,
        }
    }
}

/// Transform attribute names and their ranges.
pub const TRANSFORM_ATTRIBUTES: [(&str, AttrRange); 4] = [
    ("transform/tx", AttrRange::Unbounded),
    ("transform/ty", AttrRange::Unbounded),
    ("transform/rotation", AttrRange::Angle),
    ("transform/scale", AttrRange::Positive),
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneObject {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parent: Option<String>,
    pub transform: LocalTransform,
    pub shape: Shape,
}

impl SceneObject {
    pub fn new(id: impl Into<String>, shape: Shape) -> Self {
        Self {
            id: id.into(),
            parent: None,
            transform: LocalTransform::default(),
            shape,
        }
    }

    pub fn with_transform(mut self, t: LocalTransform) -> Self {
        self.transform = t;
        self
    }

    pub fn with_parent(mut self, parent: impl Into<String>) -> Self {
        self.parent = Some(parent.into());
        self
    }

    /// All scalar attribute names (relative to the object) with ranges:
    /// the four transform entries followed by the shape parameters.
    pub fn attributes(&self) -> Vec<(String, AttrRange)> {
        TRANSFORM_ATTRIBUTES
            .iter()
            .map(|&(n, r)| (n.to_string(), r))
            .chain(
                self.shape
                    .parameters()
                    .iter()
                    .map(|&(n, r)| (format!("shape/{n}"), r)),
            )
            .collect()
    }

    pub fn range_of(&self, name: &str) -> Option<AttrRange> {
        if let Some(&(_, r)) = TRANSFORM_ATTRIBUTES.iter().find(|(n, _)| *n == name) {
            return Some(r);
        }
        let p = name.strip_prefix("shape/")?;
        self.shape
            .parameters()
            .iter()
            .find(|(n, _)| *n == p)
            .map(|&(_, r)| r)
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        match name {
            "transform/tx" => Some(self.transform.tx),
            "transform/ty" => Some(self.transform.ty),
            "transform/rotation" => Some(self.transform.rotation),
            "transform/scale" => Some(self.transform.scale),
            _ => self.shape.get(name.strip_prefix("shape/")?),
        }
    }

    /// Raw write without range checks; returns false for unknown names.
    pub(crate) fn set_raw(&mut self, name: &str, value: f64) -> bool {
        match name {
            "transform/tx" => self.transform.tx = value,
            "transform/ty" => self.transform.ty = value,
            "transform/rotation" => self.transform.rotation = value,
            "transform/scale" => self.transform.scale = value,
            _ => {
                return match name.strip_prefix("shape/") {
                    Some(p) => self.shape.set(p, value),
                    None => false,
                }
            }
        }
        true
    }
}
