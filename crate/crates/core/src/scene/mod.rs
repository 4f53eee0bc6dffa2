//! The manipulable 2D scene: objects with hierarchical scalar attributes and
//! analytic contours.

mod attribute;
pub mod contour;
mod object;

use serde::{Deserialize, Serialize};

pub use attribute::{
    lerp_scalar, AttrRange, AttributePath, AttributeSnapshot, Change, WEIGHT_ROOT,
};
pub use object::{LocalTransform, SceneObject, Shape, HOTSPOT_DEPTH_RATIO, MAX_TILT};

use crate::error::{Error, Result};
use crate::geometry::{Affine2, Point2, Polyline};

/// World → screen mapping: uniform scale, rotation, then translation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct View {
    pub rotation: f64,
    pub translation: Point2,
    pub scale: f64,
}

impl Default for View {
    fn default() -> Self {
        Self {
            rotation: 0.0,
            translation: Point2::ZERO,
            scale: 1.0,
        }
    }
}

impl View {
    pub fn to_affine(&self) -> Affine2 {
        Affine2::similarity(self.scale, self.rotation, self.translation)
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scene {
    pub objects: Vec<SceneObject>,
    #[serde(default)]
    pub view: View,
}

impl Scene {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, object: SceneObject) -> Self {
        self.objects.push(object);
        self
    }

    pub fn object(&self, id: &str) -> Result<&SceneObject> {
        self.objects
            .iter()
            .find(|o| o.id == id)
            .ok_or_else(|| Error::UnknownObject(id.to_string()))
    }

    fn object_mut(&mut self, id: &str) -> Result<&mut SceneObject> {
        self.objects
            .iter_mut()
            .find(|o| o.id == id)
            .ok_or_else(|| Error::UnknownObject(id.to_string()))
    }

    fn resolve(&self, path: &AttributePath) -> Result<(&SceneObject, AttrRange)> {
        let unknown = || Error::UnknownAttribute(path.to_string());
        let obj = self.object(path.root()).map_err(|_| unknown())?;
        let range = obj.range_of(path.tail()).ok_or_else(unknown)?;
        Ok((obj, range))
    }

    pub fn range_of(&self, path: &AttributePath) -> Result<AttrRange> {
        self.resolve(path).map(|(_, r)| r)
    }

    pub fn get_attr(&self, path: &AttributePath) -> Result<f64> {
        let (obj, _) = self.resolve(path)?;
        obj.get(path.tail())
            .ok_or_else(|| Error::UnknownAttribute(path.to_string()))
    }

    /// Writes one scalar after a range check and returns the change record.
    /// Angles are wrapped, so `new` may differ from `value`.
    pub fn set_attr(&mut self, path: &AttributePath, value: f64) -> Result<Change> {
        let (obj, range) = self.resolve(path)?;
        let old = obj.get(path.tail()).expect("resolved attribute");
        let new = range.admit(path, value)?;
        let obj = self.object_mut(path.root())?;
        obj.set_raw(path.tail(), new);
        Ok(Change {
            path: path.clone(),
            old,
            new,
        })
    }

    /// Writes a value recorded by an earlier change, bypassing range checks
    /// so undo always restores the exact prior state.
    pub(crate) fn restore_attr(&mut self, path: &AttributePath, value: f64) -> Result<()> {
        let obj = self.object_mut(path.root())?;
        if obj.set_raw(path.tail(), value) {
            Ok(())
        } else {
            Err(Error::UnknownAttribute(path.to_string()))
        }
    }

    /// Ids of `id` and everything below it, parents before children.
    pub fn subtree(&self, id: &str) -> Result<Vec<String>> {
        self.object(id)?;
        let mut out = vec![id.to_string()];
        let mut i = 0;
        while i < out.len() {
            let parent = out[i].clone();
            for o in &self.objects {
                if o.parent.as_deref() == Some(parent.as_str()) && !out.contains(&o.id) {
                    out.push(o.id.clone());
                }
            }
            i += 1;
        }
        Ok(out)
    }

    /// Every scalar attribute of the selected objects and their descendants.
    pub fn collect_attributes(&self, selection: &[String]) -> Result<AttributeSnapshot> {
        let mut snap = AttributeSnapshot::new();
        for id in selection {
            for member in self.subtree(id)? {
                let obj = self.object(&member)?;
                for (name, _) in obj.attributes() {
                    let v = obj.get(&name).expect("listed attribute");
                    snap.insert(AttributePath::object_attr(&obj.id, &name), v);
                }
            }
        }
        Ok(snap)
    }

    /// Local → world transform, composing ancestors outermost first.
    pub fn world_transform(&self, id: &str) -> Result<Affine2> {
        let mut chain = Vec::new();
        let mut cur = Some(id.to_string());
        while let Some(c) = cur {
            if chain.len() > self.objects.len() {
                return Err(Error::InvalidScene(format!("parent cycle through {id}")));
            }
            let obj = self.object(&c)?;
            chain.push(obj.transform.to_affine());
            cur = obj.parent.clone();
        }
        Ok(chain
            .iter()
            .rev()
            .fold(Affine2::IDENTITY, |acc, t| acc.compose(t)))
    }

    /// Local → screen transform: ancestors, the object itself, then the view.
    pub fn local_to_screen(&self, id: &str) -> Result<Affine2> {
        Ok(self.view.to_affine().compose(&self.world_transform(id)?))
    }

    pub fn world_to_screen(&self) -> Affine2 {
        self.view.to_affine()
    }

    pub fn screen_to_world(&self) -> Affine2 {
        self.view
            .to_affine()
            .inverse()
            .expect("view scale is positive")
    }

    /// World-space outlines of an object.
    pub fn contour(&self, id: &str) -> Result<Vec<Polyline>> {
        let obj = self.object(id)?;
        let world = self.world_transform(id)?;
        contour::local_outlines(&obj.shape)
            .into_iter()
            .map(|pts| {
                Polyline::new(pts.into_iter().map(|p| world.apply(p)).collect())
                    .map_err(|_| Error::InvalidScene(format!("degenerate outline on {id}")))
            })
            .collect()
    }

    /// Structural and range problems, one message per violation.
    pub fn validate(&self) -> Vec<String> {
        let mut issues = Vec::new();
        let mut seen = std::collections::BTreeSet::new();
        for o in &self.objects {
            if o.id.is_empty() || o.id.contains('/') || o.id == WEIGHT_ROOT {
                issues.push(format!("invalid object id {:?}", o.id));
            }
            if !seen.insert(o.id.as_str()) {
                issues.push(format!("duplicate object id {:?}", o.id));
            }
        }
        for o in &self.objects {
            if let Some(p) = &o.parent {
                if self.object(p).is_err() {
                    issues.push(format!("{}: unknown parent {p:?}", o.id));
                } else if self.world_transform(&o.id).is_err() {
                    issues.push(format!("{}: parent links form a cycle", o.id));
                }
            }
            for (name, range) in o.attributes() {
                let v = o.get(&name).expect("listed attribute");
                if !range.contains(v) {
                    let rule = match range {
                        AttrRange::Positive => format!("{name} > 0"),
                        AttrRange::Open(lo, hi) => format!("{name} in ({lo}, {hi})"),
                        AttrRange::Closed(lo, hi) => format!("{name} in [{lo}, {hi}]"),
                        AttrRange::Angle => format!("{name} in (-pi, pi]"),
                        AttrRange::Unbounded => format!("{name} finite"),
                    };
                    issues.push(format!("{}/{name} = {v}: violates {rule}", o.id));
                }
            }
            if let Shape::Polygon { vertices } = &o.shape {
                if vertices.len() < 3 {
                    issues.push(format!("{}: polygon needs at least 3 vertices", o.id));
                }
            }
        }
        if !(self.view.scale > 0.0 && self.view.scale.is_finite()) {
            issues.push(format!("view scale = {}: violates scale > 0", self.view.scale));
        }
        issues
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_4;

    fn path(s: &str) -> AttributePath {
        AttributePath::parse(s).unwrap()
    }

    fn square(id: &str) -> SceneObject {
        SceneObject::new(
            id,
            Shape::Polygon {
                vertices: vec![
                    Point2::new(-1.0, -1.0),
                    Point2::new(1.0, -1.0),
                    Point2::new(1.0, 1.0),
                    Point2::new(-1.0, 1.0),
                ],
            },
        )
    }

    fn circle(id: &str) -> SceneObject {
        SceneObject::new(
            id,
            Shape::Ellipse {
                radius_x: 1.0,
                radius_y: 1.0,
            },
        )
    }

    #[test]
    fn get_set_round_trip_and_ranges() {
        let mut scene = Scene::new().with(circle("c"));
        let ch = scene.set_attr(&path("c/transform/tx"), 5.0).unwrap();
        assert_eq!((ch.old, ch.new), (0.0, 5.0));
        assert_eq!(scene.get_attr(&path("c/transform/tx")).unwrap(), 5.0);
        assert!(matches!(
            scene.set_attr(&path("c/transform/scale"), -1.0),
            Err(Error::RangeViolation { .. })
        ));
        assert!(matches!(
            scene.get_attr(&path("c/transform/nope")),
            Err(Error::UnknownAttribute(_))
        ));
        assert!(matches!(
            scene.get_attr(&path("ghost/transform/tx")),
            Err(Error::UnknownAttribute(_))
        ));
        // replaying the change record backwards restores the old value
        scene.restore_attr(&ch.path, ch.old).unwrap();
        assert_eq!(scene.get_attr(&path("c/transform/tx")).unwrap(), 0.0);
    }

    #[test]
    fn unit_circle_contour() {
        let scene = Scene::new().with(circle("c"));
        let cs = scene.contour("c").unwrap();
        assert_eq!(cs.len(), 1);
        assert_eq!(cs[0].len(), 64);
        for p in cs[0].points() {
            assert!((p.norm() - 1.0).abs() < 1e-6);
        }
        assert!(matches!(scene.contour("x"), Err(Error::UnknownObject(_))));
    }

    #[test]
    fn rotated_square_contour() {
        let mut sq = square("s");
        sq.transform.rotation = FRAC_PI_4;
        let scene = Scene::new().with(sq);
        let c = &scene.contour("s").unwrap()[0];
        let r = 2f64.sqrt();
        let expect = [(0.0, -r), (r, 0.0), (0.0, r), (-r, 0.0), (0.0, -r)];
        for (p, e) in c.points().iter().zip(expect) {
            assert!(p.distance(e.into()) < 1e-12, "{p:?} vs {e:?}");
        }
    }

    #[test]
    fn spotlight_wider_cone_has_wider_hot_spot() {
        let light = |cone: f64| {
            Scene::new().with(SceneObject::new(
                "l",
                Shape::Spotlight {
                    cone_angle: cone,
                    tilt: 0.2,
                    throw: 50.0,
                },
            ))
        };
        let width = |s: Scene| {
            let spot = &s.contour("l").unwrap()[0];
            let xs = spot.points().iter().map(|p| p.x);
            xs.clone().fold(f64::MIN, f64::max) - xs.fold(f64::MAX, f64::min)
        };
        assert!(width(light(0.3)) > width(light(0.15)));
    }

    #[test]
    fn collect_attributes_cases() {
        let scene = Scene::new()
            .with(SceneObject::new("g", Shape::Group))
            .with(circle("a").with_parent("g"))
            .with(square("b").with_parent("g"));
        assert!(scene.collect_attributes(&[]).unwrap().is_empty());
        let one = scene.collect_attributes(&["a".into()]).unwrap();
        let names: Vec<&str> = one.paths().map(|p| p.as_str()).collect();
        assert_eq!(
            names,
            [
                "a/shape/radius-x",
                "a/shape/radius-y",
                "a/transform/rotation",
                "a/transform/scale",
                "a/transform/tx",
                "a/transform/ty"
            ]
        );
        let group = scene.collect_attributes(&["g".into()]).unwrap();
        assert_eq!(group.len(), 4 + 6 + 4);
        assert!(group.get(&path("b/transform/scale")).is_some());
        assert!(scene.collect_attributes(&["zz".into()]).is_err());
    }

    #[test]
    fn local_to_screen_composes_parents() {
        let mut parent = SceneObject::new("p", Shape::Group);
        parent.transform.tx = 2.0;
        let scene = Scene::new().with(parent).with(circle("c").with_parent("p"));
        assert_eq!(
            Scene::new().with(circle("c")).local_to_screen("c").unwrap(),
            Affine2::IDENTITY
        );
        let x = scene.local_to_screen("c").unwrap();
        assert_eq!(x.apply(Point2::ZERO), Point2::new(2.0, 0.0));
    }

    #[test]
    fn screen_local_round_trip() {
        let mut scene = Scene::new()
            .with(SceneObject::new("p", Shape::Group).with_transform(LocalTransform {
                tx: 3.0,
                ty: -1.0,
                rotation: 0.4,
                scale: 2.0,
            }))
            .with(circle("c").with_parent("p").with_transform(LocalTransform {
                tx: -5.0,
                ty: 2.0,
                rotation: -1.3,
                scale: 0.5,
            }));
        scene.view = View {
            rotation: 0.2,
            translation: Point2::new(100.0, 50.0),
            scale: 1.5,
        };
        let x = scene.local_to_screen("c").unwrap();
        let inv = x.inverse().unwrap();
        let q = Point2::new(17.0, -4.0);
        assert!(x.apply(inv.apply(q)).distance(q) < 1e-9);
    }

    #[test]
    fn validate_flags_bad_scale_and_cycles() {
        let mut scene = Scene::new().with(circle("a"));
        scene.objects[0].transform.scale = -1.0;
        let issues = scene.validate();
        assert!(issues.iter().any(|m| m.contains("transform/scale")), "{issues:?}");
        let cyc = Scene::new()
            .with(circle("a").with_parent("b"))
            .with(circle("b").with_parent("a"));
        assert!(cyc.validate().iter().any(|m| m.contains("cycle")));
    }
}
