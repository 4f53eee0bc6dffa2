//! Analytic outlines of scene objects in object-local coordinates.

use std::f64::consts::{PI, TAU};

use super::object::{Shape, HOTSPOT_DEPTH_RATIO};
use crate::geometry::Point2;

/// Point count of sampled smooth outlines (ellipses, capsules, hot-spots),
/// closing duplicate included.
pub const CONTOUR_SAMPLES: usize = 64;

const TORSO: (Point2, Point2, f64) = (Point2::new(0.0, 0.0), Point2::new(0.0, 40.0), 5.0);
const HEAD_CENTER: Point2 = Point2::new(0.0, 53.0);
const HEAD_RADIUS: f64 = 9.0;
const SHOULDER: Point2 = Point2::new(0.0, 36.0);
const ARM: (f64, f64) = (32.0, 3.5);
const HIP: Point2 = Point2::new(0.0, 0.0);
const LEG: (f64, f64) = (42.0, 4.0);

/// Ground-plane ellipse lit by a spotlight: centre offset along the ground
/// and the two semi-axes (along the ground, and in depth before squashing).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HotSpot {
    pub center_x: f64,
    pub semi_major: f64,
    pub semi_depth: f64,
}

/// Conic section of a cone with apex height `throw`, half-aperture
/// `cone_angle / 2` and axis tilted by `tilt` from the ground normal.
pub fn hot_spot(cone_angle: f64, tilt: f64, throw: f64) -> HotSpot {
    let half = 0.5 * cone_angle;
    let (sa, ca) = half.sin_cos();
    let (st, ct) = tilt.sin_cos();
    let a = ca * ca - st * st;
    HotSpot {
        center_x: throw * st * ct / a,
        semi_major: throw * ca * sa / a,
        semi_depth: throw * sa / a.sqrt(),
    }
}

/// Closed ellipse outline, `CONTOUR_SAMPLES` points starting at angle 0.
pub fn ellipse_outline(center: Point2, rx: f64, ry: f64) -> Vec<Point2> {
    let n = CONTOUR_SAMPLES - 1;
    let mut pts: Vec<Point2> = (0..n)
        .map(|k| {
            let a = TAU * k as f64 / n as f64;
            Point2::new(center.x + rx * a.cos(), center.y + ry * a.sin())
        })
        .collect();
    pts.push(pts[0]);
    pts
}

/// Closed stadium outline around the segment `a → b`.
pub fn capsule_outline(a: Point2, b: Point2, radius: f64) -> Vec<Point2> {
    let d = b - a;
    let heading = d.y.atan2(d.x);
    let far = CONTOUR_SAMPLES / 2;
    let near = CONTOUR_SAMPLES - far - 1;
    let mut pts = Vec::with_capacity(CONTOUR_SAMPLES);
    for k in 0..far {
        let ang = heading - PI / 2.0 + PI * k as f64 / (far - 1) as f64;
        pts.push(b + Point2::new(ang.cos(), ang.sin()) * radius);
    }
    for k in 0..near {
        let ang = heading + PI / 2.0 + PI * k as f64 / (near - 1) as f64;
        pts.push(a + Point2::new(ang.cos(), ang.sin()) * radius);
    }
    pts.push(pts[0]);
    pts
}

fn limb_end(origin: Point2, length: f64, angle: f64) -> Point2 {
    origin + Point2::new(angle.sin(), -angle.cos()) * length
}

/// Outlines of a shape in its local frame. Groups have none.
pub fn local_outlines(shape: &Shape) -> Vec<Vec<Point2>> {
    match *shape {
        Shape::Polygon { ref vertices } => {
            let mut pts = vertices.clone();
            if let Some(&first) = pts.first() {
                pts.push(first);
            }
            vec![pts]
        }
        Shape::Ellipse { radius_x, radius_y } => {
            vec![ellipse_outline(Point2::ZERO, radius_x, radius_y)]
        }
        Shape::Spotlight {
            cone_angle,
            tilt,
            throw,
        } => {
            let hs = hot_spot(cone_angle, tilt, throw);
            let spot = ellipse_outline(
                Point2::new(hs.center_x, -throw),
                hs.semi_major,
                hs.semi_depth * HOTSPOT_DEPTH_RATIO,
            );
            let half = 0.5 * cone_angle;
            let left = Point2::new(throw * (tilt - half).tan(), -throw);
            let right = Point2::new(throw * (tilt + half).tan(), -throw);
            vec![spot, vec![Point2::ZERO, left], vec![Point2::ZERO, right]]
        }
        Shape::ArticulatedFigure {
            shoulder_l,
            shoulder_r,
            hip_l,
            hip_r,
        } => vec![
            capsule_outline(TORSO.0, TORSO.1, TORSO.2),
            ellipse_outline(HEAD_CENTER, HEAD_RADIUS, HEAD_RADIUS),
            capsule_outline(SHOULDER, limb_end(SHOULDER, ARM.0, shoulder_l), ARM.1),
            capsule_outline(SHOULDER, limb_end(SHOULDER, ARM.0, shoulder_r), ARM.1),
            capsule_outline(HIP, limb_end(HIP, LEG.0, hip_l), LEG.1),
            capsule_outline(HIP, limb_end(HIP, LEG.0, hip_r), LEG.1),
        ],
        Shape::Group => Vec::new(),
    }
}
