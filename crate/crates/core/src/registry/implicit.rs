use crate::config::Config;
use crate::error::Result;
use crate::geometry::{find_corners, Polyline};
use crate::scene::{AttributePath, Scene};

/// A corner-delimited piece of an object's contour, bound to the object's
/// transform and shape attributes.
///
/// The piece is identified by contour index and a normalized arc-length
/// range, so it can be regenerated from any scene state: corners are found
/// once, on the contour the squidget was derived from.
#[derive(Debug, Clone, PartialEq)]
pub struct ImplicitSquidget {
    pub id: String,
    pub object: String,
    pub contour: usize,
    pub from: f64,
    /// May exceed 1 on closed contours (the piece wraps through the seam).
    pub to: f64,
    /// World-space segment resampled to the configured point count.
    pub segment: Polyline,
    pub bound: Vec<AttributePath>,
}

impl ImplicitSquidget {
    /// The same piece cut from the object's contour in `scene`.
    pub fn regenerate(&self, scene: &Scene, n: usize) -> Result<Polyline> {
        segment_curve(scene, &self.object, self.contour, self.from, self.to, n)
    }
}

pub fn segment_curve(
    scene: &Scene,
    object: &str,
    contour: usize,
    from: f64,
    to: f64,
    n: usize,
) -> Result<Polyline> {
    let contours = scene.contour(object)?;
    let c = contours
        .get(contour)
        .ok_or_else(|| crate::Error::UnknownSquidget(format!("{object} contour {contour}")))?;
    if from <= 0.0 && to == 1.0 {
        return c.resample(n);
    }
    c.sub_curve(from, to)?.resample(n)
}

fn ranges(contour: &Polyline, cfg: &Config) -> Vec<(f64, f64)> {
    let split = find_corners(contour, &cfg.shortstraw);
    let spacing = 1.0 / cfg.shortstraw.resample.max(2) as f64;
    let cum = contour.cumulative();
    let total = contour.arc_length();
    let vertices: Vec<f64> = cum.iter().map(|c| c / total).collect();
    let mut params: Vec<f64> = split
        .corners
        .iter()
        .map(|&k| snap_to_vertex(split.param(k), &vertices, spacing))
        .collect();
    if split.closed {
        for p in &mut params {
            if *p >= 1.0 {
                *p -= 1.0;
            }
        }
    } else {
        params.retain(|&p| p > 0.0 && p < 1.0);
    }
    params.sort_by(f64::total_cmp);
    params.dedup();
    if split.closed {
        match params.len() {
            0 => vec![(0.0, 1.0)],
            m => (0..m)
                .map(|i| {
                    if i + 1 < m {
                        (params[i], params[i + 1])
                    } else {
                        (params[i], 1.0 + params[0])
                    }
                })
                .collect(),
        }
    } else {
        let mut bounds = vec![0.0];
        bounds.extend(params);
        bounds.push(1.0);
        bounds.windows(2).map(|w| (w[0], w[1])).collect()
    }
}

/// Moves a corner found on the resampled curve onto the nearest original
/// vertex within one sample spacing, so polygon sides split exactly at
/// their vertices.
fn snap_to_vertex(t: f64, vertices: &[f64], spacing: f64) -> f64 {
    vertices
        .iter()
        .copied()
        .filter(|v| (v - t).abs() <= spacing)
        .min_by(|a, b| (a - t).abs().total_cmp(&(b - t).abs()))
        .unwrap_or(t)
}

/// Implicit squidgets for every object with an outline, in scene order.
pub fn implicit_squidgets(scene: &Scene, cfg: &Config) -> Vec<ImplicitSquidget> {
    let mut out = Vec::new();
    for obj in &scene.objects {
        let Ok(contours) = scene.contour(&obj.id) else {
            continue;
        };
        let bound: Vec<AttributePath> = obj
            .attributes()
            .into_iter()
            .map(|(n, _)| AttributePath::object_attr(&obj.id, &n))
            .collect();
        for (ci, c) in contours.iter().enumerate() {
            for (si, (from, to)) in ranges(c, cfg).into_iter().enumerate() {
                let Ok(segment) = segment_curve(scene, &obj.id, ci, from, to, cfg.resample_n)
                else {
                    continue;
                };
                out.push(ImplicitSquidget {
                    id: format!("imp:{}:{ci}:{si}", obj.id),
                    object: obj.id.clone(),
                    contour: ci,
                    from,
                    to,
                    segment,
                    bound: bound.clone(),
                });
            }
        }
    }
    out
}
