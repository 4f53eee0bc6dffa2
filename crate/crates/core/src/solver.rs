//! Turning matches into attribute changes.

use serde::{Deserialize, Serialize};

use crate::document::Document;
use crate::error::{Error, Result};
use crate::geometry::{dist_min_reverse, wrap_angle, Affine2, Point2, Polyline};
use crate::matching::{ImplicitFit, MatchResult, Payload};
use crate::registry::{segment_curve, weight_at, ImplicitSquidget};
use crate::scene::{AttrRange, AttributePath, AttributeSnapshot, Change};

/// An invertible batch of attribute writes.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct AttributeUpdate {
    pub changes: Vec<Change>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

impl AttributeUpdate {
    pub fn is_empty(&self) -> bool {
        self.changes.is_empty()
    }

    /// Appends `later`, keeping the first recorded old value per path.
    pub fn merge(&mut self, later: AttributeUpdate) {
        for c in later.changes {
            match self.changes.iter_mut().find(|x| x.path == c.path) {
                Some(x) => x.new = c.new,
                None => self.changes.push(c),
            }
        }
        self.warnings.extend(later.warnings);
    }

    /// Restores every old value, newest first.
    pub fn undo(&self, doc: &mut Document) -> Result<()> {
        for c in self.changes.iter().rev() {
            doc.restore_attr(&c.path, c.old)?;
        }
        Ok(())
    }

    pub fn redo(&self, doc: &mut Document) -> Result<()> {
        for c in &self.changes {
            doc.restore_attr(&c.path, c.new)?;
        }
        Ok(())
    }

    fn set(&mut self, doc: &mut Document, path: &AttributePath, value: f64) -> Result<()> {
        let c = doc.set_attr(path, value)?;
        self.changes.push(c);
        Ok(())
    }
}

/// Which components of a fitted motion reach the object.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Constraint {
    pub translate: bool,
    pub rotate: bool,
    pub scale: bool,
}

impl Constraint {
    pub const RIGID: Constraint = Constraint {
        translate: true,
        rotate: true,
        scale: false,
    };
    pub const FULL: Constraint = Constraint {
        translate: true,
        rotate: true,
        scale: true,
    };
}

impl Default for Constraint {
    fn default() -> Self {
        Self::RIGID
    }
}

/// Writes a snapshot. Weight entries cascade into the driven continuous
/// squidget's members. Entries that no longer resolve are skipped with a
/// warning.
pub fn apply_snapshot(doc: &mut Document, snap: &AttributeSnapshot) -> Result<AttributeUpdate> {
    let mut up = AttributeUpdate::default();
    let budget = doc.registry.continuous.len() + 1;
    write_snapshot(doc, snap, &mut up, budget)?;
    Ok(up)
}

fn write_snapshot(
    doc: &mut Document,
    snap: &AttributeSnapshot,
    up: &mut AttributeUpdate,
    budget: usize,
) -> Result<()> {
    for (path, v) in snap.iter() {
        if let Some(id) = path.weight_target() {
            if doc.registry.continuous(id).is_err() {
                up.warnings.push(format!("skipped stale attribute {path}"));
                continue;
            }
            write_weight(doc, id, v, up, budget)?;
            continue;
        }
        match doc.set_attr(path, v) {
            Ok(c) => up.changes.push(c),
            Err(Error::UnknownAttribute(_) | Error::UnknownObject(_)) => {
                up.warnings.push(format!("skipped stale attribute {path}"));
            }
            Err(Error::RangeViolation { .. }) => {
                up.warnings.push(format!("skipped out-of-range value {path} = {v}"));
            }
            Err(e) => return Err(e),
        }
    }
    Ok(())
}

fn write_weight(
    doc: &mut Document,
    id: &str,
    w: f64,
    up: &mut AttributeUpdate,
    budget: usize,
) -> Result<()> {
    if budget == 0 {
        return Err(Error::NestingCycle(id.to_string()));
    }
    let w = w.clamp(0.0, 1.0);
    up.set(doc, &AttributePath::weight(id), w)?;
    let cs = doc.registry.continuous(id)?.clone();
    let (_, snap) = doc.registry.interpolate(&cs, w)?;
    write_snapshot(doc, &snap, up, budget - 1)
}

/// Restores a discrete squidget's snapshot.
pub fn apply_discrete(doc: &mut Document, id: &str) -> Result<AttributeUpdate> {
    let snap = doc.registry.discrete(id)?.snapshot.clone();
    apply_snapshot(doc, &snap)
}

/// Sets a continuous squidget to weight `w` and writes the blended
/// snapshot, cascading through nested weights.
pub fn apply_continuous(doc: &mut Document, id: &str, w: f64) -> Result<AttributeUpdate> {
    doc.registry.continuous(id)?;
    let mut up = AttributeUpdate::default();
    let budget = doc.registry.continuous.len() + 1;
    write_weight(doc, id, w, &mut up, budget)?;
    Ok(up)
}

/// Composes a local-frame motion onto an object's transform attributes.
///
/// With local transform `L = T·R·S`, the new transform is `L·A`. The
/// constraint removes components of `A` before composing.
pub fn apply_implicit_transform(
    doc: &mut Document,
    object: &str,
    local: &Affine2,
    constraint: Constraint,
) -> Result<AttributeUpdate> {
    let mut t = local.t;
    let mut rot = local.rotation();
    let mut k = local.uniform_scale();
    if !constraint.translate {
        t = Point2::ZERO;
    }
    if !constraint.rotate {
        rot = 0.0;
    }
    if !constraint.scale {
        k = 1.0;
    }
    let cur = doc.scene.object(object)?.transform;
    let l = cur.to_affine();
    let moved = l.apply(t);
    let path = |n: &str| AttributePath::object_attr(object, n);
    let mut up = AttributeUpdate::default();
    if constraint.translate {
        up.set(doc, &path("transform/tx"), moved.x)?;
        up.set(doc, &path("transform/ty"), moved.y)?;
    }
    if constraint.rotate {
        up.set(doc, &path("transform/rotation"), wrap_angle(cur.rotation + rot))?;
    }
    if constraint.scale {
        let s = cur.scale * k;
        if s > 0.0 && s.is_finite() {
            up.set(doc, &path("transform/scale"), s)?;
        } else {
            up.warnings.push(format!("scale {s} out of range; kept {}", cur.scale));
        }
    }
    Ok(up)
}

/// Applies a match with its own payload.
pub fn apply_match(
    doc: &mut Document,
    m: &MatchResult,
    constraint: Constraint,
) -> Result<AttributeUpdate> {
    match &m.payload {
        Payload::None => apply_discrete(doc, &m.squidget),
        Payload::Weight(w) => apply_continuous(doc, &m.squidget, *w),
        Payload::Implicit(fit) => {
            apply_implicit_transform(doc, &fit.squidget.object, &fit.local, constraint)
        }
    }
}

/// Outcome of a scalar search.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarSolution {
    pub update: AttributeUpdate,
    pub value: f64,
    /// Objective at `value`.
    pub residual: f64,
    /// Objective at the starting value.
    pub initial: f64,
}

/// Centered stroke-to-segment distance with `path` set to `v`.
pub fn scalar_objective(
    doc: &Document,
    stroke: &Polyline,
    imp: &ImplicitSquidget,
    path: &AttributePath,
    v: f64,
) -> Result<f64> {
    let mut trial = doc.scene.clone();
    trial.restore_attr(path, v)?;
    let seg = segment_curve(
        &trial,
        &imp.object,
        imp.contour,
        imp.from,
        imp.to,
        doc.config.resample_n,
    )?;
    let screen = trial.world_to_screen();
    let seg = seg.map(|p| screen.apply(p));
    dist_min_reverse(stroke.points(), seg.points(), true)
}

/// Number of coarse samples taken across the window before golden-section
/// refinement, so a wide window does not trap the search in a side basin.
const SCAN_STEPS: usize = 32;

/// Local search for the value of a ranged shape parameter whose segment
/// best fits `stroke` (resampled, screen space).
pub fn solve_scalar(
    doc: &mut Document,
    stroke: &Polyline,
    imp: &ImplicitSquidget,
    path: &AttributePath,
) -> Result<ScalarSolution> {
    if path.root() != imp.object {
        return Err(Error::UnknownAttribute(path.to_string()));
    }
    let range = doc.scene.range_of(path)?;
    let (lo, hi) = match range {
        AttrRange::Unbounded | AttrRange::Positive => {
            return Err(Error::UnboundedAttribute(path.to_string()))
        }
        r => r.search_interval().expect("bounded range"),
    };
    let v0 = doc.scene.get_attr(path)?;
    let span = hi - lo;
    let half = doc.config.search_window * span;
    let a = (v0 - half).max(lo);
    let b = (v0 + half).min(hi);
    let tol = doc.config.search_tolerance * span;
    let g = |v: f64| scalar_objective(doc, stroke, imp, path, v);

    let initial = g(v0)?;
    let (mut best_v, mut best_g) = (v0, initial);
    let mut samples = Vec::with_capacity(SCAN_STEPS + 1);
    for k in 0..=SCAN_STEPS {
        let v = a + (b - a) * k as f64 / SCAN_STEPS as f64;
        let gv = g(v)?;
        samples.push((v, gv));
        if gv < best_g {
            (best_v, best_g) = (v, gv);
        }
    }
    let k = samples
        .iter()
        .enumerate()
        .min_by(|x, y| x.1 .1.total_cmp(&y.1 .1))
        .map(|(k, _)| k)
        .unwrap_or(0);
    let lo_k = samples[k.saturating_sub(1)].0;
    let hi_k = samples[(k + 1).min(SCAN_STEPS)].0;
    let (v, gv) = golden_section(&g, lo_k, hi_k, tol)?;
    if gv < best_g {
        (best_v, best_g) = (v, gv);
    }
    let mut update = AttributeUpdate::default();
    update.set(doc, path, best_v)?;
    Ok(ScalarSolution {
        update,
        value: best_v,
        residual: best_g,
        initial,
    })
}

/// Minimum of a unimodal `f` on `[a, b]` to bracket width `tol`; returns the
/// best point evaluated.
pub fn golden_section(
    f: &impl Fn(f64) -> Result<f64>,
    mut a: f64,
    mut b: f64,
    tol: f64,
) -> Result<(f64, f64)> {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c)?, f(d)?);
    let mut best = if fc <= fd { (c, fc) } else { (d, fd) };
    while b - a > tol {
        if fc <= fd {
            b = d;
            (d, fd) = (c, fc);
            c = b - inv_phi * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            (c, fc) = (d, fd);
            d = a + inv_phi * (b - a);
            fd = f(d)?;
        }
        for (x, fx) in [(c, fc), (d, fd)] {
            if fx < best.1 {
                best = (x, fx);
            }
        }
        if c >= d {
            break;
        }
    }
    Ok(best)
}

/// Weight under a pointer: its projection onto the screen-space path.
pub fn weight_under(doc: &Document, id: &str, pointer: Point2) -> Result<f64> {
    let cs = doc.registry.continuous(id)?;
    let path = doc.polyline_to_screen(&cs.path);
    let hit = path.project(pointer);
    Ok(weight_at(cs.members.len(), hit.segment, hit.local))
}

/// Local motion equal to the fitted one followed by a screen-space shift.
pub fn dragged_local(doc: &Document, fit: &ImplicitFit, shift: Point2) -> Result<Affine2> {
    let x = doc.scene.local_to_screen(&fit.squidget.object)?;
    let screen = Affine2::similarity(1.0, 0.0, shift).compose(&fit.screen);
    Ok(x.inverse()
        .ok_or(Error::RankDeficient)?
        .compose(&screen)
        .compose(&x))
}
