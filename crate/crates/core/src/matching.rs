//! Scoring control strokes against every squidget and picking the best.
//!
//! All comparisons happen in screen space: explicit curves and implicit
//! segments are stored in world space and mapped through the view first.

use std::cmp::Ordering;

use serde::Serialize;

use crate::config::Config;
use crate::document::Document;
use crate::error::{Error, Result};
use crate::geometry::{
    bbox_diagonal, best_fit_rigid, best_fit_similarity, crossings, dist_min_reverse,
    pairwise_dist, Affine2, Point2, Polyline,
};
use crate::registry::{
    implicit_squidgets, weight_at, ContinuousSquidget, DiscreteSquidget, ImplicitSquidget,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SquidgetKind {
    Discrete,
    Continuous,
    Implicit,
}

impl SquidgetKind {
    pub fn name(self) -> &'static str {
        match self {
            SquidgetKind::Discrete => "discrete",
            SquidgetKind::Continuous => "continuous",
            SquidgetKind::Implicit => "implicit",
        }
    }
}

/// Result of fitting a stroke to an implicit squidget.
#[derive(Debug, Clone, PartialEq)]
pub struct ImplicitFit {
    pub squidget: ImplicitSquidget,
    /// Screen-space motion taking the partial curve onto the stroke.
    pub screen: Affine2,
    /// The same motion expressed in the object's local frame.
    pub local: Affine2,
    /// Partial curve (stroke points projected onto the segment), screen space.
    pub partial: Polyline,
    /// The resampled stroke the fit was computed against.
    pub stroke: Polyline,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Payload {
    None,
    Weight(f64),
    Implicit(Box<ImplicitFit>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatchResult {
    pub squidget: String,
    pub kind: SquidgetKind,
    pub distance: f64,
    pub dev: f64,
    pub score: f64,
    pub payload: Payload,
}

impl MatchResult {
    pub fn weight(&self) -> Option<f64> {
        match self.payload {
            Payload::Weight(w) => Some(w),
            _ => None,
        }
    }

    pub fn implicit(&self) -> Option<&ImplicitFit> {
        match &self.payload {
            Payload::Implicit(f) => Some(f),
            _ => None,
        }
    }
}

/// Which rigid components a fit may use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FitOptions {
    /// Fit a uniform scale as well.
    pub similarity: bool,
}

/// Stroke-to-curve distance for a discrete squidget, both in screen space.
pub fn match_discrete(stroke: &Polyline, curve: &Polyline, centered: bool) -> Result<f64> {
    dist_min_reverse(stroke.points(), curve.points(), centered)
}

fn discrete_screen(doc: &Document, d: &DiscreteSquidget) -> Polyline {
    doc.polyline_to_screen(&d.curve)
}

/// Weight `w` and distance for a continuous squidget.
///
/// `raw` is the stroke as drawn and `stroke` its resampled form. A stroke
/// that crosses the path takes `w` from the first crossing; otherwise `w`
/// minimizes the distance to the interpolated curve, solved in closed form
/// per member pair.
pub fn match_continuous(
    doc: &Document,
    raw: &Polyline,
    stroke: &Polyline,
    cs: &ContinuousSquidget,
    centered: bool,
) -> Result<(f64, f64)> {
    let m = cs.members.len();
    let path = doc.polyline_to_screen(&cs.path);
    let w = match crossings(raw, &path).first() {
        Some(c) => weight_at(m, c.b_segment, c.b_local),
        None => closed_form_weight(doc, stroke, cs, centered)?,
    };
    let (curve, _) = doc.registry.interpolate(cs, w)?;
    let d = dist_min_reverse(
        stroke.points(),
        doc.polyline_to_screen(&curve).points(),
        centered,
    )?;
    Ok((w, d))
}

fn closed_form_weight(
    doc: &Document,
    stroke: &Polyline,
    cs: &ContinuousSquidget,
    centered: bool,
) -> Result<f64> {
    let m = cs.members.len();
    let curves: Vec<Polyline> = cs
        .members
        .iter()
        .map(|id| Ok(discrete_screen(doc, doc.registry.discrete(id)?)))
        .collect::<Result<_>>()?;
    let forward: Vec<Point2> = stroke.points().to_vec();
    let backward: Vec<Point2> = forward.iter().rev().copied().collect();
    let mut best = (f64::INFINITY, 0.0);
    for (i, pair) in curves.windows(2).enumerate() {
        for s in [&forward, &backward] {
            let (u, d) = pair_weight(s, pair[0].points(), pair[1].points(), centered)?;
            if d < best.0 {
                best = (d, weight_at(m, i, u));
            }
        }
    }
    Ok(best.1)
}

/// Minimizer of `Σ‖sᵢ − (pᵢ + u(qᵢ − pᵢ))‖²` over `u ∈ [0, 1]`, and the
/// distance there.
pub fn pair_weight(s: &[Point2], p: &[Point2], q: &[Point2], centered: bool) -> Result<(f64, f64)> {
    if s.len() != p.len() || p.len() != q.len() {
        return Err(Error::CountMismatch(s.len(), p.len()));
    }
    let shift = |pts: &[Point2]| -> Vec<Point2> {
        if centered {
            let c = crate::geometry::centroid(pts);
            pts.iter().map(|&x| x - c).collect()
        } else {
            pts.to_vec()
        }
    };
    let (s, p, q) = (shift(s), shift(p), shift(q));
    let mut num = 0.0;
    let mut den = 0.0;
    for ((&s, &p), &q) in s.iter().zip(&p).zip(&q) {
        let d = q - p;
        num += (s - p).dot(d);
        den += d.norm_squared();
    }
    let u = if den > 0.0 { (num / den).clamp(0.0, 1.0) } else { 0.0 };
    let blend: Vec<Point2> = p.iter().zip(&q).map(|(&a, &b)| a.lerp(b, u)).collect();
    Ok((u, pairwise_dist(&s, &blend, false)?))
}

/// Fits an implicit squidget's segment to a resampled screen-space stroke.
///
/// Each stroke point is projected onto the segment to form the partial
/// curve, which is then registered onto the stroke. Projection and fit
/// alternate until the correspondences stop moving or the iteration budget
/// runs out. Two starts are tried, the current pose and a centroid-aligned
/// one, and the closer result kept. Returns `None` for partial curves too
/// short to fit.
pub fn match_implicit(
    doc: &Document,
    stroke: &Polyline,
    imp: &ImplicitSquidget,
    opts: FitOptions,
) -> Result<Option<(ImplicitFit, f64, f64)>> {
    let segment = doc.polyline_to_screen(&imp.segment);
    let shift = stroke.centroid() - segment.centroid();
    let mut best: Option<Registration> = None;
    for start in [Affine2::IDENTITY, Affine2::similarity(1.0, 0.0, shift)] {
        let Some(r) = register(&doc.config, stroke, &segment, start, opts)? else {
            continue;
        };
        if best.as_ref().is_none_or(|b| r.distance < b.distance) {
            best = Some(r);
        }
    }
    let Some(Registration {
        a,
        partial,
        distance,
    }) = best
    else {
        return Ok(None);
    };
    let x = doc.scene.local_to_screen(&imp.object)?;
    let local = x
        .inverse()
        .ok_or(Error::RankDeficient)?
        .compose(&a)
        .compose(&x);
    let dev = local.t.norm_squared();
    let fit = ImplicitFit {
        squidget: imp.clone(),
        screen: a,
        local,
        partial,
        stroke: stroke.clone(),
    };
    Ok(Some((fit, distance, dev)))
}

struct Registration {
    a: Affine2,
    partial: Polyline,
    distance: f64,
}

/// Alternating projection and fit from an initial motion `start`.
fn register(
    cfg: &Config,
    stroke: &Polyline,
    segment: &Polyline,
    start: Affine2,
    opts: FitOptions,
) -> Result<Option<Registration>> {
    let mut a = start;
    let mut partial: Vec<Point2> = Vec::new();
    let mut params: Vec<f64> = Vec::new();
    for _ in 0..cfg.fit_iterations.max(1) {
        let inv = a.inverse().ok_or(Error::RankDeficient)?;
        let proj: Vec<_> = stroke
            .points()
            .iter()
            .map(|&s| segment.project(inv.apply(s)))
            .collect();
        let next_params: Vec<f64> = proj.iter().map(|p| p.param).collect();
        let converged = next_params == params;
        params = next_params;
        partial = proj.iter().map(|p| p.point).collect();
        if converged {
            break;
        }
        let fit = if opts.similarity {
            best_fit_similarity(&partial, stroke.points())
        } else {
            best_fit_rigid(&partial, stroke.points()).map(|r| r.to_affine())
        };
        a = match fit {
            Ok(f) => f,
            Err(Error::RankDeficient) => return Ok(None),
            Err(e) => return Err(e),
        };
    }
    let lo = params.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = params.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if hi - lo < cfg.min_coverage {
        return Ok(None);
    }
    let moved: Vec<Point2> = partial.iter().map(|&p| a.apply(p)).collect();
    let distance = pairwise_dist(stroke.points(), &moved, false)?;
    Ok(Polyline::new(partial).ok().map(|partial| Registration {
        a,
        partial,
        distance,
    }))
}

pub fn explicit_score(cfg: &Config, distance: f64) -> f64 {
    1.0 / (distance + cfg.epsilon)
}

pub fn implicit_score(cfg: &Config, distance: f64, dev: f64) -> f64 {
    (1.0 - cfg.lambda) / (distance + cfg.epsilon) + cfg.lambda / (dev + cfg.epsilon)
}

/// Largest distance a candidate may have and still be selectable: a mean
/// squared per-point error of `(threshold · stroke diagonal)²`.
pub fn distance_cutoff(cfg: &Config, stroke: &Polyline) -> f64 {
    let r = cfg.threshold * bbox_diagonal(stroke.points());
    stroke.len() as f64 * r * r
}

/// Orders ids like `d2` before `d10`.
pub fn id_order(a: &str, b: &str) -> Ordering {
    fn split(s: &str) -> (&str, Option<u64>) {
        let cut = s.trim_end_matches(|c: char| c.is_ascii_digit()).len();
        (&s[..cut], s[cut..].parse().ok())
    }
    split(a).cmp(&split(b)).then(a.cmp(b))
}

/// Candidate pool for a stroke: `Some(canvas)` when the stroke lies inside a
/// canvas that owns squidgets, restricting the pool to that canvas.
fn owning_canvas(doc: &Document, raw: &Polyline) -> Option<String> {
    let world = doc.polyline_to_world(raw);
    let canvas = doc.registry.canvas_containing(world.points())?;
    let owns = doc.registry.discrete.iter().any(|d| d.canvas == canvas.id);
    owns.then(|| canvas.id.clone())
}

/// Options for ranking.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SelectOptions {
    /// Compare explicit curves by shape only (centered distances).
    pub shape_only: bool,
}

/// Every candidate scored against `raw` (screen space), best first.
/// Implicit candidates that cannot be fitted are omitted.
pub fn rank_candidates(
    doc: &Document,
    raw: &Polyline,
    opts: SelectOptions,
) -> Result<Vec<MatchResult>> {
    let cfg = &doc.config;
    let stroke = raw.resample(cfg.resample_n)?;
    let centered = opts.shape_only || cfg.shape_only;
    let canvas = owning_canvas(doc, raw);
    let mut out = Vec::new();
    for d in &doc.registry.discrete {
        if canvas.as_ref().is_some_and(|c| *c != d.canvas) {
            continue;
        }
        let distance = match_discrete(&stroke, &discrete_screen(doc, d), centered)?;
        out.push(MatchResult {
            squidget: d.id.clone(),
            kind: SquidgetKind::Discrete,
            distance,
            dev: 0.0,
            score: explicit_score(cfg, distance),
            payload: Payload::None,
        });
    }
    let on_canvas: Option<Vec<String>> = canvas.as_ref().map(|c| {
        doc.registry
            .continuous_on_canvas(c)
            .into_iter()
            .map(|cs| cs.id.clone())
            .collect()
    });
    for cs in &doc.registry.continuous {
        if on_canvas.as_ref().is_some_and(|ids| !ids.contains(&cs.id)) {
            continue;
        }
        let (w, distance) = match_continuous(doc, raw, &stroke, cs, centered)?;
        out.push(MatchResult {
            squidget: cs.id.clone(),
            kind: SquidgetKind::Continuous,
            distance,
            dev: 0.0,
            score: explicit_score(cfg, distance),
            payload: Payload::Weight(w),
        });
    }
    if canvas.is_none() {
        for imp in implicit_squidgets(&doc.scene, cfg) {
            let fitted = match_implicit(doc, &stroke, &imp, FitOptions { similarity: false })?;
            if let Some((fit, distance, dev)) = fitted {
                out.push(MatchResult {
                    squidget: imp.id.clone(),
                    kind: SquidgetKind::Implicit,
                    distance,
                    dev,
                    score: implicit_score(cfg, distance, dev),
                    payload: Payload::Implicit(Box::new(fit)),
                });
            }
        }
    }
    out.sort_by(|a, b| {
        b.score
            .total_cmp(&a.score)
            .then_with(|| id_order(&a.squidget, &b.squidget))
    });
    Ok(out)
}

/// The best candidate within the distance cut-off, if any.
pub fn select(doc: &Document, raw: &Polyline, opts: SelectOptions) -> Result<Option<MatchResult>> {
    let stroke = raw.resample(doc.config.resample_n)?;
    let cutoff = distance_cutoff(&doc.config, &stroke);
    Ok(rank_candidates(doc, raw, opts)?
        .into_iter()
        .find(|m| m.distance <= cutoff))
}

/// Re-matches `raw` against one known squidget, with no cut-off.
pub fn match_squidget(
    doc: &Document,
    raw: &Polyline,
    id: &str,
    centered: bool,
    fit: FitOptions,
) -> Result<Option<MatchResult>> {
    let cfg = &doc.config;
    let stroke = raw.resample(cfg.resample_n)?;
    if let Ok(d) = doc.registry.discrete(id) {
        let distance = match_discrete(&stroke, &discrete_screen(doc, d), centered)?;
        return Ok(Some(MatchResult {
            squidget: id.to_string(),
            kind: SquidgetKind::Discrete,
            distance,
            dev: 0.0,
            score: explicit_score(cfg, distance),
            payload: Payload::None,
        }));
    }
    if let Ok(cs) = doc.registry.continuous(id) {
        let (w, distance) = match_continuous(doc, raw, &stroke, cs, centered)?;
        return Ok(Some(MatchResult {
            squidget: id.to_string(),
            kind: SquidgetKind::Continuous,
            distance,
            dev: 0.0,
            score: explicit_score(cfg, distance),
            payload: Payload::Weight(w),
        }));
    }
    let imp = implicit_squidgets(&doc.scene, cfg)
        .into_iter()
        .find(|i| i.id == id)
        .ok_or_else(|| Error::UnknownSquidget(id.to_string()))?;
    Ok(match_implicit(doc, &stroke, &imp, fit)?.map(|(f, distance, dev)| MatchResult {
        squidget: id.to_string(),
        kind: SquidgetKind::Implicit,
        distance,
        dev,
        score: implicit_score(cfg, distance, dev),
        payload: Payload::Implicit(Box::new(f)),
    }))
}
