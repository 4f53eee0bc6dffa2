//! Storage of canvases and explicit squidgets, plus the create-mode gesture
//! rules that add and remove them.

mod implicit;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

pub use implicit::{implicit_squidgets, segment_curve, ImplicitSquidget};

use crate::error::{Error, Result};
use crate::geometry::{crossings, Point2, Polyline};
use crate::scene::{AttributePath, AttributeSnapshot};

/// Axis-aligned rectangle in world units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Rect {
    pub min: Point2,
    pub max: Point2,
}

impl Rect {
    /// Normalizes corner order.
    pub fn from_corners(a: Point2, b: Point2) -> Self {
        Rect {
            min: Point2::new(a.x.min(b.x), a.y.min(b.y)),
            max: Point2::new(a.x.max(b.x), a.y.max(b.y)),
        }
    }

    pub fn area(&self) -> f64 {
        (self.max.x - self.min.x) * (self.max.y - self.min.y)
    }

    pub fn contains(&self, p: Point2) -> bool {
        p.x >= self.min.x && p.x <= self.max.x && p.y >= self.min.y && p.y <= self.max.y
    }

    /// Closed boundary, counter-clockwise from `min`.
    pub fn boundary(&self) -> Polyline {
        let (a, b) = (self.min, self.max);
        Polyline::new(vec![
            a,
            Point2::new(b.x, a.y),
            b,
            Point2::new(a.x, b.y),
            a,
        ])
        .expect("positive-area rectangle")
    }
}

/// A region that receives authored strokes and fixes the attribute set
/// their squidgets control.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Canvas {
    pub id: String,
    pub region: Rect,
    pub attributes: Vec<AttributePath>,
    pub z: i64,
}

/// A curve bookmarking one attribute configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiscreteSquidget {
    pub id: String,
    pub canvas: String,
    /// World-space curve.
    pub curve: Polyline,
    pub snapshot: AttributeSnapshot,
}

/// An ordered family of discrete squidgets blended along a path through
/// their curve midpoints.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContinuousSquidget {
    pub id: String,
    pub members: Vec<String>,
    pub path: Polyline,
    /// Current interpolation weight, exposed as `squidget/<id>/w`.
    pub weight: f64,
}

/// What a create-mode stroke does, in precedence order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Gesture {
    /// Removes every listed canvas, discrete squidget or continuous path.
    CrossOut(Vec<String>),
    /// Builds a continuous squidget from these discrete squidgets, in
    /// stroke order.
    Connect(Vec<String>),
    /// Authors a new discrete squidget.
    Discrete,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum Entity {
    Canvas(Canvas),
    Discrete(DiscreteSquidget),
    Continuous(ContinuousSquidget),
}

impl Entity {
    pub fn id(&self) -> &str {
        match self {
            Entity::Canvas(c) => &c.id,
            Entity::Discrete(d) => &d.id,
            Entity::Continuous(c) => &c.id,
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Entity::Canvas(_) => "canvas",
            Entity::Discrete(_) => "discrete",
            Entity::Continuous(_) => "continuous",
        }
    }
}

/// An invertible registry mutation. Entities carry their position in the
/// owning list so undo reinstates the exact prior ordering.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RegistryEdit {
    pub added: Vec<(usize, Entity)>,
    pub removed: Vec<(usize, Entity)>,
    pub next_id_before: u64,
    pub next_id_after: u64,
}

impl RegistryEdit {
    pub fn is_empty(&self) -> bool {
        self.added.is_empty() && self.removed.is_empty()
    }

    pub fn added_ids(&self) -> Vec<String> {
        self.added.iter().map(|(_, e)| e.id().to_string()).collect()
    }

    pub fn removed_ids(&self) -> Vec<String> {
        self.removed.iter().map(|(_, e)| e.id().to_string()).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Registry {
    pub next_id: u64,
    pub canvases: Vec<Canvas>,
    pub discrete: Vec<DiscreteSquidget>,
    pub continuous: Vec<ContinuousSquidget>,
}

impl Default for Registry {
    fn default() -> Self {
        Self {
            next_id: 1,
            canvases: Vec::new(),
            discrete: Vec::new(),
            continuous: Vec::new(),
        }
    }
}

impl Registry {
    pub fn new() -> Self {
        Self::default()
    }

    fn fresh_id(&mut self, prefix: &str) -> String {
        let id = format!("{prefix}{}", self.next_id);
        self.next_id += 1;
        id
    }

    pub fn canvas(&self, id: &str) -> Result<&Canvas> {
        self.canvases
            .iter()
            .find(|c| c.id == id)
            .ok_or_else(|| Error::UnknownCanvas(id.to_string()))
    }

    pub fn discrete(&self, id: &str) -> Result<&DiscreteSquidget> {
        self.discrete
            .iter()
            .find(|d| d.id == id)
            .ok_or_else(|| Error::UnknownSquidget(id.to_string()))
    }

    pub fn continuous(&self, id: &str) -> Result<&ContinuousSquidget> {
        self.continuous
            .iter()
            .find(|c| c.id == id)
            .ok_or_else(|| Error::UnknownSquidget(id.to_string()))
    }

    pub(crate) fn continuous_mut(&mut self, id: &str) -> Result<&mut ContinuousSquidget> {
        self.continuous
            .iter_mut()
            .find(|c| c.id == id)
            .ok_or_else(|| Error::UnknownSquidget(id.to_string()))
    }

    pub fn contains_id(&self, id: &str) -> bool {
        self.canvas(id).is_ok() || self.discrete(id).is_ok() || self.continuous(id).is_ok()
    }

    /// Topmost canvas whose region holds every point.
    pub fn canvas_containing(&self, points: &[Point2]) -> Option<&Canvas> {
        self.canvases
            .iter()
            .enumerate()
            .filter(|(_, c)| points.iter().all(|&p| c.region.contains(p)))
            .max_by(|(i, a), (j, b)| a.z.cmp(&b.z).then(j.cmp(i)))
            .map(|(_, c)| c)
    }

    /// Continuous squidgets with at least one member on `canvas`.
    pub fn continuous_on_canvas(&self, canvas: &str) -> Vec<&ContinuousSquidget> {
        self.continuous
            .iter()
            .filter(|c| {
                c.members
                    .iter()
                    .any(|m| self.discrete(m).is_ok_and(|d| d.canvas == canvas))
            })
            .collect()
    }

    fn push(&mut self, e: Entity) -> usize {
        match e {
            Entity::Canvas(c) => {
                self.canvases.push(c);
                self.canvases.len() - 1
            }
            Entity::Discrete(d) => {
                self.discrete.push(d);
                self.discrete.len() - 1
            }
            Entity::Continuous(c) => {
                self.continuous.push(c);
                self.continuous.len() - 1
            }
        }
    }

    fn add_entity(&mut self, make: impl FnOnce(&mut Self) -> Result<Entity>) -> Result<RegistryEdit> {
        let before = self.next_id;
        let entity = match make(self) {
            Ok(e) => e,
            Err(err) => {
                self.next_id = before;
                return Err(err);
            }
        };
        let index = self.push(entity.clone());
        Ok(RegistryEdit {
            added: vec![(index, entity)],
            removed: Vec::new(),
            next_id_before: before,
            next_id_after: self.next_id,
        })
    }

    /// Registers a canvas over `region` controlling `attributes`.
    pub fn create_canvas(
        &mut self,
        region: Rect,
        attributes: Vec<AttributePath>,
    ) -> Result<RegistryEdit> {
        if !(region.area() > 0.0) || !region.min.is_finite() || !region.max.is_finite() {
            return Err(Error::EmptyRegion);
        }
        let z = self.canvases.iter().map(|c| c.z + 1).max().unwrap_or(0);
        self.add_entity(|r| {
            Ok(Entity::Canvas(Canvas {
                id: r.fresh_id("canvas"),
                region,
                attributes,
                z,
            }))
        })
    }

    /// Stores a discrete squidget whose curve is `stroke` smoothed and
    /// resampled to `n` points. `snapshot` holds the canvas attributes'
    /// current values.
    pub fn create_discrete(
        &mut self,
        canvas: &str,
        stroke: &Polyline,
        snapshot: AttributeSnapshot,
        smoothing: usize,
        n: usize,
    ) -> Result<RegistryEdit> {
        self.canvas(canvas)?;
        let curve = stroke.smooth(smoothing).resample(n)?;
        let canvas = canvas.to_string();
        self.add_entity(|r| {
            Ok(Entity::Discrete(DiscreteSquidget {
                id: r.fresh_id("d"),
                canvas,
                curve,
                snapshot,
            }))
        })
    }

    /// Inserts a prepared discrete squidget as-is (document loading, tests).
    pub fn insert_discrete(&mut self, d: DiscreteSquidget) -> Result<RegistryEdit> {
        self.canvas(&d.canvas)?;
        if self.contains_id(&d.id) {
            return Err(Error::InvalidScene(format!("duplicate id {}", d.id)));
        }
        self.add_entity(|_| Ok(Entity::Discrete(d)))
    }

    /// Discrete squidgets crossed exactly once, in stroke order.
    fn single_crossed(&self, stroke: &Polyline) -> Vec<String> {
        let mut hits: Vec<(f64, &str)> = self
            .discrete
            .iter()
            .filter_map(|d| {
                let cs = crossings(stroke, &d.curve);
                (cs.len() == 1).then(|| (cs[0].along_a, d.id.as_str()))
            })
            .collect();
        hits.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(b.1)));
        hits.into_iter().map(|(_, id)| id.to_string()).collect()
    }

    /// Every curve the stroke crosses at least twice.
    fn crossed_out(&self, stroke: &Polyline) -> Vec<String> {
        let twice = |c: &Polyline| crossings(stroke, c).len() >= 2;
        let mut ids: Vec<String> = Vec::new();
        ids.extend(
            self.canvases
                .iter()
                .filter(|c| twice(&c.region.boundary()))
                .map(|c| c.id.clone()),
        );
        ids.extend(
            self.discrete
                .iter()
                .filter(|d| twice(&d.curve))
                .map(|d| d.id.clone()),
        );
        ids.extend(
            self.continuous
                .iter()
                .filter(|c| twice(&c.path))
                .map(|c| c.id.clone()),
        );
        ids
    }

    /// Classifies a world-space create-mode stroke: cross-out first, then
    /// connect, otherwise a new discrete squidget.
    pub fn classify(&self, stroke: &Polyline) -> Gesture {
        let out = self.crossed_out(stroke);
        if !out.is_empty() {
            return Gesture::CrossOut(out);
        }
        let members = self.single_crossed(stroke);
        if members.len() >= 2 {
            Gesture::Connect(members)
        } else {
            Gesture::Discrete
        }
    }

    /// Builds a continuous squidget from the discrete curves `stroke`
    /// crosses exactly once.
    pub fn create_continuous(&mut self, stroke: &Polyline) -> Result<RegistryEdit> {
        if !self.crossed_out(stroke).is_empty() {
            return Err(Error::NotAConnectGesture);
        }
        let members = self.single_crossed(stroke);
        self.connect(members)
    }

    /// Builds a continuous squidget over `members` in the given order.
    pub fn connect(&mut self, members: Vec<String>) -> Result<RegistryEdit> {
        if members.len() < 2 {
            return Err(Error::NotAConnectGesture);
        }
        let curves: Vec<&DiscreteSquidget> = members
            .iter()
            .map(|m| self.discrete(m))
            .collect::<Result<_>>()?;
        let n = curves[0].curve.len();
        if let Some(bad) = curves.iter().find(|d| d.curve.len() != n) {
            return Err(Error::CountMismatch(n, bad.curve.len()));
        }
        let path = Polyline::new(curves.iter().map(|d| d.curve.centroid()).collect())?;
        let drives: BTreeSet<String> = curves
            .iter()
            .flat_map(|d| d.snapshot.paths().filter_map(|p| p.weight_target()))
            .map(str::to_string)
            .collect();
        let id_preview = format!("c{}", self.next_id);
        self.check_acyclic_with(&id_preview, &drives)?;
        self.add_entity(|r| {
            Ok(Entity::Continuous(ContinuousSquidget {
                id: r.fresh_id("c"),
                members,
                path,
                weight: 0.0,
            }))
        })
    }

    /// Continuous squidgets whose weight `id` writes through its members'
    /// snapshots.
    pub fn drives(&self, cs: &ContinuousSquidget) -> BTreeSet<String> {
        cs.members
            .iter()
            .filter_map(|m| self.discrete(m).ok())
            .flat_map(|d| d.snapshot.paths().filter_map(|p| p.weight_target()))
            .map(str::to_string)
            .collect()
    }

    fn drive_graph(&self) -> BTreeMap<String, BTreeSet<String>> {
        self.continuous
            .iter()
            .map(|c| (c.id.clone(), self.drives(c)))
            .collect()
    }

    fn check_acyclic_with(&self, new_id: &str, new_edges: &BTreeSet<String>) -> Result<()> {
        let mut graph = self.drive_graph();
        graph.insert(new_id.to_string(), new_edges.clone());
        find_cycle(&graph).map_or(Ok(()), |c| Err(Error::NestingCycle(c)))
    }

    /// Errors if any continuous squidget (transitively) drives itself.
    pub fn check_acyclic(&self) -> Result<()> {
        find_cycle(&self.drive_graph()).map_or(Ok(()), |c| Err(Error::NestingCycle(c)))
    }

    /// Removes the given ids plus everything that depends on them:
    /// a canvas takes its squidgets along, a discrete squidget takes any
    /// continuous squidget it belongs to. Unknown ids are ignored.
    pub fn delete(&mut self, ids: &[String]) -> RegistryEdit {
        let mut doomed: BTreeSet<String> = ids.iter().cloned().collect();
        for c in &self.canvases {
            if doomed.contains(&c.id) {
                for d in self.discrete.iter().filter(|d| d.canvas == c.id) {
                    doomed.insert(d.id.clone());
                }
            }
        }
        for c in &self.continuous {
            if c.members.iter().any(|m| doomed.contains(m)) {
                doomed.insert(c.id.clone());
            }
        }
        let mut removed = Vec::new();
        let mut take = |list: Vec<Entity>| -> Vec<Entity> {
            let mut keep = Vec::new();
            for (i, e) in list.into_iter().enumerate() {
                if doomed.contains(e.id()) {
                    removed.push((i, e));
                } else {
                    keep.push(e);
                }
            }
            keep
        };
        let canvases = take(self.canvases.drain(..).map(Entity::Canvas).collect());
        let discrete = take(self.discrete.drain(..).map(Entity::Discrete).collect());
        let continuous = take(self.continuous.drain(..).map(Entity::Continuous).collect());
        for e in canvases.into_iter().chain(discrete).chain(continuous) {
            self.push(e);
        }
        RegistryEdit {
            added: Vec::new(),
            removed,
            next_id_before: self.next_id,
            next_id_after: self.next_id,
        }
    }

    /// Applies a cross-out stroke, returning the edit (possibly empty).
    pub fn delete_by_crossout(&mut self, stroke: &Polyline) -> RegistryEdit {
        let targets = self.crossed_out(stroke);
        self.delete(&targets)
    }

    fn remove_by_id(&mut self, e: &Entity) {
        let id = e.id();
        match e {
            Entity::Canvas(_) => self.canvases.retain(|c| c.id != id),
            Entity::Discrete(_) => self.discrete.retain(|d| d.id != id),
            Entity::Continuous(_) => self.continuous.retain(|c| c.id != id),
        }
    }

    fn insert_at(&mut self, index: usize, e: Entity) {
        match e {
            Entity::Canvas(c) => self.canvases.insert(index.min(self.canvases.len()), c),
            Entity::Discrete(d) => self.discrete.insert(index.min(self.discrete.len()), d),
            Entity::Continuous(c) => self.continuous.insert(index.min(self.continuous.len()), c),
        }
    }

    fn reinsert(&mut self, entries: &[(usize, Entity)]) {
        let mut sorted: Vec<&(usize, Entity)> = entries.iter().collect();
        sorted.sort_by_key(|(i, _)| *i);
        for (i, e) in sorted {
            self.insert_at(*i, e.clone());
        }
    }

    pub fn undo(&mut self, edit: &RegistryEdit) {
        for (_, e) in edit.added.iter().rev() {
            self.remove_by_id(e);
        }
        self.reinsert(&edit.removed);
        self.next_id = edit.next_id_before;
    }

    pub fn redo(&mut self, edit: &RegistryEdit) {
        for (_, e) in &edit.removed {
            self.remove_by_id(e);
        }
        self.reinsert(&edit.added);
        self.next_id = edit.next_id_after;
    }

    /// Curve and snapshot at weight `w` (clamped to `[0, 1]`). With `m`
    /// members, `w` spans `m − 1` equal segments so every member sits at
    /// `w = i / (m − 1)` and is reproduced exactly there.
    pub fn interpolate(
        &self,
        cs: &ContinuousSquidget,
        w: f64,
    ) -> Result<(Polyline, AttributeSnapshot)> {
        let (i, u) = segment_of(cs.members.len(), w);
        let a = self.discrete(&cs.members[i])?;
        if u == 0.0 {
            return Ok((a.curve.clone(), a.snapshot.clone()));
        }
        let b = self.discrete(&cs.members[i + 1])?;
        if u == 1.0 {
            return Ok((b.curve.clone(), b.snapshot.clone()));
        }
        let curve = blend_curves(&a.curve, &b.curve, u)?;
        Ok((curve, a.snapshot.blend(&b.snapshot, u)))
    }

    /// Structural problems (dangling references, bad counts, cycles).
    pub fn validate(&self) -> Vec<String> {
        let mut issues = Vec::new();
        let mut ids = BTreeSet::new();
        let all = self
            .canvases
            .iter()
            .map(|c| &c.id)
            .chain(self.discrete.iter().map(|d| &d.id))
            .chain(self.continuous.iter().map(|c| &c.id));
        for id in all {
            if !ids.insert(id) {
                issues.push(format!("duplicate registry id {id:?}"));
            }
        }
        for c in &self.canvases {
            if !(c.region.area() > 0.0) {
                issues.push(format!("{}: canvas region must have positive area", c.id));
            }
        }
        for d in &self.discrete {
            if self.canvas(&d.canvas).is_err() {
                issues.push(format!("{}: unknown canvas {:?}", d.id, d.canvas));
            }
        }
        for c in &self.continuous {
            if c.members.len() < 2 {
                issues.push(format!("{}: needs at least 2 members", c.id));
            }
            if c.path.len() != c.members.len() {
                issues.push(format!("{}: path point count differs from member count", c.id));
            }
            if !(0.0..=1.0).contains(&c.weight) {
                issues.push(format!("{}: weight {} outside [0, 1]", c.id, c.weight));
            }
            let counts: BTreeSet<usize> = c
                .members
                .iter()
                .filter_map(|m| self.discrete(m).ok().map(|d| d.curve.len()))
                .collect();
            if counts.len() > 1 {
                issues.push(format!("{}: member curves differ in point count", c.id));
            }
            for m in &c.members {
                if self.discrete(m).is_err() {
                    issues.push(format!("{}: unknown member {m:?}", c.id));
                }
            }
        }
        if let Err(e) = self.check_acyclic() {
            issues.push(e.to_string());
        }
        issues
    }
}

/// Segment index and local weight for `w` on an `m`-member path.
pub fn segment_of(members: usize, w: f64) -> (usize, f64) {
    let gaps = members.saturating_sub(1).max(1);
    let w = if w.is_nan() { 0.0 } else { w.clamp(0.0, 1.0) };
    if w >= 1.0 {
        return (gaps - 1, 1.0);
    }
    let x = w * gaps as f64;
    let i = (x.floor() as usize).min(gaps - 1);
    (i, (x - i as f64).clamp(0.0, 1.0))
}

/// Weight of a point at `local ∈ [0, 1]` along path segment `segment`.
pub fn weight_at(members: usize, segment: usize, local: f64) -> f64 {
    let gaps = members.saturating_sub(1).max(1) as f64;
    ((segment as f64 + local) / gaps).clamp(0.0, 1.0)
}

fn blend_curves(a: &Polyline, b: &Polyline, u: f64) -> Result<Polyline> {
    if a.len() != b.len() {
        return Err(Error::CountMismatch(a.len(), b.len()));
    }
    let pts: Vec<Point2> = a
        .points()
        .iter()
        .zip(b.points())
        .map(|(&p, &q)| Point2::new(lerp(p.x, q.x, u), lerp(p.y, q.y, u)))
        .collect();
    // two members can blend into a single point only if both curves are
    // degenerate, which `Polyline` rules out; keep the error path anyway
    Polyline::new(pts)
}

fn lerp(a: f64, b: f64, u: f64) -> f64 {
    crate::scene::lerp_scalar(a, b, u)
}

fn find_cycle(graph: &BTreeMap<String, BTreeSet<String>>) -> Option<String> {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        Active,
        Done,
    }
    fn visit(
        node: &str,
        graph: &BTreeMap<String, BTreeSet<String>>,
        marks: &mut BTreeMap<String, Mark>,
    ) -> Option<String> {
        match marks.get(node) {
            Some(Mark::Active) => return Some(node.to_string()),
            Some(Mark::Done) => return None,
            None => {}
        }
        marks.insert(node.to_string(), Mark::Active);
        if let Some(next) = graph.get(node) {
            for n in next {
                if let Some(c) = visit(n, graph, marks) {
                    return Some(c);
                }
            }
        }
        marks.insert(node.to_string(), Mark::Done);
        None
    }
    let mut marks = BTreeMap::new();
    graph.keys().find_map(|k| visit(k, graph, &mut marks))
}
