//! The interaction state machine: modes, stroke capture, hold-and-drag,
//! two-stroke selection, undo and replay.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::document::Document;
use crate::error::{Error, Result};
use crate::geometry::{Point2, Polyline};
use crate::matching::{
    match_continuous, match_implicit, select, FitOptions, MatchResult, Payload, SelectOptions,
};
use crate::registry::{Entity, Gesture, Rect, RegistryEdit};
use crate::scene::{AttrRange, AttributePath};
use crate::solver::{
    apply_continuous, apply_discrete, apply_implicit_transform, apply_match, dragged_local,
    solve_scalar, weight_under, AttributeUpdate, Constraint,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Create,
    #[default]
    Control,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Modifier {
    SelectFirst,
    Translate,
    Rotate,
    Scale,
    ShapeOnly,
}

/// One input event. `t` is in milliseconds; positions are screen units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionEvent {
    pub t: u64,
    #[serde(flatten)]
    pub kind: EventKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum EventKind {
    PointerDown {
        pos: Point2,
    },
    PointerMove {
        pos: Point2,
    },
    PointerUp {
        pos: Point2,
    },
    ModifierChange {
        modifiers: BTreeSet<Modifier>,
    },
    ModeSwitch {
        mode: Mode,
    },
    /// Creates a canvas over the screen rectangle spanned by two corners,
    /// collecting the current selection's attributes.
    CanvasCreate {
        from: Point2,
        to: Point2,
    },
    SelectionChange {
        selection: Vec<String>,
    },
    /// Target attribute for scalar solving; `None` clears it.
    AttributePick {
        path: Option<AttributePath>,
    },
    Undo,
    Redo,
}

impl SessionEvent {
    pub fn new(t: u64, kind: EventKind) -> Self {
        Self { t, kind }
    }
}

/// Notifications produced while handling an event.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "effect", rename_all = "kebab-case")]
pub enum Effect {
    SelectionHighlight {
        squidget: String,
        kind: String,
        /// True for the first stroke of a two-stroke interaction.
        pending: bool,
    },
    NoSelection,
    AttributeChanged {
        path: AttributePath,
        old: f64,
        new: f64,
    },
    SquidgetCreated {
        id: String,
        kind: String,
    },
    SquidgetDeleted {
        id: String,
        kind: String,
    },
    DragStarted {
        squidget: String,
    },
    DragEnded {
        squidget: String,
    },
    ModeChanged {
        mode: Mode,
    },
    Warning {
        message: String,
    },
    Error {
        message: String,
    },
}

#[derive(Debug, Clone, PartialEq)]
enum Action {
    Attr(AttributeUpdate),
    Registry(RegistryEdit),
}

#[derive(Debug, Clone, PartialEq)]
struct Stroke {
    points: Vec<Point2>,
    anchor: Point2,
    anchor_t: u64,
    /// Whether a hold was already attempted during this stroke.
    hold_tried: bool,
}

#[derive(Debug, Clone, PartialEq)]
struct Drag {
    m: MatchResult,
    origin: Point2,
    update: AttributeUpdate,
    constraint: Constraint,
}

/// Live interaction state over a document.
#[derive(Debug, Clone, PartialEq)]
pub struct Session {
    pub doc: Document,
    mode: Mode,
    modifiers: BTreeSet<Modifier>,
    selection: Vec<String>,
    pick: Option<AttributePath>,
    stroke: Option<Stroke>,
    pending: Option<MatchResult>,
    drag: Option<Drag>,
    last_t: Option<u64>,
    undo_stack: Vec<Action>,
    redo_stack: Vec<Action>,
}

fn reject(reason: &str) -> Error {
    Error::EventRejected(reason.to_string())
}

fn changed(up: &AttributeUpdate) -> Vec<Effect> {
    let mut out: Vec<Effect> = up
        .changes
        .iter()
        .map(|c| Effect::AttributeChanged {
            path: c.path.clone(),
            old: c.old,
            new: c.new,
        })
        .collect();
    out.extend(up.warnings.iter().map(|w| Effect::Warning { message: w.clone() }));
    out
}

fn highlight(m: &MatchResult, pending: bool) -> Effect {
    Effect::SelectionHighlight {
        squidget: m.squidget.clone(),
        kind: m.kind.name().to_string(),
        pending,
    }
}

fn error(e: &Error) -> Effect {
    Effect::Error {
        message: e.to_string(),
    }
}

impl Session {
    pub fn new(doc: Document) -> Self {
        Self {
            doc,
            mode: Mode::Control,
            modifiers: BTreeSet::new(),
            selection: Vec::new(),
            pick: None,
            stroke: None,
            pending: None,
            drag: None,
            last_t: None,
            undo_stack: Vec::new(),
            redo_stack: Vec::new(),
        }
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn pending(&self) -> Option<&MatchResult> {
        self.pending.as_ref()
    }

    pub fn is_dragging(&self) -> bool {
        self.drag.is_some()
    }

    pub fn can_undo(&self) -> bool {
        !self.undo_stack.is_empty()
    }

    pub fn can_redo(&self) -> bool {
        !self.redo_stack.is_empty()
    }

    /// Processes one event. Malformed ordering is rejected with the state
    /// left untouched; domain failures are reported as error effects.
    pub fn handle_event(&mut self, ev: &SessionEvent) -> Result<Vec<Effect>> {
        if self.last_t.is_some_and(|last| ev.t < last) {
            return Err(reject("timestamp decreased"));
        }
        let in_stroke = self.stroke.is_some();
        let effects = match &ev.kind {
            EventKind::PointerDown { pos } => {
                if in_stroke {
                    return Err(reject("pointer-down during a stroke"));
                }
                check_finite(*pos)?;
                self.stroke = Some(Stroke {
                    points: vec![*pos],
                    anchor: *pos,
                    anchor_t: ev.t,
                    hold_tried: false,
                });
                Vec::new()
            }
            EventKind::PointerMove { pos } => {
                if !in_stroke {
                    return Err(reject("pointer-move outside a stroke"));
                }
                check_finite(*pos)?;
                self.on_move(ev.t, *pos)
            }
            EventKind::PointerUp { pos } => {
                if !in_stroke {
                    return Err(reject("pointer-up outside a stroke"));
                }
                check_finite(*pos)?;
                self.on_up(*pos)
            }
            EventKind::ModifierChange { modifiers } => {
                self.modifiers = modifiers.clone();
                Vec::new()
            }
            EventKind::ModeSwitch { mode } => {
                if in_stroke {
                    return Err(reject("mode-switch during a stroke"));
                }
                self.mode = *mode;
                self.pending = None;
                vec![Effect::ModeChanged { mode: *mode }]
            }
            EventKind::CanvasCreate { from, to } => {
                if in_stroke {
                    return Err(reject("canvas-create during a stroke"));
                }
                self.create_canvas(*from, *to)
            }
            EventKind::SelectionChange { selection } => {
                self.selection = selection.clone();
                Vec::new()
            }
            EventKind::AttributePick { path } => {
                self.pick = path.clone();
                Vec::new()
            }
            EventKind::Undo => {
                if in_stroke {
                    return Err(reject("undo during a stroke"));
                }
                self.undo()
            }
            EventKind::Redo => {
                if in_stroke {
                    return Err(reject("redo during a stroke"));
                }
                self.redo()
            }
        };
        self.last_t = Some(ev.t);
        Ok(effects)
    }

    fn push_action(&mut self, a: Action) {
        self.undo_stack.push(a);
        self.redo_stack.clear();
    }

    fn constraint(&self) -> Constraint {
        let has = |m| self.modifiers.contains(&m);
        let c = Constraint {
            translate: has(Modifier::Translate),
            rotate: has(Modifier::Rotate),
            scale: has(Modifier::Scale),
        };
        if c.translate || c.rotate || c.scale {
            c
        } else {
            Constraint::RIGID
        }
    }

    fn on_move(&mut self, t: u64, pos: Point2) -> Vec<Effect> {
        let mut effects = Vec::new();
        if self.drag.is_none() && self.hold_due(t) {
            effects.extend(self.start_hold());
        }
        if self.drag.is_some() {
            effects.extend(self.drag_to(pos));
            return effects;
        }
        let radius = self.doc.config.hold_radius;
        let s = self.stroke.as_mut().expect("checked by caller");
        s.points.push(pos);
        if pos.distance(s.anchor) > radius {
            s.anchor = pos;
            s.anchor_t = t;
        }
        effects
    }

    fn hold_due(&self, t: u64) -> bool {
        let Some(s) = &self.stroke else {
            return false;
        };
        self.mode == Mode::Control
            && !s.hold_tried
            && !self.modifiers.contains(&Modifier::SelectFirst)
            && t.saturating_sub(s.anchor_t) >= self.doc.config.hold_ms
    }

    fn start_hold(&mut self) -> Vec<Effect> {
        let s = self.stroke.as_mut().expect("hold needs a stroke");
        s.hold_tried = true;
        let origin = *s.points.last().expect("stroke has a point");
        let raw = match Polyline::from_stroke(&s.points) {
            Ok(r) => r,
            Err(_) => return Vec::new(),
        };
        let constraint = self.constraint();
        let found = match self.pending.take() {
            Some(p) => self.rematch(&p, &raw, constraint),
            None => self.pick_match(&raw, false),
        };
        let m = match found {
            Ok(Some(m)) => m,
            Ok(None) => return vec![Effect::NoSelection],
            Err(e) => return vec![error(&e)],
        };
        let update = match self.apply(&m, constraint) {
            Ok(u) => u,
            Err(e) => return vec![error(&e)],
        };
        let mut effects = vec![highlight(&m, false), Effect::DragStarted {
            squidget: m.squidget.clone(),
        }];
        effects.extend(changed(&update));
        self.drag = Some(Drag {
            m,
            origin,
            update,
            constraint,
        });
        effects
    }

    /// Re-applies the held match for a new pointer position, replacing the
    /// previous drag sample's changes.
    fn drag_to(&mut self, pos: Point2) -> Vec<Effect> {
        let drag = self.drag.as_mut().expect("dragging");
        if let Err(e) = drag.update.undo(&mut self.doc) {
            return vec![error(&e)];
        }
        let doc = &mut self.doc;
        let result = match &drag.m.payload {
            Payload::None => apply_discrete(doc, &drag.m.squidget),
            Payload::Weight(_) => weight_under(doc, &drag.m.squidget, pos)
                .and_then(|w| apply_continuous(doc, &drag.m.squidget, w)),
            Payload::Implicit(fit) => {
                let c = Constraint {
                    translate: true,
                    ..drag.constraint
                };
                dragged_local(doc, fit, pos - drag.origin)
                    .and_then(|l| apply_implicit_transform(doc, &fit.squidget.object, &l, c))
            }
        };
        match result {
            Ok(up) => {
                let effects = changed(&up);
                drag.update = up;
                effects
            }
            Err(e) => {
                // keep the previous sample in place
                let _ = drag.update.redo(&mut self.doc);
                vec![error(&e)]
            }
        }
    }

    fn on_up(&mut self, pos: Point2) -> Vec<Effect> {
        if self.drag.is_some() {
            let mut effects = self.drag_to(pos);
            let drag = self.drag.take().expect("dragging");
            self.stroke = None;
            effects.push(Effect::DragEnded {
                squidget: drag.m.squidget.clone(),
            });
            if !drag.update.is_empty() {
                self.push_action(Action::Attr(drag.update));
            }
            return effects;
        }
        let mut s = self.stroke.take().expect("checked by caller");
        s.points.push(pos);
        let raw = match Polyline::from_stroke(&s.points) {
            Ok(r) => r,
            Err(e) => return vec![error(&e)],
        };
        match self.mode {
            Mode::Control => self.control_stroke(&raw),
            Mode::Create => self.create_stroke(&raw),
        }
    }

    /// Best candidate for `raw` under the current modifiers.
    fn pick_match(&self, raw: &Polyline, shape_only: bool) -> Result<Option<MatchResult>> {
        let opts = SelectOptions {
            shape_only: shape_only || self.modifiers.contains(&Modifier::ShapeOnly),
        };
        select(&self.doc, raw, opts)
    }

    /// Fits `raw` to an already chosen squidget.
    fn rematch(
        &self,
        chosen: &MatchResult,
        raw: &Polyline,
        constraint: Constraint,
    ) -> Result<Option<MatchResult>> {
        let doc = &self.doc;
        let stroke = raw.resample(doc.config.resample_n)?;
        let payload = match &chosen.payload {
            Payload::None => {
                doc.registry.discrete(&chosen.squidget)?;
                Payload::None
            }
            Payload::Weight(_) => {
                let cs = doc.registry.continuous(&chosen.squidget)?;
                let (w, _) = match_continuous(doc, raw, &stroke, cs, false)?;
                Payload::Weight(w)
            }
            Payload::Implicit(fit) => {
                let mut imp = fit.squidget.clone();
                imp.segment = imp.regenerate(&doc.scene, doc.config.resample_n)?;
                let opts = FitOptions {
                    similarity: constraint.scale,
                };
                match match_implicit(doc, &stroke, &imp, opts)? {
                    Some((f, _, _)) => Payload::Implicit(Box::new(f)),
                    None => return Ok(None),
                }
            }
        };
        Ok(Some(MatchResult {
            payload,
            ..chosen.clone()
        }))
    }

    /// Applies a match, honoring the scalar pick and the scale modifier for
    /// implicit squidgets.
    fn apply(&mut self, m: &MatchResult, constraint: Constraint) -> Result<AttributeUpdate> {
        let Some(fit) = m.implicit() else {
            return apply_match(&mut self.doc, m, constraint);
        };
        if let Some(path) = self.pick.clone() {
            if path.root() == fit.squidget.object && self.is_searchable(&path) {
                let sol = solve_scalar(&mut self.doc, &fit.stroke, &fit.squidget, &path)?;
                return Ok(sol.update);
            }
        }
        if constraint.scale {
            let opts = FitOptions { similarity: true };
            if let Some((f, _, _)) = match_implicit(&self.doc, &fit.stroke, &fit.squidget, opts)? {
                return apply_implicit_transform(
                    &mut self.doc,
                    &f.squidget.object,
                    &f.local,
                    constraint,
                );
            }
        }
        apply_match(&mut self.doc, m, constraint)
    }

    fn is_searchable(&self, path: &AttributePath) -> bool {
        self.doc
            .scene
            .range_of(path)
            .is_ok_and(|r| !matches!(r, AttrRange::Unbounded | AttrRange::Positive))
    }

    fn control_stroke(&mut self, raw: &Polyline) -> Vec<Effect> {
        if self.modifiers.contains(&Modifier::SelectFirst) {
            return match self.pick_match(raw, true) {
                Ok(Some(m)) => {
                    let e = highlight(&m, true);
                    self.pending = Some(m);
                    vec![e]
                }
                Ok(None) => {
                    self.pending = None;
                    vec![Effect::NoSelection]
                }
                Err(e) => vec![error(&e)],
            };
        }
        let constraint = self.constraint();
        let found = match self.pending.take() {
            Some(p) => self.rematch(&p, raw, constraint),
            None => self.pick_match(raw, false),
        };
        let m = match found {
            Ok(Some(m)) => m,
            Ok(None) => return vec![Effect::NoSelection],
            Err(e) => return vec![error(&e)],
        };
        match self.apply(&m, constraint) {
            Ok(up) => {
                let mut effects = vec![highlight(&m, false)];
                effects.extend(changed(&up));
                if !up.is_empty() {
                    self.push_action(Action::Attr(up));
                }
                effects
            }
            Err(e) => vec![error(&e)],
        }
    }

    fn create_stroke(&mut self, raw: &Polyline) -> Vec<Effect> {
        let world = self.doc.polyline_to_world(raw);
        let result = match self.doc.registry.classify(&world) {
            Gesture::CrossOut(ids) => Ok(self.doc.registry.delete(&ids)),
            Gesture::Connect(members) => self.doc.registry.connect(members),
            Gesture::Discrete => self.create_discrete(&world),
        };
        match result {
            Ok(edit) => {
                let effects = edit_effects(&edit, false);
                if !edit.is_empty() {
                    self.push_action(Action::Registry(edit));
                }
                effects
            }
            Err(e) => vec![error(&e)],
        }
    }

    fn create_discrete(&mut self, world: &Polyline) -> Result<RegistryEdit> {
        let canvas = self
            .doc
            .registry
            .canvas_containing(world.points())
            .ok_or(Error::NoCanvas)?
            .id
            .clone();
        let snap = self.doc.canvas_snapshot(&canvas)?;
        let cfg = &self.doc.config;
        let (smoothing, n) = (cfg.smoothing_iterations, cfg.resample_n);
        self.doc
            .registry
            .create_discrete(&canvas, world, snap, smoothing, n)
    }

    fn create_canvas(&mut self, from: Point2, to: Point2) -> Vec<Effect> {
        if self.mode != Mode::Create {
            return vec![error(&Error::EventRejected(
                "canvas-create outside create mode".into(),
            ))];
        }
        let region = Rect::from_corners(self.doc.to_world(from), self.doc.to_world(to));
        let selection = self.selection.clone();
        match self.doc.create_canvas(region, &selection) {
            Ok(edit) => {
                let effects = edit_effects(&edit, false);
                self.push_action(Action::Registry(edit));
                effects
            }
            Err(e) => vec![error(&e)],
        }
    }

    fn undo(&mut self) -> Vec<Effect> {
        let Some(action) = self.undo_stack.pop() else {
            return Vec::new();
        };
        let effects = match &action {
            Action::Attr(up) => match up.undo(&mut self.doc) {
                Ok(()) => up
                    .changes
                    .iter()
                    .rev()
                    .map(|c| Effect::AttributeChanged {
                        path: c.path.clone(),
                        old: c.new,
                        new: c.old,
                    })
                    .collect(),
                Err(e) => vec![error(&e)],
            },
            Action::Registry(edit) => {
                self.doc.registry.undo(edit);
                edit_effects(edit, true)
            }
        };
        self.redo_stack.push(action);
        effects
    }

    fn redo(&mut self) -> Vec<Effect> {
        let Some(action) = self.redo_stack.pop() else {
            return Vec::new();
        };
        let effects = match &action {
            Action::Attr(up) => match up.redo(&mut self.doc) {
                Ok(()) => changed(up),
                Err(e) => vec![error(&e)],
            },
            Action::Registry(edit) => {
                self.doc.registry.redo(edit);
                edit_effects(edit, false)
            }
        };
        self.undo_stack.push(action);
        effects
    }

    /// Undoes every recorded action.
    pub fn undo_all(&mut self) -> Vec<Effect> {
        let mut effects = Vec::new();
        while !self.undo_stack.is_empty() {
            effects.extend(self.undo());
        }
        effects
    }
}

fn check_finite(p: Point2) -> Result<()> {
    if p.is_finite() {
        Ok(())
    } else {
        Err(reject("non-finite position"))
    }
}

fn edit_effects(edit: &RegistryEdit, inverted: bool) -> Vec<Effect> {
    let created = |e: &Entity| Effect::SquidgetCreated {
        id: e.id().to_string(),
        kind: e.kind_name().to_string(),
    };
    let deleted = |e: &Entity| Effect::SquidgetDeleted {
        id: e.id().to_string(),
        kind: e.kind_name().to_string(),
    };
    let (add, del): (Vec<Effect>, Vec<Effect>) = if inverted {
        (
            edit.removed.iter().map(|(_, e)| created(e)).collect(),
            edit.added.iter().map(|(_, e)| deleted(e)).collect(),
        )
    } else {
        (
            edit.added.iter().map(|(_, e)| created(e)).collect(),
            edit.removed.iter().map(|(_, e)| deleted(e)).collect(),
        )
    };
    del.into_iter().chain(add).collect()
}

/// What a create-mode stroke (screen space) would do in `doc`.
pub fn classify_create_stroke(doc: &Document, raw: &Polyline) -> Gesture {
    doc.registry.classify(&doc.polyline_to_world(raw))
}

/// Runs `events` against `doc` from a fresh session. Fails on the first
/// rejected event with its index, or if the log ends inside a stroke.
pub fn replay(doc: Document, events: &[SessionEvent]) -> Result<(Session, Vec<Effect>)> {
    let mut s = Session::new(doc);
    let mut effects = Vec::new();
    for (index, ev) in events.iter().enumerate() {
        match s.handle_event(ev) {
            Ok(e) => effects.extend(e),
            Err(err) => {
                return Err(Error::MalformedLog {
                    index,
                    reason: err.to_string(),
                })
            }
        }
    }
    if s.stroke.is_some() {
        return Err(Error::MalformedLog {
            index: events.len(),
            reason: "log ends inside a stroke".into(),
        });
    }
    Ok((s, effects))
}
