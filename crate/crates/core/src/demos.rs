//! Bundled demo sessions. Each is produced by driving a live session with
//! scripted input, so the recorded log is exactly what a user would send.

use std::f64::consts::TAU;
use std::path::Path;

use crate::document::Document;
use crate::geometry::Point2;
use crate::persistence::{save_document, EventLog};
use crate::registry::implicit_squidgets;
use crate::scene::{AttributePath, LocalTransform, Scene, SceneObject, Shape};
use crate::session::{EventKind, Effect, Mode, Modifier, Session, SessionEvent};

pub const NAMES: [&str; 4] = ["arrange-shapes", "light-switch", "move-rotate", "boat-fly"];

#[derive(Debug, Clone, PartialEq)]
pub struct Demo {
    pub name: &'static str,
    pub initial: Document,
    pub log: EventLog,
    pub result: Document,
}

impl Demo {
    /// `(file name, contents)` for the initial document, the log and the
    /// expected result.
    pub fn files(&self) -> [(String, String); 3] {
        [
            (format!("{}.scene.json", self.name), save_document(&self.initial)),
            (format!("{}.log.jsonl", self.name), self.log.to_text()),
            (format!("{}.expected.json", self.name), save_document(&self.result)),
        ]
    }

    pub fn write(&self, dir: &Path) -> std::io::Result<()> {
        std::fs::create_dir_all(dir)?;
        for (name, text) in self.files() {
            std::fs::write(dir.join(name), text)?;
        }
        Ok(())
    }
}

pub fn all() -> Vec<Demo> {
    vec![arrange_shapes(), light_switch(), move_rotate(), boat_fly()]
}

pub fn by_name(name: &str) -> Option<Demo> {
    all().into_iter().find(|d| d.name == name)
}

struct Script {
    initial: Document,
    session: Session,
    events: Vec<SessionEvent>,
    t: u64,
}

impl Script {
    fn new(doc: Document) -> Self {
        Self {
            initial: doc.clone(),
            session: Session::new(doc),
            events: Vec::new(),
            t: 0,
        }
    }

    fn send(&mut self, kind: EventKind) -> Vec<Effect> {
        let ev = SessionEvent::new(self.t, kind);
        let effects = self
            .session
            .handle_event(&ev)
            .unwrap_or_else(|e| panic!("demo event {ev:?} rejected: {e}"));
        for e in &effects {
            if matches!(e, Effect::Error { .. } | Effect::NoSelection) {
                panic!("demo event {ev:?} failed: {e:?}");
            }
        }
        self.events.push(ev);
        self.t += 10;
        effects
    }

    fn mode(&mut self, mode: Mode) {
        self.t += 100;
        self.send(EventKind::ModeSwitch { mode });
    }

    fn select(&mut self, ids: &[&str]) {
        let selection = ids.iter().map(|s| s.to_string()).collect();
        self.send(EventKind::SelectionChange { selection });
    }

    fn canvas(&mut self, from: (f64, f64), to: (f64, f64)) {
        self.send(EventKind::CanvasCreate {
            from: from.into(),
            to: to.into(),
        });
    }

    fn modifiers(&mut self, m: &[Modifier]) {
        self.send(EventKind::ModifierChange {
            modifiers: m.iter().copied().collect(),
        });
    }

    fn pick(&mut self, path: Option<&str>) {
        let path = path.map(|p| AttributePath::parse(p).expect("demo path"));
        self.send(EventKind::AttributePick { path });
    }

    fn stroke(&mut self, pts: &[Point2]) -> Vec<Effect> {
        self.t += 100;
        let n = pts.len();
        let mut effects = Vec::new();
        for (i, &pos) in pts.iter().enumerate() {
            let kind = match i {
                0 => EventKind::PointerDown { pos },
                i if i + 1 == n => EventKind::PointerUp { pos },
                _ => EventKind::PointerMove { pos },
            };
            effects.extend(self.send(kind));
        }
        effects
    }

    /// Draws `pts`, holds still, then drags through `drag`.
    fn hold_drag(&mut self, pts: &[Point2], drag: &[Point2]) {
        self.t += 100;
        for (i, &pos) in pts.iter().enumerate() {
            let kind = if i == 0 {
                EventKind::PointerDown { pos }
            } else {
                EventKind::PointerMove { pos }
            };
            self.send(kind);
        }
        self.t += self.session.doc.config.hold_ms + 50;
        let n = drag.len();
        let mut started = false;
        for (i, &pos) in drag.iter().enumerate() {
            let kind = if i + 1 == n {
                EventKind::PointerUp { pos }
            } else {
                EventKind::PointerMove { pos }
            };
            started |= self
                .send(kind)
                .iter()
                .any(|e| matches!(e, Effect::DragStarted { .. }));
        }
        assert!(started, "demo hold did not start a drag");
    }

    fn undo(&mut self) {
        self.send(EventKind::Undo);
    }

    fn redo(&mut self) {
        self.send(EventKind::Redo);
    }

    fn finish(self, name: &'static str) -> Demo {
        Demo {
            name,
            log: EventLog::new(&self.initial, self.events),
            initial: self.initial,
            result: self.session.doc,
        }
    }
}

fn p(x: f64, y: f64) -> Point2 {
    Point2::new(x, y)
}

/// `n + 1` evenly spaced points from `a` to `b`.
fn line(a: Point2, b: Point2, n: usize) -> Vec<Point2> {
    (0..=n).map(|k| a.lerp(b, k as f64 / n as f64)).collect()
}

fn vertical(x: f64, y0: f64, y1: f64) -> Vec<Point2> {
    line(p(x, y0), p(x, y1), 8)
}

fn horizontal(y: f64, x0: f64, x1: f64) -> Vec<Point2> {
    line(p(x0, y), p(x1, y), 24)
}

/// Closed ellipse outline rotated by `angle` about its center.
fn ellipse(c: Point2, rx: f64, ry: f64, angle: f64, n: usize) -> Vec<Point2> {
    (0..=n)
        .map(|k| {
            let a = TAU * k as f64 / n as f64;
            c + Point2::new(rx * a.cos(), ry * a.sin()).rotated(angle)
        })
        .collect()
}

fn ellipse_object(id: &str, rx: f64, ry: f64, at: (f64, f64)) -> SceneObject {
    SceneObject::new(
        id,
        Shape::Ellipse {
            radius_x: rx,
            radius_y: ry,
        },
    )
    .with_transform(LocalTransform::at(at.0, at.1))
}

/// Shapes moved by retracing, by hold-and-drag and by a two-stroke
/// select-then-place interaction, with an undo and redo at the end.
fn arrange_shapes() -> Demo {
    let tri = SceneObject::new(
        "tri",
        Shape::Polygon {
            vertices: vec![p(0.0, -20.0), p(20.0, 15.0), p(-20.0, 15.0)],
        },
    )
    .with_transform(LocalTransform::at(260.0, 60.0));
    let scene = Scene::new()
        .with(ellipse_object("sun", 20.0, 20.0, (60.0, 60.0)))
        .with(ellipse_object("moon", 15.0, 10.0, (160.0, 60.0)))
        .with(tri);
    let mut s = Script::new(Document::new(scene));

    s.stroke(&ellipse(p(90.0, 100.0), 20.0, 20.0, 0.0, 40));

    let moon = ellipse(p(160.0, 60.0), 15.0, 10.0, 0.0, 40);
    let end = *moon.last().unwrap();
    let drag: Vec<Point2> = line(end, end + p(-40.0, 60.0), 6)[1..].to_vec();
    s.hold_drag(&moon, &drag);

    s.modifiers(&[Modifier::SelectFirst]);
    s.stroke(&line(p(240.0, 75.0), p(280.0, 75.0), 10));
    s.modifiers(&[]);
    s.stroke(&line(p(240.0, 125.0), p(280.0, 125.0), 10));

    s.undo();
    s.redo();
    s.finish("arrange-shapes")
}

/// Screen points of the first half of the spotlight hot-spot at `cone`.
fn hot_spot_half(doc: &Document, cone: f64) -> Vec<Point2> {
    let mut scene = doc.scene.clone();
    scene
        .set_attr(&AttributePath::parse("lamp/shape/cone-angle").unwrap(), cone)
        .unwrap();
    let imp = implicit_squidgets(&scene, &doc.config)
        .into_iter()
        .find(|i| i.object == "lamp" && i.contour == 0)
        .expect("spotlight has a hot-spot segment");
    let screen = scene.world_to_screen();
    imp.segment.points().iter().map(|&q| screen.apply(q)).collect()
}

/// A spotlight with on and off switches, then a dimmer path between them.
fn light_switch() -> Demo {
    let lamp = SceneObject::new(
        "lamp",
        Shape::Spotlight {
            cone_angle: 0.5,
            tilt: 0.0,
            throw: 80.0,
        },
    )
    .with_transform(LocalTransform::at(120.0, 120.0));
    let mut s = Script::new(Document::new(Scene::new().with(lamp)));

    s.mode(Mode::Create);
    s.select(&["lamp"]);
    s.canvas((300.0, 0.0), (460.0, 140.0));
    s.stroke(&vertical(330.0, 30.0, 110.0));

    s.mode(Mode::Control);
    s.pick(Some("lamp/shape/cone-angle"));
    let narrow = hot_spot_half(&s.session.doc, 0.25);
    s.stroke(&narrow);
    s.pick(None);

    s.mode(Mode::Create);
    s.stroke(&vertical(430.0, 30.0, 110.0));
    s.stroke(&horizontal(70.0, 310.0, 450.0));

    s.mode(Mode::Control);
    s.stroke(&vertical(330.0, 30.0, 110.0));
    s.stroke(&vertical(380.0, 30.0, 110.0));
    s.stroke(&vertical(430.0, 30.0, 110.0));
    s.finish("light-switch")
}

/// Three poses of an object bookmarked on a canvas and joined into a path;
/// crossing and dragging along the path blends position and rotation.
fn move_rotate() -> Demo {
    let car = ellipse_object("car", 30.0, 12.0, (60.0, 200.0));
    let mut s = Script::new(Document::new(Scene::new().with(car)));

    s.mode(Mode::Create);
    s.select(&["car"]);
    s.canvas((0.0, 300.0), (400.0, 420.0));
    s.stroke(&vertical(40.0, 330.0, 390.0));

    s.mode(Mode::Control);
    s.stroke(&ellipse(p(210.0, 160.0), 30.0, 12.0, 0.4, 48));
    s.mode(Mode::Create);
    s.stroke(&vertical(200.0, 330.0, 390.0));

    s.mode(Mode::Control);
    s.stroke(&ellipse(p(330.0, 190.0), 30.0, 12.0, -0.3, 48));
    s.mode(Mode::Create);
    s.stroke(&vertical(360.0, 330.0, 390.0));
    s.stroke(&horizontal(360.0, 20.0, 380.0));

    s.mode(Mode::Control);
    s.stroke(&vertical(120.0, 330.0, 390.0));
    let drag: Vec<Point2> = line(p(280.0, 390.0), p(100.0, 392.0), 9)[1..].to_vec();
    s.hold_drag(&vertical(280.0, 330.0, 390.0), &drag);
    s.finish("move-rotate")
}

/// Two child paths, for a boat and a fly, driven together by a parent path
/// whose members store the children's weights.
fn boat_fly() -> Demo {
    let scene = Scene::new()
        .with(ellipse_object("boat", 40.0, 10.0, (100.0, 100.0)))
        .with(ellipse_object("fly", 6.0, 4.0, (300.0, 40.0)));
    let mut s = Script::new(Document::new(scene));

    s.mode(Mode::Create);
    s.select(&["boat"]);
    s.canvas((0.0, 200.0), (200.0, 300.0));
    s.stroke(&vertical(30.0, 220.0, 280.0));
    s.select(&["fly"]);
    s.canvas((250.0, 200.0), (450.0, 300.0));
    s.stroke(&vertical(280.0, 220.0, 280.0));

    s.mode(Mode::Control);
    s.stroke(&ellipse(p(180.0, 100.0), 40.0, 10.0, 0.0, 48));
    s.stroke(&ellipse(p(360.0, 20.0), 6.0, 4.0, 0.0, 32));
    s.mode(Mode::Create);
    s.stroke(&vertical(170.0, 220.0, 280.0));
    s.stroke(&vertical(420.0, 220.0, 280.0));
    s.stroke(&horizontal(250.0, 10.0, 190.0));
    s.stroke(&horizontal(250.0, 260.0, 440.0));

    // boat near the start of its path, fly near the end of its own
    s.mode(Mode::Control);
    s.stroke(&vertical(44.0, 220.0, 280.0));
    s.stroke(&vertical(406.0, 220.0, 280.0));
    let boat = s.session.doc.registry.continuous[0].id.clone();
    let fly = s.session.doc.registry.continuous[1].id.clone();
    s.mode(Mode::Create);
    s.select(&[&format!("squidget/{boat}"), &format!("squidget/{fly}")]);
    s.canvas((0.0, 350.0), (450.0, 450.0));
    s.stroke(&vertical(30.0, 370.0, 430.0));

    // and the other way round
    s.mode(Mode::Control);
    s.stroke(&vertical(156.0, 220.0, 280.0));
    s.stroke(&vertical(294.0, 220.0, 280.0));
    s.mode(Mode::Create);
    s.stroke(&vertical(420.0, 370.0, 430.0));
    s.stroke(&horizontal(400.0, 10.0, 440.0));

    s.mode(Mode::Control);
    s.stroke(&vertical(225.0, 370.0, 430.0));
    let drag: Vec<Point2> = line(p(225.0, 430.0), p(380.0, 428.0), 8)[1..].to_vec();
    s.hold_drag(&vertical(225.0, 370.0, 430.0), &drag);
    s.finish("boat-fly")
}
