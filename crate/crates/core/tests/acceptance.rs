//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails.

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use squidgets::geometry::{
    bbox_diagonal, best_fit_rigid, pairwise_dist, rigid_residual, wrap_angle, Point2, Polyline,
    RigidTransform2,
};
use squidgets::matching::{
    implicit_score, match_implicit, pair_weight, select, FitOptions, SelectOptions, SquidgetKind,
};
use squidgets::persistence::save_document;
use squidgets::registry::{implicit_squidgets, segment_curve, DiscreteSquidget, Gesture, Rect};
use squidgets::scene::{AttributePath, AttributeSnapshot, LocalTransform, Scene, SceneObject, Shape};
use squidgets::session::{classify_create_stroke, replay, EventKind, Mode, Session, SessionEvent};
use squidgets::solver::{apply_continuous, apply_match, scalar_objective, solve_scalar, Constraint};
use squidgets::{demos, Config, Document, Error};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome, Option<Duration>);

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn p(x: f64, y: f64) -> Point2 {
    Point2::new(x, y)
}

fn path(s: &str) -> AttributePath {
    AttributePath::parse(s).unwrap()
}

fn stroke_events(t0: u64, pts: &[Point2], dt: &[u64]) -> Vec<SessionEvent> {
    let n = pts.len();
    let mut t = t0;
    pts.iter()
        .enumerate()
        .map(|(i, &pos)| {
            if i > 0 {
                t += dt[(i - 1).min(dt.len() - 1)];
            }
            let kind = match i {
                0 => EventKind::PointerDown { pos },
                i if i + 1 == n => EventKind::PointerUp { pos },
                _ => EventKind::PointerMove { pos },
            };
            SessionEvent::new(t, kind)
        })
        .collect()
}

fn constants() -> Outcome {
    let cfg = Config::default();
    check(cfg.resample_n == 30, || format!("resample-n {}", cfg.resample_n))?;
    check(cfg.lambda == 0.7, || format!("lambda {}", cfg.lambda))?;
    check(cfg.hold_ms == 300, || format!("hold-ms {}", cfg.hold_ms))?;

    let (d, dev) = (0.25, 4.0);
    let want = 0.3 / (d + cfg.epsilon) + 0.7 / (dev + cfg.epsilon);
    check((implicit_score(&cfg, d, dev) - want).abs() < 1e-12, || "lambda unused".into())?;

    // a created squidget curve has the configured point count
    let ball = SceneObject::new("b", Shape::Ellipse { radius_x: 3.0, radius_y: 3.0 });
    let mut s = Session::new(Document::new(Scene::new().with(ball)));
    let mut events = vec![
        SessionEvent::new(0, EventKind::ModeSwitch { mode: Mode::Create }),
        SessionEvent::new(1, EventKind::SelectionChange { selection: vec!["b".into()] }),
        SessionEvent::new(2, EventKind::CanvasCreate { from: p(50.0, 0.0), to: p(150.0, 100.0) }),
    ];
    events.extend(stroke_events(10, &[p(60.0, 10.0), p(70.0, 50.0), p(80.0, 90.0)], &[10]));
    for e in &events {
        s.handle_event(e).map_err(|e| e.to_string())?;
    }
    let n = s.doc.registry.discrete[0].curve.len();
    check(n == 30, || format!("curve has {n} points"))?;

    // hold fires at exactly 300 ms and not at 299
    for (gap, want) in [(300, true), (299, false)] {
        let mut s = Session::new(Document::new(
            Scene::new().with(SceneObject::new("b", Shape::Ellipse { radius_x: 3.0, radius_y: 3.0 })),
        ));
        let pts: Vec<Point2> = (0..=24)
            .map(|k| {
                let a = TAU * k as f64 / 24.0;
                p(3.0 * a.cos(), 3.0 * a.sin())
            })
            .chain([p(8.0, 0.0), p(12.0, 0.0)])
            .collect();
        let mut dt = vec![10; 24];
        dt.push(gap);
        dt.push(10);
        let mut dragged = false;
        for e in stroke_events(0, &pts, &dt) {
            let eff = s.handle_event(&e).map_err(|e| e.to_string())?;
            dragged |= eff.iter().any(|x| matches!(x, squidgets::session::Effect::DragStarted { .. }));
        }
        check(dragged == want, || format!("hold after {gap} ms: drag = {dragged}"))?;
    }
    Ok("resample 30, lambda 0.7, hold 300 ms (299 ms does not hold)".into())
}

fn random_curve(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> Vec<Point2> {
    let mut at = p(0.0, 0.0);
    let mut heading: f64 = rng.random_range(0.0..TAU);
    (0..n)
        .map(|_| {
            heading += rng.random_range(-0.6..0.6);
            at += Point2::new(heading.cos(), heading.sin()) * (scale * rng.random_range(0.5..1.5));
            at
        })
        .collect()
}

fn rigid_fit() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let (mut worst_a, mut worst_t) = (0.0f64, 0.0f64);
    for _ in 0..100 {
        let src = random_curve(&mut rng, 30, 5.0);
        let truth = RigidTransform2::new(
            rng.random_range(-PI..PI),
            p(rng.random_range(-100.0..100.0), rng.random_range(-100.0..100.0)),
        );
        let dst: Vec<Point2> = src.iter().map(|&q| truth.apply(q)).collect();
        let fit = best_fit_rigid(&src, &dst).map_err(|e| e.to_string())?;
        worst_a = worst_a.max(wrap_angle(fit.rotation - truth.rotation).abs());
        worst_t = worst_t.max(fit.translation.distance(truth.translation));
    }
    check(worst_a < 1e-9 && worst_t < 1e-9, || {
        format!("angle error {worst_a:e}, translation error {worst_t:e}")
    })?;

    let noise = Normal::new(0.0, 2.0).unwrap();
    let mut worst_gap = f64::NEG_INFINITY;
    for _ in 0..20 {
        let src = random_curve(&mut rng, 30, 5.0);
        let truth = RigidTransform2::new(rng.random_range(-PI..PI), p(20.0, -5.0));
        let dst: Vec<Point2> = src
            .iter()
            .map(|&q| truth.apply(q) + p(noise.sample(&mut rng), noise.sample(&mut rng)))
            .collect();
        let fit = best_fit_rigid(&src, &dst).map_err(|e| e.to_string())?;
        let got = rigid_residual(&src, &dst, &fit);
        let cs = squidgets::geometry::centroid(&src);
        let cd = squidgets::geometry::centroid(&dst);
        let oracle = (0..3600)
            .map(|k| {
                let a = -PI + TAU * k as f64 / 3600.0;
                let t = cd - cs.rotated(a);
                rigid_residual(&src, &dst, &RigidTransform2::new(a, t))
            })
            .fold(f64::INFINITY, f64::min);
        worst_gap = worst_gap.max(got - oracle);
    }
    check(worst_gap <= 1e-9, || format!("fit exceeds grid oracle by {worst_gap:e}"))?;
    Ok(format!(
        "max angle err {worst_a:.1e}, max translation err {worst_t:.1e}, fit - grid <= {worst_gap:.1e}"
    ))
}

fn selection_scene() -> (Document, Vec<String>) {
    let mut doc = Document::new(Scene::new());
    doc.registry
        .create_canvas(Rect::from_corners(p(0.0, 0.0), p(600.0, 400.0)), vec![])
        .unwrap();
    let arc = |c: Point2, r: f64, a0: f64, a1: f64| -> Vec<Point2> {
        (0..=40)
            .map(|k| {
                let a = a0 + (a1 - a0) * k as f64 / 40.0;
                c + p(r * a.cos(), r * a.sin())
            })
            .collect()
    };
    let shapes: Vec<Vec<Point2>> = vec![
        vec![p(50.0, 50.0), p(150.0, 150.0)],
        arc(p(300.0, 100.0), 50.0, PI, TAU),
        vec![p(400.0, 50.0), p(430.0, 120.0), p(460.0, 50.0), p(490.0, 120.0), p(520.0, 50.0)],
        arc(p(100.0, 300.0), 50.0, 0.3, 0.3 + 5.0 * PI / 3.0),
        (0..=40)
            .map(|k| {
                let x = k as f64 / 40.0;
                p(250.0 + 150.0 * x, 300.0 + 30.0 * (TAU * x).sin())
            })
            .collect(),
    ];
    let mut ids = Vec::new();
    for s in shapes {
        let poly = Polyline::new(s).unwrap();
        let cfg = doc.config.clone();
        doc.registry
            .create_discrete("canvas1", &poly, AttributeSnapshot::new(), cfg.smoothing_iterations, cfg.resample_n)
            .unwrap();
        ids.push(doc.registry.discrete.last().unwrap().id.clone());
    }
    (doc, ids)
}

fn densify(p: &[Point2], k: usize) -> Vec<Point2> {
    let mut out = vec![p[0]];
    for w in p.windows(2) {
        for j in 1..=k {
            out.push(w[0].lerp(w[1], j as f64 / k as f64));
        }
    }
    out
}

fn selection_robustness() -> Outcome {
    let (doc, ids) = selection_scene();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut correct = 0;
    for trial in 0..100 {
        let j = trial % ids.len();
        let curve = &doc.registry.discrete[j].curve;
        let sigma = 0.05 * bbox_diagonal(curve.points());
        let noise = Normal::new(0.0, sigma).unwrap();
        let pts: Vec<Point2> = curve
            .points()
            .iter()
            .map(|&q| q + p(noise.sample(&mut rng), noise.sample(&mut rng)))
            .collect();
        let raw = Polyline::new(pts.clone()).map_err(|e| e.to_string())?;
        let variants = [
            raw.clone(),
            raw.reversed(),
            Polyline::new(densify(&pts, 5)).map_err(|e| e.to_string())?,
        ];
        let mut picks = Vec::new();
        for v in &variants {
            let m = select(&doc, v, SelectOptions::default()).map_err(|e| e.to_string())?;
            picks.push(m.map(|m| m.squidget));
        }
        check(picks[0] == picks[1], || format!("trial {trial}: reversal changed {picks:?}"))?;
        check(picks[0] == picks[2], || format!("trial {trial}: density changed {picks:?}"))?;
        if picks[0].as_deref() == Some(ids[j].as_str()) {
            correct += 1;
        }
    }
    check(correct == 100, || format!("{correct}/100 correct"))?;
    Ok("100/100 correct, reversal and density invariant".into())
}

fn continuous_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let noise = Normal::new(0.0, 1.0).unwrap();
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let a = random_curve(&mut rng, 30, 4.0);
        let off = p(rng.random_range(-40.0..40.0), rng.random_range(-40.0..40.0));
        let b: Vec<Point2> = random_curve(&mut rng, 30, 4.0).into_iter().map(|q| q + off).collect();
        let u_true = rng.random_range(-0.1..1.1);
        let s: Vec<Point2> = a
            .iter()
            .zip(&b)
            .map(|(&x, &y)| x.lerp(y, u_true) + p(noise.sample(&mut rng), noise.sample(&mut rng)))
            .collect();
        let (u, _) = pair_weight(&s, &a, &b, false).map_err(|e| e.to_string())?;
        let grid = (0..=1000)
            .map(|k| {
                let g = k as f64 / 1000.0;
                let blend: Vec<Point2> = a.iter().zip(&b).map(|(&x, &y)| x.lerp(y, g)).collect();
                (g, pairwise_dist(&s, &blend, false).unwrap())
            })
            .min_by(|x, y| x.1.total_cmp(&y.1))
            .unwrap()
            .0;
        worst = worst.max((u - grid).abs());
    }
    check(worst < 1e-3, || format!("closed form differs from grid by {worst:e}"))?;

    // endpoints reproduce members exactly
    let ball = SceneObject::new("b", Shape::Ellipse { radius_x: 2.0, radius_y: 1.0 });
    let mut doc = Document::new(Scene::new().with(ball));
    doc.create_canvas(Rect::from_corners(p(0.0, 0.0), p(100.0, 100.0)), &["b".into()])
        .unwrap();
    for x in [10.0, 60.0] {
        for (name, v) in [("tx", x / 3.0), ("ty", -x / 7.0), ("rotation", x / 97.0)] {
            doc.set_attr(&path(&format!("b/transform/{name}")), v).unwrap();
        }
        doc.set_attr(&path("b/shape/radius-x"), 1.0 + x / 11.0).unwrap();
        let snap = doc.canvas_snapshot("canvas1").unwrap();
        let stroke = Polyline::new(vec![p(x, 10.0), p(x + 13.0, 50.0), p(x + 1.0, 90.0)]).unwrap();
        doc.registry.create_discrete("canvas1", &stroke, snap, 2, 30).unwrap();
    }
    doc.registry.connect(vec!["d2".into(), "d3".into()]).unwrap();
    let cs = doc.registry.continuous[0].clone();
    for (w, m) in [(0.0, 0usize), (1.0, 1)] {
        let member = doc.registry.discrete(&cs.members[m]).unwrap().clone();
        let (curve, snap) = doc.registry.interpolate(&cs, w).unwrap();
        check(curve == member.curve && snap == member.snapshot, || format!("w = {w} not exact"))?;
        apply_continuous(&mut doc, &cs.id, w).unwrap();
        for (pth, v) in member.snapshot.iter() {
            let got = doc.get_attr(pth).unwrap();
            check(got.to_bits() == v.to_bits(), || format!("w = {w}: {pth} = {got} vs {v}"))?;
        }
    }
    Ok(format!("max |w - grid| = {worst:.1e} over 50; endpoints bitwise exact"))
}

fn lamp(cone: f64, tilt: f64, throw: f64) -> SceneObject {
    SceneObject::new("lamp", Shape::Spotlight { cone_angle: cone, tilt, throw })
        .with_transform(LocalTransform::at(100.0, 150.0))
}

fn scalar_solver() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let range = FRAC_PI_2;
    let cone = path("lamp/shape/cone-angle");
    let (mut worst_err, mut worst_gap) = (0.0f64, f64::NEG_INFINITY);
    for i in 0..25 {
        let v_star = rng.random_range(0.45..1.1);
        let v0 = v_star + if (i as u64).is_multiple_of(2) { 0.2 } else { -0.2 } * range;
        let tilt = rng.random_range(-0.3..0.3);
        let throw = rng.random_range(60.0..120.0);
        let mut doc = Document::new(Scene::new().with(lamp(v0, tilt, throw)));
        let imp = implicit_squidgets(&doc.scene, &doc.config)
            .into_iter()
            .find(|s| s.object == "lamp" && s.contour == 0 && s.from <= 0.0)
            .ok_or("no hot-spot segment")?;
        let mut target = doc.scene.clone();
        target.set_attr(&cone, v_star).map_err(|e| e.to_string())?;
        let seg = segment_curve(&target, "lamp", imp.contour, imp.from, imp.to, doc.config.resample_n)
            .map_err(|e| e.to_string())?;
        let stroke = seg.map(|q| target.world_to_screen().apply(q));
        let (lo, hi) = doc.scene.range_of(&cone).unwrap().search_interval().unwrap();
        let half = doc.config.search_window * (hi - lo);
        let (a, b) = ((v0 - half).max(lo), (v0 + half).min(hi));
        let grid = (0..=10_000)
            .map(|k| {
                let v = a + (b - a) * k as f64 / 10_000.0;
                scalar_objective(&doc, &stroke, &imp, &cone, v).unwrap()
            })
            .fold(f64::INFINITY, f64::min);
        let sol = solve_scalar(&mut doc, &stroke, &imp, &cone).map_err(|e| e.to_string())?;
        worst_err = worst_err.max((sol.value - v_star).abs() / range);
        worst_gap = worst_gap.max(sol.residual - grid);
    }
    check(worst_err < 1e-3, || format!("|solved - v*| = {worst_err:e} of range"))?;
    check(worst_gap <= 1e-9, || format!("solver exceeds grid minimum by {worst_gap:e}"))?;
    Ok(format!(
        "max |solved - v*| = {worst_err:.1e} x range, solver - grid <= {worst_gap:.1e}"
    ))
}

fn random_object(rng: &mut ChaCha8Rng, i: usize) -> SceneObject {
    let shape = if (i as u64).is_multiple_of(2) {
        let rx = rng.random_range(12.0..30.0);
        Shape::Ellipse { radius_x: rx, radius_y: rx * rng.random_range(0.3..0.7) }
    } else {
        let k = 3 + i % 3;
        let vertices = (0..k)
            .map(|j| {
                let a = TAU * j as f64 / k as f64 + rng.random_range(-0.2..0.2);
                let r = rng.random_range(15.0..30.0);
                p(r * a.cos(), r * a.sin())
            })
            .collect();
        Shape::Polygon { vertices }
    };
    SceneObject::new("obj", shape).with_transform(LocalTransform {
        tx: rng.random_range(-100.0..100.0),
        ty: rng.random_range(-100.0..100.0),
        rotation: rng.random_range(-PI..PI),
        scale: rng.random_range(0.5..2.0),
    })
}

fn implicit_fixed_point() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(47);
    let mut worst = 0.0f64;
    for i in 0..25 {
        let mut doc = Document::new(Scene::new().with(random_object(&mut rng, i)));
        let imps = implicit_squidgets(&doc.scene, &doc.config);
        let imp = &imps[rng.random_range(0..imps.len())];
        let motion = RigidTransform2::new(
            rng.random_range(-0.3..0.3),
            p(rng.random_range(-10.0..10.0), rng.random_range(-10.0..10.0)),
        );
        let screen = doc.polyline_to_screen(&imp.segment);
        let raw = screen.map(|q| motion.apply(q));
        let m = select(&doc, &raw, SelectOptions::default())
            .map_err(|e| e.to_string())?
            .ok_or_else(|| format!("scene {i}: nothing selected"))?;
        check(m.kind == SquidgetKind::Implicit, || format!("scene {i}: {:?}", m.kind))?;
        apply_match(&mut doc, &m, Constraint::default()).map_err(|e| e.to_string())?;
        let fit = m.implicit().unwrap();
        let mut again = fit.squidget.clone();
        again.segment = again.regenerate(&doc.scene, doc.config.resample_n).map_err(|e| e.to_string())?;
        let (refit, _, _) = match_implicit(&doc, &fit.stroke, &again, FitOptions { similarity: false })
            .map_err(|e| e.to_string())?
            .ok_or_else(|| format!("scene {i}: re-match failed"))?;
        let l = refit.local;
        let err = l.t.norm().max(l.rotation().abs()).max((l.uniform_scale() - 1.0).abs());
        worst = worst.max(err);
    }
    check(worst < 1e-6, || format!("re-match differs from identity by {worst:e}"))?;
    Ok(format!("max deviation from identity {worst:.1e} over 25 scenes"))
}

fn gesture_classification() -> Outcome {
    let mut doc = Document::new(Scene::new());
    doc.registry
        .create_canvas(Rect::from_corners(p(0.0, 0.0), p(400.0, 300.0)), vec![])
        .unwrap();
    for x in [50.0, 100.0, 150.0, 300.0] {
        let bar = Polyline::new(vec![p(x, 50.0), p(x, 150.0)]).unwrap();
        doc.registry.create_discrete("canvas1", &bar, AttributeSnapshot::new(), 0, 30).unwrap();
    }
    doc.registry.connect(vec!["d2".into(), "d3".into()]).unwrap();
    let ids = |v: &[&str]| v.iter().map(|s| s.to_string()).collect::<Vec<_>>();
    let connect = |v: &[&str]| Gesture::Connect(ids(v));
    let cross = |v: &[&str]| Gesture::CrossOut(ids(v));
    let cases: Vec<(&str, Vec<Point2>, Gesture)> = vec![
        ("connect two", vec![p(20.0, 120.0), p(130.0, 120.0)], connect(&["d2", "d3"])),
        ("connect three", vec![p(20.0, 120.0), p(180.0, 120.0)], connect(&["d2", "d3", "d4"])),
        ("connect reversed", vec![p(130.0, 120.0), p(20.0, 120.0)], connect(&["d3", "d2"])),
        ("connect far pair", vec![p(140.0, 140.0), p(310.0, 140.0)], connect(&["d4", "d5"])),
        ("exactly one crossing", vec![p(80.0, 120.0), p(130.0, 120.0)], Gesture::Discrete),
        ("no crossing", vec![p(200.0, 200.0), p(250.0, 250.0)], Gesture::Discrete),
        ("through bar endpoint", vec![p(40.0, 40.0), p(60.0, 60.0)], Gesture::Discrete),
        ("path crossed once", vec![p(70.0, 90.0), p(70.0, 99.0), p(70.0, 110.0)], Gesture::Discrete),
        (
            "exactly two crossings",
            vec![p(290.0, 60.0), p(310.0, 80.0), p(290.0, 100.0)],
            cross(&["d5"]),
        ),
        (
            "zigzag",
            vec![p(290.0, 60.0), p(310.0, 80.0), p(290.0, 100.0), p(310.0, 120.0)],
            cross(&["d5"]),
        ),
        ("path crossed twice", vec![p(70.0, 90.0), p(75.0, 110.0), p(80.0, 90.0)], cross(&["c6"])),
        (
            "cross-out beats connect",
            vec![p(60.0, 60.0), p(40.0, 70.0), p(60.0, 80.0), p(110.0, 80.0)],
            cross(&["d2"]),
        ),
        (
            "canvas crossed out",
            vec![p(390.0, 150.0), p(410.0, 155.0), p(390.0, 160.0)],
            cross(&["canvas1"]),
        ),
    ];
    let total = cases.len();
    for (name, pts, want) in cases {
        let raw = Polyline::new(pts).unwrap();
        let got = classify_create_stroke(&doc, &raw);
        check(got == want, || format!("{name}: got {got:?}, want {want:?}"))?;
    }
    Ok(format!("{total}/{total} strokes classified as expected"))
}

fn determinism() -> Outcome {
    let all = demos::all();
    for d in &all {
        let (a, _) = replay(d.initial.clone(), &d.log.events).map_err(|e| e.to_string())?;
        let (mut b, _) = replay(d.initial.clone(), &d.log.events).map_err(|e| e.to_string())?;
        let (ta, tb) = (save_document(&a.doc), save_document(&b.doc));
        check(ta == tb, || format!("{}: runs differ", d.name))?;
        check(ta == save_document(&d.result), || format!("{}: differs from bundled result", d.name))?;
        b.undo_all();
        check(save_document(&b.doc) == save_document(&d.initial), || {
            format!("{}: undo-all did not restore", d.name)
        })?;
    }
    Ok(format!("{} demos byte-identical across runs; undo-all exact", all.len()))
}

fn nested() -> Outcome {
    let scene = Scene::new()
        .with(SceneObject::new("boat", Shape::Ellipse { radius_x: 4.0, radius_y: 1.0 }))
        .with(SceneObject::new("fly", Shape::Ellipse { radius_x: 1.0, radius_y: 1.0 }));
    let mut doc = Document::new(scene);
    let bar = |x: f64, y: f64| Polyline::new(vec![p(x, y), p(x, y + 40.0)]).unwrap();
    let mut children = Vec::new();
    for (obj, y0) in [("boat", 0.0), ("fly", 100.0)] {
        doc.create_canvas(Rect::from_corners(p(0.0, y0), p(100.0, y0 + 50.0)), &[obj.into()])
            .unwrap();
        let canvas = doc.registry.canvases.last().unwrap().id.clone();
        for (x, tx) in [(10.0, -20.0), (90.0, 20.0)] {
            doc.set_attr(&path(&format!("{obj}/transform/tx")), tx).unwrap();
            let snap = doc.canvas_snapshot(&canvas).unwrap();
            doc.registry.create_discrete(&canvas, &bar(x, y0 + 5.0), snap, 0, 30).unwrap();
        }
        let n = doc.registry.discrete.len();
        let members = doc.registry.discrete[n - 2..].iter().map(|d| d.id.clone()).collect();
        doc.registry.connect(members).unwrap();
        children.push(doc.registry.continuous.last().unwrap().id.clone());
    }
    let sel: Vec<String> = children.iter().map(|c| format!("squidget/{c}")).collect();
    doc.create_canvas(Rect::from_corners(p(0.0, 200.0), p(100.0, 250.0)), &sel).unwrap();
    let parent_canvas = doc.registry.canvases.last().unwrap().id.clone();
    let stored = [(0.2, 0.9), (0.8, 0.1)];
    for (k, (wb, wf)) in stored.iter().enumerate() {
        doc.set_attr(&AttributePath::weight(&children[0]), *wb).unwrap();
        doc.set_attr(&AttributePath::weight(&children[1]), *wf).unwrap();
        let snap = doc.canvas_snapshot(&parent_canvas).unwrap();
        doc.registry
            .create_discrete(&parent_canvas, &bar(10.0 + 80.0 * k as f64, 205.0), snap, 0, 30)
            .unwrap();
    }
    let n = doc.registry.discrete.len();
    let members: Vec<String> = doc.registry.discrete[n - 2..].iter().map(|d| d.id.clone()).collect();
    doc.registry.connect(members.clone()).unwrap();
    let parent = doc.registry.continuous.last().unwrap().clone();
    check(doc.registry.drives(&parent).len() == 2, || "parent does not drive both".into())?;

    let tx = |d: &Document, o: &str| d.get_attr(&path(&format!("{o}/transform/tx"))).unwrap();
    for (w, (wb, wf)) in [(0.0, stored[0]), (1.0, stored[1])] {
        apply_continuous(&mut doc, &parent.id, w).map_err(|e| e.to_string())?;
        let got = (
            doc.registry.continuous(&children[0]).unwrap().weight,
            doc.registry.continuous(&children[1]).unwrap().weight,
        );
        check(got.0.to_bits() == wb.to_bits() && got.1.to_bits() == wf.to_bits(), || {
            format!("w = {w}: children at {got:?}, stored ({wb}, {wf})")
        })?;
        let want_boat = -20.0 + 40.0 * wb;
        let want_fly = -20.0 + 40.0 * wf;
        check((tx(&doc, "boat") - want_boat).abs() < 1e-12 && (tx(&doc, "fly") - want_fly).abs() < 1e-12, || {
            format!("w = {w}: objects at {} {}", tx(&doc, "boat"), tx(&doc, "fly"))
        })?;
    }
    apply_continuous(&mut doc, &parent.id, 0.5).map_err(|e| e.to_string())?;
    check((tx(&doc, "boat") - 0.0).abs() < 1e-12 && (tx(&doc, "fly") - 0.0).abs() < 1e-12, || {
        format!("w = 0.5: objects at {} {}", tx(&doc, "boat"), tx(&doc, "fly"))
    })?;

    // members storing the weight of the squidget they would form
    let canvas0 = doc.registry.canvases[0].id.clone();
    let mut looped = doc.registry.clone();
    let mut snap = AttributeSnapshot::new();
    snap.insert(AttributePath::weight(&format!("c{}", looped.next_id)), 0.5);
    for (id, x) in [("d90", 50.0), ("d91", 60.0)] {
        looped
            .insert_discrete(DiscreteSquidget {
                id: id.into(),
                canvas: canvas0.clone(),
                curve: bar(x, 5.0).resample(30).unwrap(),
                snapshot: snap.clone(),
            })
            .map_err(|e| e.to_string())?;
    }
    let via_connect = looped.connect(vec!["d90".into(), "d91".into()]);
    check(matches!(via_connect, Err(Error::NestingCycle(_))), || {
        format!("self-driving connect gave {via_connect:?}")
    })?;

    // a loaded document where a child member stores the parent's weight
    let mut cyclic = doc.clone();
    let child_member = cyclic.registry.continuous(&children[0]).unwrap().members[0].clone();
    let idx = cyclic.registry.discrete.iter().position(|d| d.id == child_member).unwrap();
    cyclic.registry.discrete[idx]
        .snapshot
        .insert(AttributePath::weight(&parent.id), 0.5);
    check(matches!(cyclic.registry.check_acyclic(), Err(Error::NestingCycle(_))), || {
        "cycle not detected".into()
    })?;
    let applied = apply_continuous(&mut cyclic, &parent.id, 0.0);
    check(matches!(applied, Err(Error::NestingCycle(_))), || {
        format!("applying through a cycle gave {applied:?}")
    })?;
    Ok("parent drives both children; endpoints bitwise exact; cycle rejected".into())
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("constants honored", constants, None),
        ("rigid-fit exactness", rigid_fit, Some(Duration::from_secs(5))),
        ("selection robustness", selection_robustness, Some(Duration::from_secs(10))),
        ("continuous-w oracle", continuous_oracle, Some(Duration::from_secs(5))),
        ("scalar-solver oracle", scalar_solver, Some(Duration::from_secs(10))),
        ("implicit fixed point", implicit_fixed_point, None),
        ("gesture classification", gesture_classification, None),
        ("determinism", determinism, None),
        ("nested squidgets", nested, None),
    ];
    let mut failed = 0;
    for (name, run, limit) in criteria {
        let start = Instant::now();
        let outcome = run();
        let took = start.elapsed();
        let outcome = match (outcome, limit) {
            (Ok(_), Some(l)) if took > l => Err(format!("took {took:.2?}, limit {l:?}")),
            (o, _) => o,
        };
        match outcome {
            Ok(detail) => println!("PASS {name}: {detail} ({took:.2?})"),
            Err(why) => {
                failed += 1;
                println!("FAIL {name}: {why} ({took:.2?})");
            }
        }
    }
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
