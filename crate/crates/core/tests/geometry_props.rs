use std::f64::consts::TAU;

use proptest::prelude::*;
use squidgets::geometry::{
    count_crossings, dist_min_reverse, pairwise_dist, Affine2, Point2, Polyline,
};
use squidgets::scene::{LocalTransform, Scene, SceneObject, Shape};

fn point() -> impl Strategy<Value = Point2> {
    (-100.0..100.0f64, -100.0..100.0f64).prop_map(|(x, y)| Point2::new(x, y))
}

fn polyline(min: usize, max: usize) -> impl Strategy<Value = Polyline> {
    prop::collection::vec(point(), min..max)
        .prop_filter_map("degenerate", |pts| Polyline::new(pts).ok())
        .prop_filter("short", |p| p.arc_length() > 1.0)
}

fn circle(c: Point2, r: f64, n: usize) -> Polyline {
    Polyline::new(
        (0..=n)
            .map(|k| {
                let a = TAU * k as f64 / n as f64;
                c + Point2::new(r * a.cos(), r * a.sin())
            })
            .collect(),
    )
    .unwrap()
}

proptest! {
    #[test]
    fn resample_spacing_is_uniform(p in polyline(2, 12), n in 2usize..64) {
        let q = p.resample(n).unwrap();
        prop_assert_eq!(q.len(), n);
        prop_assert_eq!(q.first(), p.first());
        prop_assert_eq!(q.last(), p.last());
        // chords never exceed the arc step, and equal it on straight runs
        let step = p.arc_length() / (n - 1) as f64;
        for w in q.points().windows(2) {
            prop_assert!(w[0].distance(w[1]) <= step * (1.0 + 1e-9) + 1e-9);
        }
        let total: f64 = q.cumulative().last().copied().unwrap();
        prop_assert!(total <= p.arc_length() * (1.0 + 1e-9));
    }

    #[test]
    fn straight_resample_gaps_equal(a in point(), b in point(), n in 2usize..64) {
        prop_assume!(a.distance(b) > 1.0);
        let p = Polyline::new(vec![a, a.lerp(b, 0.3), b]).unwrap();
        let q = p.resample(n).unwrap();
        let step = a.distance(b) / (n - 1) as f64;
        for w in q.points().windows(2) {
            prop_assert!((w[0].distance(w[1]) - step).abs() < 1e-9 * a.distance(b).max(1.0));
        }
    }

    #[test]
    fn pairwise_is_symmetric(a in polyline(8, 9), b in polyline(8, 9), centered: bool) {
        let a = a.resample(16).unwrap();
        let b = b.resample(16).unwrap();
        let ab = pairwise_dist(a.points(), b.points(), centered).unwrap();
        let ba = pairwise_dist(b.points(), a.points(), centered).unwrap();
        prop_assert!((ab - ba).abs() <= 1e-9 * ab.max(1.0));
        let r = dist_min_reverse(a.points(), b.points(), centered).unwrap();
        prop_assert!(r <= ab);
        let rev = dist_min_reverse(a.points(), b.reversed().points(), centered).unwrap();
        prop_assert!((r - rev).abs() <= 1e-9 * r.max(1.0));
    }

    #[test]
    fn centered_distance_ignores_translation(a in polyline(3, 8), b in polyline(3, 8), v in point()) {
        let a = a.resample(20).unwrap();
        let b = b.resample(20).unwrap();
        let d0 = pairwise_dist(a.points(), b.points(), true).unwrap();
        let d1 = pairwise_dist(a.translated(v).points(), b.points(), true).unwrap();
        prop_assert!((d0 - d1).abs() <= 1e-8 * d0.max(1.0));
    }

    #[test]
    fn crossing_parity_matches_endpoint_sides(
        c in point(),
        r in 5.0..50.0f64,
        a in point(),
        b in point(),
    ) {
        let ring = circle(c, r, 97);
        // keep endpoints and the segment clear of tangency and vertices
        let margin = |p: Point2| (p.distance(c) - r).abs() > 0.5;
        prop_assume!(margin(a) && margin(b) && a.distance(b) > 1.0);
        let seg = Polyline::new(vec![a, b]).unwrap();
        let closest = seg.project(c).point;
        prop_assume!((closest.distance(c) - r).abs() > 0.5);
        let inside = |p: Point2| p.distance(c) < r;
        let n = count_crossings(&seg, &ring);
        prop_assert_eq!(n % 2 == 1, inside(a) != inside(b));
        prop_assert_eq!(n, count_crossings(&ring, &seg));
    }

    #[test]
    fn contours_follow_the_transform(
        tx in -50.0..50.0f64,
        ty in -50.0..50.0f64,
        rot in -3.0..3.0f64,
        scale in 0.2..5.0f64,
        rx in 1.0..20.0f64,
        ry in 1.0..20.0f64,
    ) {
        let shape = Shape::Ellipse { radius_x: rx, radius_y: ry };
        let base = Scene::new().with(SceneObject::new("e", shape.clone()));
        let moved = Scene::new().with(SceneObject::new("e", shape).with_transform(LocalTransform {
            tx,
            ty,
            rotation: rot,
            scale,
        }));
        let m = Affine2::similarity(scale, rot, Point2::new(tx, ty));
        let c0 = base.contour("e").unwrap();
        let c1 = moved.contour("e").unwrap();
        prop_assert_eq!(c0.len(), c1.len());
        for (p, q) in c0.iter().zip(&c1) {
            prop_assert_eq!(p.len(), q.len());
            for (&u, &v) in p.points().iter().zip(q.points()) {
                prop_assert!(m.apply(u).distance(v) < 1e-9 * (1.0 + scale * rx.max(ry)));
            }
        }
    }

    #[test]
    fn smoothing_keeps_endpoints(p in polyline(3, 12), k in 0usize..5) {
        let s = p.smooth(k);
        prop_assert_eq!(s.first(), p.first());
        prop_assert_eq!(s.last(), p.last());
    }
}
