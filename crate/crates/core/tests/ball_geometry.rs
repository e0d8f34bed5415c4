use std::f64::consts::PI;

use metric_balls::ball_geometry::{
    j_ball_bounds, j_ball_inscribed, q_ball_euclidean, q_ball_inside_threshold, rho_ball_euclidean,
    sample_metric_sphere_2d,
};
use metric_balls::verifier::{two_puncture_report, unit_ball_inscribed_check};
use metric_balls::{Domain, MetricKind, Vector};
use proptest::prelude::*;

fn center() -> impl Strategy<Value = Vector> {
    (0.0..0.9f64, 0.0..2.0 * PI).prop_map(|(s, t)| Vector::xy(s * t.cos(), s * t.sin()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn rho_spheres_are_euclidean_circles(x in center(), r in 0.05..4.0f64) {
        let ball = rho_ball_euclidean(&x, r).unwrap();
        let s = sample_metric_sphere_2d(&Domain::unit_ball(2).unwrap(), MetricKind::Hyperbolic, &x, r, 256).unwrap();
        prop_assert!(s.skipped.is_empty());
        for p in &s.points {
            prop_assert!((p.point.dist(&ball.center) - ball.radius).abs() <= 1e-9);
        }
    }

    #[test]
    fn q_spheres_are_euclidean_circles(x in center(), frac in 0.02..0.98f64) {
        let r = frac * q_ball_inside_threshold(x.norm());
        let conv = q_ball_euclidean(&x, r).unwrap();
        prop_assert!(conv.inside_unit_ball);
        let s = sample_metric_sphere_2d(&Domain::unit_ball(2).unwrap(), MetricKind::Chordal, &x, r, 256).unwrap();
        for p in &s.points {
            prop_assert!((p.point.dist(&conv.ball.center) - conv.ball.radius).abs() <= 1e-9);
        }
    }

    #[test]
    fn j_spheres_sit_between_the_bounding_balls(x in center(), r in 0.05..3.0f64) {
        let (inner, outer) = j_ball_bounds(&x, r).unwrap();
        prop_assert!(inner.radius <= outer.radius);
        let s = sample_metric_sphere_2d(&Domain::unit_ball(2).unwrap(), MetricKind::DistanceRatio, &x, r, 256).unwrap();
        for p in &s.points {
            let d = p.point.dist(&x);
            prop_assert!(inner.radius - 1e-9 <= d && d <= outer.radius + 1e-9);
        }
    }

    #[test]
    fn inscribed_ball_is_inside_and_maximal(x in center(), frac in 0.05..1.0f64) {
        prop_assume!(x.norm() > 0.01);
        // Up to log(1/(1-|x|)) the j-ball does not contain the origin.
        let r = frac * (1.0 / (1.0 - x.norm())).ln();
        let check = unit_ball_inscribed_check(&x, r, 2048).unwrap();
        prop_assert!(check.contained, "max j = {} > {r}", check.max_j);
        prop_assert!(check.maximal, "inflated max j = {} <= {r}", check.max_j_inflated);
    }
}

#[test]
fn q_threshold_flips_containment() {
    for absx in [0.0, 0.3, 0.6, 0.9] {
        let x = Vector::xy(absx, 0.0);
        let r0 = q_ball_inside_threshold(absx);
        let reach = |r: f64| {
            let b = q_ball_euclidean(&x, r).unwrap().ball;
            b.center.norm() + b.radius
        };
        assert!(reach(r0 - 1e-6) < 1.0);
        assert!(reach(r0 + 1e-6) > 1.0);
        assert!((reach(r0) - 1.0).abs() < 1e-9);
    }
}

#[test]
fn inscribed_ball_pokes_out_once_the_origin_is_inside() {
    // Independent numbers from dense sampling of the boundary circle: max j - r.
    for (absx, r, excess) in [(0.5, 2.0, 0.1425), (0.6, 1.2, 0.0484), (0.8, 1.9, 0.0538)] {
        let x = Vector::xy(absx, 0.0);
        let check = unit_ball_inscribed_check(&x, r, 20_000).unwrap();
        assert!(!check.contained);
        assert!((check.max_j - r - excess).abs() < 2e-3, "{absx} {r}: {}", check.max_j - r);
    }
}

#[test]
fn inscribed_ball_at_the_origin() {
    let o = Vector::zeros(2);
    let b = j_ball_inscribed(&o, 1.0).unwrap();
    assert!(b.center.norm() < 1e-15);
    assert!((b.radius - (1.0 - (-1f64).exp())).abs() < 1e-15);
    for r in [0.1, 0.5, 1.0, 2.0, 4.0] {
        let check = unit_ball_inscribed_check(&o, r, 2048).unwrap();
        assert!(check.contained && check.maximal, "r = {r}");
    }
}

#[test]
fn two_puncture_construction_is_not_the_largest() {
    let rep = two_puncture_report(2048).unwrap();
    let a = (1.0 + 3f64.sqrt()) / 2.0;
    let [right, left] = &rep.segment_ends;
    assert!((right[0] - a).abs() < 1e-6 && (right[1] - a).abs() < 1e-6, "{right}");
    assert!((left[0] + a).abs() < 1e-6 && (left[1] - a).abs() < 1e-6, "{left}");
    // The ball on the line through x and a nearest puncture leaks out of the j-ball.
    assert!(!rep.construction.contained);
    // The true largest disk sits in the right-angled wedge at the origin: B((0, sqrt 2), 1).
    assert!((rep.largest.radius - 1.0).abs() < 1e-4, "{}", rep.largest.radius);
    assert!(rep.largest.center.dist(&Vector::xy(0.0, 2f64.sqrt())) < 1e-3);
}
