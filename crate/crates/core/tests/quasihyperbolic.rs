use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};
use std::f64::consts::PI;

use metric_balls::quasihyperbolic::{qh_distance, qh_length, qh_value};
use metric_balls::{rho_unit_ball, Domain, Vector};
use proptest::prelude::*;

const TOL: f64 = 1e-8;

fn disk_point(max: f64) -> impl Strategy<Value = Vector> {
    (0.0..max, 0.0..2.0 * PI).prop_map(|(s, t)| Vector::xy(s * t.cos(), s * t.sin()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn between_half_rho_and_rho(x in disk_point(0.95), y in disk_point(0.95)) {
        let k = qh_value(&x, &y, TOL).unwrap();
        let rho = rho_unit_ball(&x, &y).unwrap();
        prop_assert!(0.5 * rho <= k + TOL && k <= rho + TOL, "k = {k}, rho = {rho}");
    }

    #[test]
    fn symmetric(x in disk_point(0.9), y in disk_point(0.9)) {
        let a = qh_value(&x, &y, TOL).unwrap();
        let b = qh_value(&y, &x, TOL).unwrap();
        prop_assert!((a - b).abs() <= 2.0 * TOL);
    }

    #[test]
    fn exact_along_a_radius(s in 0.0..0.95f64, t in 0.0..0.95f64, angle in 0.0..2.0 * PI) {
        prop_assume!((s - t).abs() > 1e-6);
        let u = Vector::xy(angle.cos(), angle.sin());
        let k = qh_value(&u.scale(s), &u.scale(t), TOL).unwrap();
        prop_assert!((k - ((1.0 - s) / (1.0 - t)).ln().abs()).abs() <= TOL);
    }

    #[test]
    fn refinement_never_lengthens(x in disk_point(0.85), y in disk_point(0.85)) {
        prop_assume!(x.dist(&y) > 1e-3);
        let ball = Domain::unit_ball(2).unwrap();
        let (_, path) = qh_distance(&x, &y, TOL).unwrap();
        let mut prev = f64::INFINITY;
        let mut step = 1usize;
        while (path.points.len() - 1) / step >= 4 {
            step *= 2;
        }
        // Coarsest level first, halving the stride each time.
        while step >= 1 {
            let pts: Vec<Vector> = path.points.iter().step_by(step).cloned().collect();
            if (path.points.len() - 1) % step != 0 {
                break;
            }
            let len = qh_length(&ball, &pts).unwrap();
            prop_assert!(len <= prev + TOL / 10.0, "stride {step}: {len} > {prev}");
            prev = len;
            step /= 2;
        }
    }
}

/// Shortest quasihyperbolic path through a square grid of spacing `1/n` restricted to
/// `|z| <= 0.97`, with 16 neighbor directions and Simpson-rule edge weights.
fn grid_distance(n: i32, a: (i32, i32), b: (i32, i32)) -> f64 {
    let h = 1.0 / n as f64;
    let point = |(i, j): (i32, i32)| (i as f64 * h, j as f64 * h);
    let inside = |p: (i32, i32)| {
        let (u, v) = point(p);
        (u * u + v * v).sqrt() <= 0.97
    };
    let inv_d = |u: f64, v: f64| 1.0 / (1.0 - (u * u + v * v).sqrt());
    let mut steps = Vec::new();
    for di in -2i32..=2 {
        for dj in -2i32..=2 {
            let g = gcd(di.unsigned_abs(), dj.unsigned_abs());
            if g == 1 {
                steps.push((di, dj));
            }
        }
    }
    let mut best: HashMap<(i32, i32), f64> = HashMap::new();
    let mut heap = BinaryHeap::new();
    best.insert(a, 0.0);
    heap.push(Reverse((Ord64(0.0), a)));
    while let Some(Reverse((Ord64(d), p))) = heap.pop() {
        if p == b {
            return d;
        }
        if d > best[&p] {
            continue;
        }
        let (pu, pv) = point(p);
        for &(di, dj) in &steps {
            let q = (p.0 + di, p.1 + dj);
            if !inside(q) {
                continue;
            }
            let (qu, qv) = point(q);
            let len = ((qu - pu).powi(2) + (qv - pv).powi(2)).sqrt();
            let w = len / 6.0 * (inv_d(pu, pv) + 4.0 * inv_d(0.5 * (pu + qu), 0.5 * (pv + qv)) + inv_d(qu, qv));
            let nd = d + w;
            if best.get(&q).is_none_or(|&old| nd < old) {
                best.insert(q, nd);
                heap.push(Reverse((Ord64(nd), q)));
            }
        }
    }
    f64::INFINITY
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

#[derive(Clone, Copy, PartialEq)]
struct Ord64(f64);

impl Eq for Ord64 {}

impl PartialOrd for Ord64 {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Ord64 {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&other.0)
    }
}

#[test]
fn agrees_with_grid_shortest_paths() {
    let n = 64;
    let pairs = [
        ((32, 0), (-16, 32)),
        ((48, 0), (0, 48)),
        ((44, 16), (-32, -24)),
        ((0, 0), (40, 24)),
        ((-56, 8), (56, 8)),
    ];
    for (a, b) in pairs {
        let g = grid_distance(n, a, b);
        let h = 1.0 / n as f64;
        let x = Vector::xy(a.0 as f64 * h, a.1 as f64 * h);
        let y = Vector::xy(b.0 as f64 * h, b.1 as f64 * h);
        let k = qh_value(&x, &y, TOL).unwrap();
        // A grid path is a competitor, so it can only be longer; the 16-direction
        // stencil keeps the excess within a couple of percent.
        assert!(k <= g + 1e-6, "{x} {y}: k = {k}, grid = {g}");
        assert!(g <= 1.02 * k, "{x} {y}: k = {k}, grid = {g}");
    }
}

#[test]
fn through_the_origin_is_the_sum_of_radial_pieces() {
    let x = Vector::xy(0.5, 0.0);
    let y = Vector::xy(-0.3, 0.0);
    let k = qh_value(&x, &y, TOL).unwrap();
    assert!((k - (2f64.ln() + (1.0f64 / 0.7).ln())).abs() < TOL);
}

#[test]
fn rejects_points_outside_the_ball() {
    assert!(qh_value(&Vector::xy(1.0, 0.0), &Vector::xy(0.0, 0.0), TOL).is_err());
}
