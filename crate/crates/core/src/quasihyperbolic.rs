//! Numerical quasihyperbolic metric of the unit ball.
//!
//! Geodesics lie in the 2-plane through `0`, `x` and `y`. Off the diameters the distance
//! comes from the first integral of the radial density (one scalar bisection), and a
//! slower polyline minimizer is kept as an independent check.

use crate::error::{Error, Result};
use crate::geometry::{Domain, Vector};
use std::f64::consts::PI;

use crate::metrics::rho_unit_ball;

/// A polyline in the domain together with its quasihyperbolic length.
#[derive(Clone, Debug)]
pub struct GeodesicPath {
    pub points: Vec<Vector>,
    pub length: f64,
}

const MAX_LEVELS: usize = 10;
const MAX_STEPS_PER_LEVEL: usize = 500;
const INITIAL_SEGMENTS: usize = 16;
/// Angles closer than this to 0 or pi are treated as collinear with the origin.
const COLLINEAR_ANGLE: f64 = 1e-9;

/// Quasihyperbolic length `∫ |dz| / d(z)` of the polyline through `path`.
///
/// Each segment is integrated by adaptive Simpson quadrature until the relative change
/// drops below `1e-10`.
pub fn qh_length(domain: &Domain, path: &[Vector]) -> Result<f64> {
    if path.is_empty() {
        return Err(Error::Range("a path needs at least one point".into()));
    }
    for p in path {
        domain.ensure_contains(p)?;
    }
    let mut total = 0.0;
    for w in path.windows(2) {
        total += segment_length(domain, &w[0], &w[1])?;
    }
    Ok(total)
}

fn segment_length(domain: &Domain, a: &Vector, b: &Vector) -> Result<f64> {
    let len = a.dist(b);
    if len == 0.0 {
        return Ok(0.0);
    }
    let dir = b - a;
    let density = |t: f64| -> Result<f64> {
        let d = domain.boundary_distance_unchecked(&a.offset(&dir, t));
        if d > 0.0 {
            Ok(1.0 / d)
        } else {
            Err(Error::NotInDomain {
                point: a.offset(&dir, t).to_string(),
                domain: domain.to_string(),
            })
        }
    };
    let (f0, fm, f1) = (density(0.0)?, density(0.5)?, density(1.0)?);
    let whole = (f0 + 4.0 * fm + f1) / 6.0;
    Ok(len * adaptive_simpson(&density, 0.0, 1.0, f0, fm, f1, whole, 1e-10, 48)?)
}

#[allow(clippy::too_many_arguments)]
fn adaptive_simpson(
    f: &impl Fn(f64) -> Result<f64>,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    rel_tol: f64,
    depth: u32,
) -> Result<f64> {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm)?, f(rm)?);
    let h = b - a;
    let left = h / 12.0 * (fa + 4.0 * flm + fm);
    let right = h / 12.0 * (fm + 4.0 * frm + fb);
    let refined = left + right;
    if depth == 0 || (refined - whole).abs() <= rel_tol * refined.abs() {
        return Ok(refined + (refined - whole) / 15.0);
    }
    Ok(adaptive_simpson(f, a, m, fa, flm, fm, left, rel_tol, depth - 1)?
        + adaptive_simpson(f, m, b, fm, frm, fb, right, rel_tol, depth - 1)?)
}

/// Quasihyperbolic distance in the unit ball together with a polyline along the geodesic.
///
/// The geodesic is computed from the first integral of the rotationally symmetric
/// density: along it `|z| sin(psi) / (1 - |z|) = c` where `psi` is the angle between the
/// curve and the radius. With `u = |z| / (1 - |z|) = c cosh s` both the swept angle and
/// the length are elementary in `s`, so the only numerical step is a bisection for `c`.
/// The polyline is refined until its own quasihyperbolic length is within `tol` of the
/// returned value (capped at 4096 segments).
pub fn qh_distance(x: &Vector, y: &Vector, tol: f64) -> Result<(f64, GeodesicPath)> {
    validate(x, y, tol)?;
    let ball = Domain::UnitBall { dim: x.dim() };
    let (nx, ny) = (x.norm(), y.norm());
    let (value, points) = match configuration(x, y) {
        Configuration::Same => {
            return Ok((
                0.0,
                GeodesicPath {
                    points: vec![x.clone()],
                    length: 0.0,
                },
            ))
        }
        Configuration::Radial => (radial_value(nx, ny), vec![x.clone(), y.clone()]),
        Configuration::ThroughOrigin => (
            through_origin_value(nx, ny),
            vec![x.clone(), Vector::zeros(x.dim()), y.clone()],
        ),
        Configuration::Planar { theta } => {
            let g = Geodesic::solve(nx, ny, theta);
            let value = g.length();
            let frame = PlaneFrame::new(x, y);
            let mut n = 32;
            let points = loop {
                let mut pts = g.polyline(&frame, n);
                *pts.first_mut().unwrap() = x.clone();
                *pts.last_mut().unwrap() = y.clone();
                if n >= 4096 || qh_length(&ball, &pts)? - value <= tol {
                    break pts;
                }
                n *= 2;
            };
            (value, points)
        }
    };
    check_band(x, y, value, tol)?;
    let length = qh_length(&ball, &points)?;
    Ok((value, GeodesicPath { points, length }))
}

/// The value of [`qh_distance`] without building the path.
pub fn qh_value(x: &Vector, y: &Vector, tol: f64) -> Result<f64> {
    validate(x, y, tol)?;
    let (nx, ny) = (x.norm(), y.norm());
    let value = match configuration(x, y) {
        Configuration::Same => return Ok(0.0),
        Configuration::Radial => radial_value(nx, ny),
        Configuration::ThroughOrigin => through_origin_value(nx, ny),
        Configuration::Planar { theta } => Geodesic::solve(nx, ny, theta).length(),
    };
    check_band(x, y, value, tol)?;
    Ok(value)
}

/// Quasihyperbolic distance by direct minimization of the discrete length functional.
///
/// Vertices sit at equally spaced polar angles between `x` and `y` in their common
/// 2-plane and only their radii move. The chain starts on the hyperbolic geodesic, is
/// minimized by damped Newton steps on the tridiagonal Hessian (falling back to a
/// coordinate-wise golden-section sweep), and the vertex count is doubled until the
/// length improves by less than `tol/2`. Much slower than [`qh_distance`]; it makes no
/// use of the first integral and serves as an independent check.
pub fn qh_distance_polyline(x: &Vector, y: &Vector, tol: f64) -> Result<(f64, GeodesicPath)> {
    validate(x, y, tol)?;
    let ball = Domain::UnitBall { dim: x.dim() };
    let (nx, ny) = (x.norm(), y.norm());
    let (value, points) = match configuration(x, y) {
        Configuration::Same => (0.0, vec![x.clone()]),
        Configuration::Radial => (radial_value(nx, ny), vec![x.clone(), y.clone()]),
        Configuration::ThroughOrigin => (
            through_origin_value(nx, ny),
            vec![x.clone(), Vector::zeros(x.dim()), y.clone()],
        ),
        Configuration::Planar { theta } => {
            let frame = PlaneFrame::new(x, y);
            minimize_chain(&ball, &frame, nx, ny, theta, tol)?
        }
    };
    check_band(x, y, value, tol)?;
    Ok((value, GeodesicPath { points, length: value }))
}

fn validate(x: &Vector, y: &Vector, tol: f64) -> Result<()> {
    if x.dim() != y.dim() {
        return Err(Error::DimensionMismatch {
            expected: x.dim(),
            got: y.dim(),
        });
    }
    let ball = Domain::UnitBall { dim: x.dim() };
    ball.ensure_contains(x)?;
    ball.ensure_contains(y)?;
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::Range(format!("tolerance must be positive, got {tol}")));
    }
    Ok(())
}

fn check_band(x: &Vector, y: &Vector, value: f64, tol: f64) -> Result<()> {
    let rho = rho_unit_ball(x, y)?;
    if value < 0.5 * rho - tol || value > rho + tol {
        return Err(Error::Consistency(format!(
            "quasihyperbolic value {value} outside [rho/2, rho] = [{}, {rho}]",
            0.5 * rho
        )));
    }
    Ok(())
}

enum Configuration {
    Same,
    /// On a common ray from the origin (or one of them is the origin).
    Radial,
    /// On a common line through the origin, on opposite sides.
    ThroughOrigin,
    Planar { theta: f64 },
}

fn configuration(x: &Vector, y: &Vector) -> Configuration {
    if x == y {
        return Configuration::Same;
    }
    match planar_angle(x, y) {
        None => Configuration::Radial,
        Some(theta) if theta < COLLINEAR_ANGLE => Configuration::Radial,
        Some(theta) if PI - theta < COLLINEAR_ANGLE => Configuration::ThroughOrigin,
        Some(theta) => Configuration::Planar { theta },
    }
}

/// Angle between `x` and `y` seen from the origin, or `None` if either is the origin.
fn planar_angle(x: &Vector, y: &Vector) -> Option<f64> {
    if x.is_zero() || y.is_zero() {
        return None;
    }
    let (ux, uy) = (x.scale(1.0 / x.norm()), y.scale(1.0 / y.norm()));
    Some(2.0 * (&ux - &uy).norm().atan2((&ux + &uy).norm()))
}

fn radial_value(nx: f64, ny: f64) -> f64 {
    ((-nx).ln_1p() - (-ny).ln_1p()).abs()
}

fn through_origin_value(nx: f64, ny: f64) -> f64 {
    -(-nx).ln_1p() - (-ny).ln_1p()
}

/// `∫_0^s dσ / (1 + c cosh σ)` in closed form.
fn inv_cosh_integral(c: f64, s: f64) -> f64 {
    let t = (0.5 * s).tanh();
    let z = (1.0 - c) / (1.0 + c) * t * t;
    if z.abs() < 0.01 {
        // atanh(w)/w as a power series in w^2 = z.
        let mut sum = 0.0;
        let mut zk = 1.0;
        for k in 0..10 {
            sum += zk / (2 * k + 1) as f64;
            zk *= z;
        }
        2.0 * t / (1.0 + c) * sum
    } else if c < 1.0 {
        let k = ((1.0 - c) / (1.0 + c)).sqrt();
        // 1 - k t without cancellation: 1 - k = 2c / ((1 + c)(1 + k)), 1 - t = 2 / (e^s + 1).
        let one_minus = 2.0 * c / ((1.0 + c) * (1.0 + k)) + k * 2.0 / (s.exp() + 1.0);
        ((1.0 + k * t) / one_minus).ln() / ((1.0 - c) * (1.0 + c)).sqrt()
    } else {
        let k = ((c - 1.0) / (c + 1.0)).sqrt();
        2.0 * (k * t).atan() / ((c - 1.0) * (c + 1.0)).sqrt()
    }
}

/// A quasihyperbolic geodesic of the unit disk between radii `a = |x|` and `b = |y|`,
/// parametrized by `s` with `|z| / (1 - |z|) = c cosh s`.
struct Geodesic {
    c: f64,
    sa: f64,
    sb: f64,
    /// Whether the geodesic passes its closest point to the origin (at `s = 0`).
    turning: bool,
}

impl Geodesic {
    fn branch(ua: f64, ub: f64, tau: f64) -> Geodesic {
        let umin = ua.min(ub);
        let (c, turning) = if tau <= 1.0 {
            (tau * umin, false)
        } else {
            ((2.0 - tau) * umin, true)
        };
        let s = |u: f64| (u / c).max(1.0).acosh();
        Geodesic {
            c,
            sa: s(ua),
            sb: s(ub),
            turning,
        }
    }

    /// Swept angle `∫ dσ / (cosh σ (1 + c cosh σ))` from 0 to `s`.
    fn phi(&self, s: f64) -> f64 {
        2.0 * (0.5 * s).tanh().atan() - self.c * inv_cosh_integral(self.c, s)
    }

    /// Quasihyperbolic length from `s = 0` to `s`.
    fn arc(&self, s: f64) -> f64 {
        s - inv_cosh_integral(self.c, s)
    }

    fn angle(&self) -> f64 {
        if self.turning {
            self.phi(self.sa) + self.phi(self.sb)
        } else {
            (self.phi(self.sb) - self.phi(self.sa)).abs()
        }
    }

    fn length(&self) -> f64 {
        if self.turning {
            self.arc(self.sa) + self.arc(self.sb)
        } else {
            (self.arc(self.sb) - self.arc(self.sa)).abs()
        }
    }

    /// The geodesic from radius `a` to radius `b` sweeping the angle `theta` in `(0, pi)`.
    ///
    /// The branch parameter `tau` in `(0, 2)` runs over the monotone geodesics
    /// (`c` from 0 up to `min(u_a, u_b)`) and then over the ones with a turning point
    /// (`c` back down to 0); the swept angle increases from 0 to `pi` along it.
    fn solve(a: f64, b: f64, theta: f64) -> Geodesic {
        let (ua, ub) = (a / (1.0 - a), b / (1.0 - b));
        let (mut lo, mut hi) = (0.0_f64, 2.0_f64);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if Geodesic::branch(ua, ub, mid).angle() < theta {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Geodesic::branch(ua, ub, 0.5 * (lo + hi))
    }

    /// `n + 1` points along the geodesic, equally spaced in `s`, from `x` to `y`.
    fn polyline(&self, frame: &PlaneFrame, n: usize) -> Vec<Vector> {
        let point = |s: f64, angle: f64| {
            let u = self.c * s.cosh();
            let rho = u / (1.0 + u);
            frame.embed(rho * angle.cos(), rho * angle.sin())
        };
        let phi_a = self.phi(self.sa);
        (0..=n)
            .map(|i| {
                let f = i as f64 / n as f64;
                if self.turning {
                    let sigma = -self.sa + f * (self.sa + self.sb);
                    let angle = if sigma < 0.0 {
                        phi_a - self.phi(-sigma)
                    } else {
                        phi_a + self.phi(sigma)
                    };
                    point(sigma.abs(), angle)
                } else {
                    let s = self.sa + f * (self.sb - self.sa);
                    point(s, (self.phi(s) - phi_a).abs())
                }
            })
            .collect()
    }
}

/// Orthonormal frame of the plane spanned by `x` and `y`, with `x` on the first axis.
struct PlaneFrame {
    u: Vector,
    v: Vector,
}

impl PlaneFrame {
    fn new(x: &Vector, y: &Vector) -> Self {
        let u = x.scale(1.0 / x.norm());
        let yu = y.scale(1.0 / y.norm());
        let w = yu.offset(&u, -yu.dot(&u));
        let v = w.scale(1.0 / w.norm());
        PlaneFrame { u, v }
    }

    fn embed(&self, a: f64, b: f64) -> Vector {
        self.u.scale(a).offset(&self.v, b)
    }
}

// Gauss-Legendre nodes and weights on [0, 1].
const GL_NODES: [f64; 4] = [
    0.069_431_844_202_973_71,
    0.330_009_478_207_571_9,
    0.669_990_521_792_428_1,
    0.930_568_155_797_026_3,
];
const GL_WEIGHTS: [f64; 4] = [
    0.173_927_422_568_726_93,
    0.326_072_577_431_273_07,
    0.326_072_577_431_273_07,
    0.173_927_422_568_726_93,
];

/// Chain of vertices `rho_i * (cos t_i, sin t_i)` with fixed, equally spaced angles.
struct Chain {
    cos: Vec<f64>,
    sin: Vec<f64>,
    radii: Vec<f64>,
}

impl Chain {
    fn segments(&self) -> usize {
        self.radii.len() - 1
    }

    /// Quasihyperbolic cost of segment `i -> i+1` with the given radii.
    fn cost(&self, i: usize, ra: f64, rb: f64) -> f64 {
        let (ax, ay) = (ra * self.cos[i], ra * self.sin[i]);
        let (bx, by) = (rb * self.cos[i + 1], rb * self.sin[i + 1]);
        let (dx, dy) = (bx - ax, by - ay);
        let len = dx.hypot(dy);
        let mut sum = 0.0;
        for (t, w) in GL_NODES.iter().zip(GL_WEIGHTS) {
            let d = 1.0 - (ax + t * dx).hypot(ay + t * dy);
            if d <= 0.0 {
                return f64::INFINITY;
            }
            sum += w / d;
        }
        len * sum
    }

    fn total(&self) -> f64 {
        (0..self.segments())
            .map(|i| self.cost(i, self.radii[i], self.radii[i + 1]))
            .sum()
    }

    fn local(&self, i: usize, r: f64) -> f64 {
        self.cost(i - 1, self.radii[i - 1], r) + self.cost(i, r, self.radii[i + 1])
    }

    fn points(&self, frame: &PlaneFrame) -> Vec<Vector> {
        self.radii
            .iter()
            .zip(self.cos.iter().zip(&self.sin))
            .map(|(r, (c, s))| frame.embed(r * c, r * s))
            .collect()
    }

    /// One damped Newton step on the tridiagonal Hessian. Returns the decrease, or `None`
    /// when the Hessian is not positive definite or no step decreases the length.
    fn newton_step(&mut self, current: f64) -> Option<f64> {
        let n = self.segments();
        let interior = n - 1;
        let mut grad = vec![0.0; interior];
        let mut diag = vec![0.0; interior];
        let mut off = vec![0.0; interior.saturating_sub(1)];
        let step = |r: f64| 1e-4 * (1.0 - r.abs()).max(1e-12);
        for seg in 0..n {
            let (ra, rb) = (self.radii[seg], self.radii[seg + 1]);
            let (ha, hb) = (step(ra), step(rb));
            let c = |a: f64, b: f64| self.cost(seg, a, b);
            let c0 = c(ra, rb);
            if seg >= 1 {
                let (cp, cm) = (c(ra + ha, rb), c(ra - ha, rb));
                grad[seg - 1] += (cp - cm) / (2.0 * ha);
                diag[seg - 1] += (cp - 2.0 * c0 + cm) / (ha * ha);
            }
            if seg + 1 < n {
                let (cp, cm) = (c(ra, rb + hb), c(ra, rb - hb));
                grad[seg] += (cp - cm) / (2.0 * hb);
                diag[seg] += (cp - 2.0 * c0 + cm) / (hb * hb);
            }
            if seg >= 1 && seg + 1 < n {
                let mixed = (c(ra + ha, rb + hb) - c(ra + ha, rb - hb) - c(ra - ha, rb + hb)
                    + c(ra - ha, rb - hb))
                    / (4.0 * ha * hb);
                off[seg - 1] += mixed;
            }
        }
        let delta = solve_tridiagonal(&diag, &off, &grad)?;
        let mut alpha = 1.0;
        let saved = self.radii.clone();
        for _ in 0..40 {
            let mut ok = true;
            for (k, d) in delta.iter().enumerate() {
                let r = saved[k + 1] - alpha * d;
                if r.abs() >= 1.0 {
                    ok = false;
                    break;
                }
                self.radii[k + 1] = r;
            }
            if ok {
                let value = self.total();
                if value < current {
                    return Some(current - value);
                }
            }
            alpha *= 0.5;
        }
        self.radii = saved;
        None
    }

    /// Coordinate-wise golden-section sweep over the interior radii.
    fn golden_sweep(&mut self) {
        const INV_PHI: f64 = 0.618_033_988_749_894_9;
        for i in 1..self.segments() {
            let r = self.radii[i];
            let w = 0.5 * (1.0 - r.abs());
            let (mut a, mut b) = (r - w, r + w);
            let mut c = b - INV_PHI * (b - a);
            let mut d = a + INV_PHI * (b - a);
            let (mut fc, mut fd) = (self.local(i, c), self.local(i, d));
            for _ in 0..80 {
                if fc < fd {
                    b = d;
                    d = c;
                    fd = fc;
                    c = b - INV_PHI * (b - a);
                    fc = self.local(i, c);
                } else {
                    a = c;
                    c = d;
                    fc = fd;
                    d = a + INV_PHI * (b - a);
                    fd = self.local(i, d);
                }
            }
            let candidate = 0.5 * (a + b);
            if self.local(i, candidate) < self.local(i, r) {
                self.radii[i] = candidate;
            }
        }
    }

    /// Doubles the vertex count; new vertices lie on the old chords, so the length is kept.
    fn refine(&self, theta: f64) -> Chain {
        let n = self.segments();
        let half = 0.5 * theta / n as f64;
        let mut radii = Vec::with_capacity(2 * n + 1);
        for i in 0..n {
            let (a, b) = (self.radii[i], self.radii[i + 1]);
            radii.push(a);
            radii.push(2.0 * a * b * half.cos() / (a + b));
        }
        radii.push(self.radii[n]);
        Chain::with_radii(theta, radii)
    }

    fn with_radii(theta: f64, radii: Vec<f64>) -> Chain {
        let n = radii.len() - 1;
        let angles = (0..=n).map(|i| theta * i as f64 / n as f64);
        let (cos, sin) = angles.map(|t| (t.cos(), t.sin())).unzip();
        Chain { cos, sin, radii }
    }
}

/// Thomas algorithm for a symmetric tridiagonal system; `None` unless positive definite.
fn solve_tridiagonal(diag: &[f64], off: &[f64], rhs: &[f64]) -> Option<Vec<f64>> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    let mut pivot = diag[0];
    if pivot.is_nan() || pivot <= 0.0 {
        return None;
    }
    if n > 1 {
        c[0] = off[0] / pivot;
    }
    d[0] = rhs[0] / pivot;
    for i in 1..n {
        pivot = diag[i] - off[i - 1] * c[i - 1];
        if !(pivot > 0.0 && pivot.is_finite()) {
            return None;
        }
        if i + 1 < n {
            c[i] = off[i] / pivot;
        }
        d[i] = (rhs[i] - off[i - 1] * d[i - 1]) / pivot;
    }
    for i in (0..n.saturating_sub(1)).rev() {
        d[i] -= c[i] * d[i + 1];
    }
    Some(d)
}

/// Radius at polar angle `t` of the hyperbolic geodesic through `(nx, 0)` and
/// `ny (cos theta, sin theta)`: the circle orthogonal to the unit circle.
fn hyperbolic_geodesic_radius(nx: f64, ny: f64, theta: f64, t: f64) -> f64 {
    let cx = (1.0 + nx * nx) / (2.0 * nx);
    let cy = ((1.0 + ny * ny) / 2.0 - cx * ny * theta.cos()) / (ny * theta.sin());
    let cu = cx * t.cos() + cy * t.sin();
    1.0 / (cu + (cu * cu - 1.0).max(0.0).sqrt())
}

fn minimize_chain(
    ball: &Domain,
    frame: &PlaneFrame,
    nx: f64,
    ny: f64,
    theta: f64,
    tol: f64,
) -> Result<(f64, Vec<Vector>)> {
    let n = INITIAL_SEGMENTS;
    let mut radii: Vec<f64> = (0..=n)
        .map(|i| hyperbolic_geodesic_radius(nx, ny, theta, theta * i as f64 / n as f64))
        .collect();
    radii[0] = nx;
    radii[n] = ny;
    let mut chain = Chain::with_radii(theta, radii);

    let mut previous: Option<f64> = None;
    let mut last_gap = f64::INFINITY;
    for level in 0..MAX_LEVELS {
        if level > 0 {
            chain = chain.refine(theta);
        }
        descend(&mut chain, tol);
        let points = chain.points(frame);
        let value = qh_length(ball, &points)?;
        if let Some(prev) = previous {
            last_gap = prev - value;
            if last_gap < 0.5 * tol {
                return Ok((value, points));
            }
        }
        previous = Some(value);
    }
    Err(Error::NoConvergence {
        best: previous.unwrap_or(f64::NAN),
        gap: last_gap,
    })
}

fn descend(chain: &mut Chain, tol: f64) {
    let stop = 1e-3 * tol;
    let mut value = chain.total();
    for _ in 0..MAX_STEPS_PER_LEVEL {
        match chain.newton_step(value) {
            Some(decrease) => {
                value -= decrease;
                if decrease < stop {
                    break;
                }
            }
            None => {
                chain.golden_sweep();
                let next = chain.total();
                if value - next < stop {
                    break;
                }
                value = next;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ball() -> Domain {
        Domain::unit_ball(2).unwrap()
    }

    #[test]
    fn length_of_radial_paths() {
        let v = qh_length(&ball(), &[Vector::zeros(2), Vector::xy(0.5, 0.0)]).unwrap();
        assert!((v - 2f64.ln()).abs() < 1e-10);
        assert_eq!(qh_length(&ball(), &[Vector::zeros(2)]).unwrap(), 0.0);
        let v = qh_length(
            &ball(),
            &[Vector::xy(-0.3, 0.0), Vector::zeros(2), Vector::xy(0.3, 0.0)],
        )
        .unwrap();
        assert!((v - 2.0 * (1.0f64 / 0.7).ln()).abs() < 1e-10);
        assert!(qh_length(&ball(), &[Vector::zeros(2), Vector::xy(1.0, 0.0)]).is_err());
        assert!(qh_length(&ball(), &[]).is_err());
    }

    #[test]
    fn radial_distances_are_exact() {
        let (v, path) = qh_distance(&Vector::zeros(2), &Vector::xy(0.5, 0.0), 1e-8).unwrap();
        assert!((v - 2f64.ln()).abs() < 1e-14);
        assert_eq!(path.points.len(), 2);
        let (v, _) = qh_distance(&Vector::xy(0.2, 0.2), &Vector::xy(0.6, 0.6), 1e-8).unwrap();
        let (a, b) = (0.08f64.sqrt(), 0.72f64.sqrt());
        assert!((v - ((1.0 - a) / (1.0 - b)).ln()).abs() < 1e-12);
        let (v, path) = qh_distance(&Vector::xy(0.3, 0.0), &Vector::xy(-0.5, 0.0), 1e-8).unwrap();
        assert!((v - ((1.0f64 / 0.7).ln() + 2f64.ln())).abs() < 1e-12);
        assert_eq!(path.points.len(), 3);
        let x = Vector::xy(0.1, 0.7);
        assert_eq!(qh_distance(&x, &x, 1e-6).unwrap().0, 0.0);
    }

    #[test]
    fn planar_case_within_band() {
        let x = Vector::xy(0.5, 0.0);
        let y = Vector::xy(0.0, 0.5);
        let (v, path) = qh_distance(&x, &y, 1e-6).unwrap();
        let rho = rho_unit_ball(&x, &y).unwrap();
        assert!(v >= 0.5 * rho && v <= rho, "k = {v}, rho = {rho}");
        assert!((path.length - v).abs() < 1e-6);
        assert!((v - 1.154_341_29).abs() < 1e-7);
        assert!(path.points.first().unwrap().dist(&x) < 1e-14);
        assert!(path.points.last().unwrap().dist(&y) < 1e-14);
    }

    #[test]
    fn closed_form_integral_matches_quadrature() {
        for c in [1e-6, 0.05, 0.7, 1.0, 1.3, 40.0] {
            for s in [1e-3, 0.4, 2.0, 9.0, 30.0] {
                let n = 20_000;
                let h = s / n as f64;
                let f = |t: f64| 1.0 / (1.0 + c * t.cosh());
                let mut q = f(0.0) + f(s);
                for i in 1..n {
                    q += if i % 2 == 1 { 4.0 } else { 2.0 } * f(i as f64 * h);
                }
                q *= h / 3.0;
                let v = inv_cosh_integral(c, s);
                assert!((v - q).abs() < 1e-9 * q.max(1.0), "c={c} s={s}: {v} vs {q}");
            }
        }
    }

    #[test]
    fn swept_angle_is_monotone_in_branch_parameter() {
        let (ua, ub) = (0.4 / 0.6, 0.85 / 0.15);
        let mut prev = 0.0;
        for i in 1..400 {
            let a = Geodesic::branch(ua, ub, i as f64 / 200.0).angle();
            assert!(a > prev && a < PI, "step {i}: {a} after {prev}");
            prev = a;
        }
    }

    #[test]
    fn sampled_geodesic_ends_at_target() {
        let x = Vector::xy(0.3, 0.1);
        let y = Vector::xy(-0.6, 0.5);
        let theta = planar_angle(&x, &y).unwrap();
        let g = Geodesic::solve(x.norm(), y.norm(), theta);
        let pts = g.polyline(&PlaneFrame::new(&x, &y), 64);
        assert!(pts[0].dist(&x) < 1e-12);
        assert!(pts[64].dist(&y) < 1e-10, "{}", pts[64].dist(&y));
    }

    #[test]
    fn first_integral_agrees_with_polyline_descent() {
        let pairs = [
            (Vector::xy(0.5, 0.0), Vector::xy(0.0, 0.5)),
            (Vector::xy(0.8, 0.0), Vector::xy(0.75, 0.05)),
            (Vector::xy(0.1, 0.2), Vector::xy(-0.7, -0.1)),
            (Vector::xy(0.02, 0.0), Vector::xy(-0.6, 0.01)),
        ];
        for (x, y) in pairs {
            let a = qh_value(&x, &y, 1e-8).unwrap();
            let (b, _) = qh_distance_polyline(&x, &y, 1e-6).unwrap();
            assert!((a - b).abs() < 2e-6 && a <= b + 1e-9, "{x} {y}: {a} vs {b}");
        }
    }

    #[test]
    fn invalid_arguments() {
        let o = Vector::zeros(2);
        assert!(qh_distance(&o, &Vector::xy(1.0, 0.0), 1e-6).is_err());
        assert!(qh_distance(&o, &Vector::xy(0.5, 0.0), 0.0).is_err());
        assert!(qh_distance(&o, &Vector::zeros(3), 1e-6).is_err());
    }

    #[test]
    fn tridiagonal_solver() {
        // [[2,1,0],[1,2,1],[0,1,2]] x = [4, 8, 8] -> x = [1, 2, 3]
        let x = solve_tridiagonal(&[2.0, 2.0, 2.0], &[1.0, 1.0], &[4.0, 8.0, 8.0]).unwrap();
        for (a, b) in x.iter().zip([1.0, 2.0, 3.0]) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!(solve_tridiagonal(&[-1.0, 2.0], &[0.0], &[1.0, 1.0]).is_none());
    }
}
