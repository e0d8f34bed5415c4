//! Euclidean descriptions of metric balls: hyperbolic and chordal balls as Euclidean
//! balls, the radial points and bounding balls of `j`-balls in the unit ball, the planar
//! `j`-sphere profile with its curvature, and a generic planar sphere sampler.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::geometry::{solve_radius_along_ray, Domain, EuclideanBall, RayOptions, RaySolution, UnitVector, Vector};
use crate::metrics::{j_metric, Metric, MetricKind};
use crate::parallel::Execution;

/// A metric ball rewritten as a Euclidean ball.
#[derive(Clone, Debug)]
pub struct BallConversion {
    pub kind: MetricKind,
    pub center: Vector,
    pub r: f64,
    pub ball: EuclideanBall,
    /// `tanh(r/2)` for hyperbolic balls, `1 - r^2 (1 + |x|^2)` for chordal balls.
    pub aux: f64,
    /// Whether the ball lies in the unit ball.
    pub inside_unit_ball: bool,
}

fn check_radius(r: f64) -> Result<()> {
    if r > 0.0 && r.is_finite() {
        Ok(())
    } else {
        Err(Error::Range(format!("radius must be positive and finite, got {r}")))
    }
}

fn unit_ball_of(x: &Vector) -> Domain {
    Domain::UnitBall { dim: x.dim() }
}

impl BallConversion {
    pub fn hyperbolic(x: &Vector, r: f64) -> Result<Self> {
        unit_ball_of(x).ensure_contains(x)?;
        check_radius(r)?;
        let t = (0.5 * r).tanh();
        let nx2 = x.norm_sq();
        let denom = 1.0 - nx2 * t * t;
        let ball = EuclideanBall::new(x.scale((1.0 - t * t) / denom), (1.0 - nx2) * t / denom)?;
        Ok(BallConversion {
            kind: MetricKind::Hyperbolic,
            center: x.clone(),
            r,
            ball,
            aux: t,
            inside_unit_ball: true,
        })
    }

    pub fn chordal(x: &Vector, r: f64) -> Result<Self> {
        check_radius(r)?;
        let nx2 = x.norm_sq();
        let a = 1.0 - r * r * (1.0 + nx2);
        if a <= 0.0 {
            return Err(Error::Validity(format!(
                "chordal radius {r} must be below 1/sqrt(1+|x|^2) = {}",
                1.0 / (1.0 + nx2).sqrt()
            )));
        }
        let radius = r * (1.0 + nx2) * (1.0 - r * r).sqrt() / a;
        let ball = EuclideanBall::new(x.scale(1.0 / a), radius)?;
        Ok(BallConversion {
            kind: MetricKind::Chordal,
            center: x.clone(),
            r,
            ball,
            aux: a,
            inside_unit_ball: r < q_ball_inside_threshold(x.norm()),
        })
    }
}

/// Hyperbolic ball `B_rho(x, r)` of the unit ball as a Euclidean ball.
pub fn rho_ball_euclidean(x: &Vector, r: f64) -> Result<EuclideanBall> {
    Ok(BallConversion::hyperbolic(x, r)?.ball)
}

/// Chordal ball `B_q(x, r)` as a Euclidean ball, for `r < 1/sqrt(1+|x|^2)`.
pub fn q_ball_euclidean(x: &Vector, r: f64) -> Result<BallConversion> {
    BallConversion::chordal(x, r)
}

/// `(1-|x|)/sqrt(2(1+|x|^2))`: chordal balls about `x` stay in the unit ball iff `r` is below it.
pub fn q_ball_inside_threshold(absx: f64) -> f64 {
    (1.0 - absx) / (2.0 * (1.0 + absx * absx)).sqrt()
}

/// The two points of `S_j(x, r)` on the line through `0` and `x`, `|y2| <= |y1|`.
#[derive(Clone, Debug)]
pub struct RadialPair {
    pub y1: Vector,
    pub y2: Vector,
}

/// Unit direction of `x`, with e1 standing in for the origin.
pub fn radial_direction(x: &Vector) -> Vector {
    x.direction_or(&Vector::basis(x.dim(), 0))
}

/// Signed coordinate of `y2` along the direction of `x`.
fn y2_coordinate(absx: f64, r: f64) -> f64 {
    let d = 1.0 - absx;
    if r <= ((1.0 + absx) / d).ln() {
        1.0 - r.exp() * d
    } else {
        -(1.0 - (-r).exp() * (1.0 + absx))
    }
}

pub fn j_sphere_radial_pair(x: &Vector, r: f64) -> Result<RadialPair> {
    let ball = unit_ball_of(x);
    ball.ensure_contains(x)?;
    check_radius(r)?;
    let u = radial_direction(x);
    let absx = x.norm();
    let y1 = u.scale(1.0 - (-r).exp() * (1.0 - absx));
    let y2 = u.scale(y2_coordinate(absx, r));
    for y in [&y1, &y2] {
        let v = j_metric(&ball, x, y)?;
        if (v - r).abs() > 1e-10 * r.max(1.0) {
            return Err(Error::Consistency(format!("radial point {y} has j = {v}, expected {r}")));
        }
    }
    Ok(RadialPair { y1, y2 })
}

/// Euclidean balls about `x` bounding `B_j(x, r)` from inside and outside.
pub fn j_ball_bounds(x: &Vector, r: f64) -> Result<(EuclideanBall, EuclideanBall)> {
    let pair = j_sphere_radial_pair(x, r)?;
    Ok((
        EuclideanBall::new(x.clone(), x.dist(&pair.y1))?,
        EuclideanBall::new(x.clone(), x.dist(&pair.y2))?,
    ))
}

/// The largest Euclidean ball inside `B_j(x, r)` in the unit ball: the ball with
/// diameter `[y2, y1]`.
pub fn j_ball_inscribed(x: &Vector, r: f64) -> Result<EuclideanBall> {
    unit_ball_of(x).ensure_contains(x)?;
    check_radius(r)?;
    let absx = x.norm();
    let d = 1.0 - absx;
    if r <= ((1.0 + absx) / d).ln() {
        let u = radial_direction(x);
        EuclideanBall::new(u.scale(1.0 - d * r.cosh()), d * r.sinh())
    } else {
        EuclideanBall::new(x.scale((-r).exp()), -(-r).exp_m1())
    }
}

/// Boundary of `B_j(x, r)` outside `B^2(0, |x|)` in the unit disk, in polar form about
/// the origin: the point at angle `alpha` from `x` has norm `f(alpha)`.
#[derive(Clone, Debug)]
pub struct JSphereProfile {
    pub x: Vector,
    pub r: f64,
    /// Largest angle covered by the profile.
    pub gamma: f64,
    absx: f64,
    /// `(e^r - 1)^2`
    c2: f64,
    /// `e^r (e^r - 2)`, the leading coefficient of the defining quadratic.
    lead: f64,
}

/// Value and first two derivatives of the profile at one angle.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProfileJet {
    pub f: f64,
    pub df: f64,
    pub d2f: f64,
}

pub fn j_sphere_profile(x: &Vector, r: f64) -> Result<JSphereProfile> {
    if x.dim() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, got: x.dim() });
    }
    unit_ball_of(x).ensure_contains(x)?;
    check_radius(r)?;
    let absx = x.norm();
    if absx == 0.0 {
        return Err(Error::Range("the profile needs x != 0".into()));
    }
    let c = r.exp_m1();
    let gamma = if r < ((1.0 + absx) / (1.0 - absx)).ln() {
        2.0 * (c * (1.0 - absx) / (2.0 * absx)).min(1.0).asin()
    } else {
        PI
    };
    Ok(JSphereProfile {
        x: x.clone(),
        r,
        gamma,
        absx,
        c2: c * c,
        lead: c * c - 1.0,
    })
}

impl JSphereProfile {
    fn check_angle(&self, alpha: f64) -> Result<()> {
        if (0.0..=self.gamma).contains(&alpha) {
            Ok(())
        } else {
            Err(Error::Range(format!("angle {alpha} outside [0, {}]", self.gamma)))
        }
    }

    /// Root of `lead s^2 - 2 (c2 - beta) s + (c2 - |x|^2) = 0` below 1 and its
    /// discriminant root, in the rationalized form that stays finite when `lead = 0`.
    fn root(&self, beta: f64) -> (f64, f64) {
        let p = self.c2 - beta;
        let w = (p * p - self.lead * (self.c2 - self.absx * self.absx)).max(0.0).sqrt();
        ((self.c2 - self.absx * self.absx) / (p + w), w)
    }

    pub fn f(&self, alpha: f64) -> Result<f64> {
        self.check_angle(alpha)?;
        Ok(self.root(self.absx * alpha.cos()).0)
    }

    pub fn jet(&self, alpha: f64) -> Result<ProfileJet> {
        self.check_angle(alpha)?;
        let beta = self.absx * alpha.cos();
        let (s, w) = self.root(beta);
        let s_b = s / w;
        let s_bb = (s_b * w + s * (1.0 + self.lead * s_b)) / (w * w);
        let b_a = -self.absx * alpha.sin();
        let b_aa = -beta;
        Ok(ProfileJet {
            f: s,
            df: s_b * b_a,
            d2f: s_bb * b_a * b_a + s_b * b_aa,
        })
    }

    /// Boundary point at angle `alpha`, rotated counterclockwise from the direction of `x`.
    pub fn point(&self, alpha: f64) -> Result<Vector> {
        let s = self.f(alpha)?;
        let (ux, uy) = (self.x[0] / self.absx, self.x[1] / self.absx);
        let (c, sn) = (alpha.cos(), alpha.sin());
        Ok(Vector::xy(s * (c * ux - sn * uy), s * (sn * ux + c * uy)))
    }

    /// Signed polar curvature of the profile at `alpha`.
    pub fn curvature(&self, alpha: f64) -> Result<f64> {
        let j = self.jet(alpha)?;
        Ok(polar_curvature(j.f, j.df, j.d2f))
    }
}

/// Curvature of a polar curve `r(theta)` from `r`, `r'` and `r''`.
pub fn polar_curvature(r: f64, dr: f64, d2r: f64) -> f64 {
    (r * r + 2.0 * dr * dr - r * d2r) / (r * r + dr * dr).powf(1.5)
}

/// Region selector for the curvature of planar `j`-spheres.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum CurvatureCase {
    /// Plane punctured at the origin, part outside `B^2(0, |x|)`.
    PuncturedOuter,
    /// Plane punctured at the origin, part inside `B^2(0, |x|)`.
    PuncturedInner,
    /// Upper half-plane with `x` on the vertical axis, part above `x`.
    HalfPlaneUpper,
    /// Same, part below `x`, at horizontal coordinate `t`.
    HalfPlaneLower { t: f64 },
    /// Unit disk, arc inside `B^2(0, |x|)`.
    DiskInner,
    /// Unit disk, part outside `B^2(0, |x|)` at angle `alpha` from `x`.
    DiskOuter { alpha: f64 },
    /// Any domain, part where `d(y) >= d(x)`.
    FarRegion,
}

/// Analytic curvature of `S_j(x, r)` in the selected region.
pub fn j_sphere_curvature(domain: &Domain, x: &Vector, r: f64, case: CurvatureCase) -> Result<f64> {
    check_radius(r)?;
    domain.ensure_contains(x)?;
    let c = r.exp_m1();
    let mismatch = || Err(Error::Config(format!("curvature case {case:?} does not apply to {domain}")));
    match case {
        CurvatureCase::PuncturedOuter | CurvatureCase::PuncturedInner => {
            let origin_only = matches!(domain, Domain::PuncturedSpace { dim: 2, punctures }
                if punctures.len() == 1 && punctures[0].is_zero());
            if !origin_only {
                return mismatch();
            }
            let absx = x.norm();
            Ok(if case == CurvatureCase::PuncturedOuter {
                1.0 / (absx * c)
            } else {
                r.exp() * (2.0 - r.exp()).abs() / (absx * c)
            })
        }
        CurvatureCase::HalfPlaneUpper | CurvatureCase::HalfPlaneLower { .. } => {
            if *domain != (Domain::HalfSpace { dim: 2 }) || x[0] != 0.0 {
                return mismatch();
            }
            let h = x[1];
            match case {
                CurvatureCase::HalfPlaneLower { t } => {
                    if t.abs() >= h * c {
                        return Err(Error::Range(format!("|t| = {} must be below |x|(e^r-1) = {}", t.abs(), h * c)));
                    }
                    Ok(h * h / (c * (h * h + t * t).powf(1.5)))
                }
                _ => Ok(1.0 / (c * h)),
            }
        }
        CurvatureCase::DiskInner => {
            if *domain != (Domain::UnitBall { dim: 2 }) {
                return mismatch();
            }
            Ok(1.0 / (c * (1.0 - x.norm())))
        }
        CurvatureCase::DiskOuter { alpha } => {
            if *domain != (Domain::UnitBall { dim: 2 }) {
                return mismatch();
            }
            j_sphere_profile(x, r)?.curvature(alpha)
        }
        CurvatureCase::FarRegion => {
            if domain.dim() != 2 {
                return mismatch();
            }
            Ok(1.0 / (c * domain.boundary_distance(x)?))
        }
    }
}

/// A sampled sphere point together with its ray angle.
#[derive(Clone, Debug)]
pub struct SpherePoint {
    pub angle: f64,
    pub point: Vector,
    pub value: f64,
}

#[derive(Clone, Debug)]
pub struct SphereSample {
    /// Boundary points ordered by angle.
    pub points: Vec<SpherePoint>,
    /// Angles whose rays leave the domain before reaching the sphere.
    pub skipped: Vec<f64>,
}

/// Point of `S_m(x, r)` on the ray from `x` in direction `dir`.
pub fn sphere_point_on_ray(
    metric: &Metric,
    x: &Vector,
    dir: &UnitVector,
    r: f64,
    opts: &RayOptions,
) -> Result<RaySolution> {
    solve_radius_along_ray(&metric.domain, |y| metric.distance(x, y), x, dir, r, opts)
}

/// `n` points of the planar sphere `S_kind(x, r)` at equally spaced ray angles about `x`.
pub fn sample_metric_sphere_2d(domain: &Domain, kind: MetricKind, x: &Vector, r: f64, n: usize) -> Result<SphereSample> {
    sample_metric_sphere_2d_with(domain, kind, x, r, n, Execution::default(), &RayOptions::default())
}

pub fn sample_metric_sphere_2d_with(
    domain: &Domain,
    kind: MetricKind,
    x: &Vector,
    r: f64,
    n: usize,
    exec: Execution,
    opts: &RayOptions,
) -> Result<SphereSample> {
    if domain.dim() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, got: domain.dim() });
    }
    if kind == MetricKind::Quasihyperbolic {
        return Err(Error::Config("quasihyperbolic spheres are not sampled".into()));
    }
    if n < 8 {
        return Err(Error::Range(format!("at least 8 samples are required, got {n}")));
    }
    check_radius(r)?;
    let metric = Metric::new(kind, domain.clone())?;
    domain.ensure_contains(x)?;
    let results = exec.map_range(n, |i| {
        let angle = 2.0 * PI * i as f64 / n as f64;
        let sol = sphere_point_on_ray(&metric, x, &UnitVector::from_angle(angle), r, opts);
        (angle, sol)
    });
    let mut points = Vec::with_capacity(n);
    let mut skipped = Vec::new();
    for (angle, sol) in results {
        match sol {
            Ok(s) => points.push(SpherePoint { angle, point: s.point, value: s.value }),
            Err(Error::UnreachableOnRay { .. }) => skipped.push(angle),
            Err(e) => return Err(e),
        }
    }
    if points.is_empty() {
        return Err(Error::EmptyBoundary);
    }
    Ok(SphereSample { points, skipped })
}
