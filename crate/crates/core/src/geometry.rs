//! Euclidean primitives: points, domains with their boundary distance, Euclidean
//! balls, and the monotone ray root-finder used to sample metric spheres.

use std::fmt;
use std::ops::{Add, Index, Mul, Neg, Sub};

use crate::error::{Error, Result};

/// A point (or direction) of `R^n`, `n >= 2`, with finite coordinates.
#[derive(Clone, PartialEq)]
pub struct Vector(Vec<f64>);

impl Vector {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.len() < 2 {
            return Err(Error::InvalidVector(format!(
                "dimension must be at least 2, got {}",
                coords.len()
            )));
        }
        if let Some(c) = coords.iter().find(|c| !c.is_finite()) {
            return Err(Error::InvalidVector(format!("non-finite coordinate {c}")));
        }
        Ok(Vector(coords))
    }

    pub fn from_slice(coords: &[f64]) -> Result<Self> {
        Vector::new(coords.to_vec())
    }

    /// Planar point `(a, b)`.
    pub fn xy(a: f64, b: f64) -> Self {
        Vector(vec![a, b])
    }

    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 2, "dimension must be at least 2");
        Vector(vec![0.0; dim])
    }

    /// The `i`-th standard basis vector (zero based), e.g. `basis(n, 0)` is e1.
    pub fn basis(dim: usize, i: usize) -> Self {
        let mut v = Vector::zeros(dim);
        v.0[i] = 1.0;
        v
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.0
    }

    pub fn dot(&self, other: &Vector) -> f64 {
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }

    pub fn norm_sq(&self) -> f64 {
        self.dot(self)
    }

    pub fn norm(&self) -> f64 {
        // hypot-style scaling keeps tiny and huge coordinates accurate.
        let scale = self.0.iter().fold(0.0_f64, |m, c| m.max(c.abs()));
        if scale == 0.0 {
            return 0.0;
        }
        scale * self.0.iter().map(|c| (c / scale).powi(2)).sum::<f64>().sqrt()
    }

    pub fn dist(&self, other: &Vector) -> f64 {
        (self - other).norm()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0.0)
    }

    pub fn scale(&self, s: f64) -> Vector {
        Vector(self.0.iter().map(|c| c * s).collect())
    }

    /// `self + t * dir`, the workhorse of ray sampling.
    pub fn offset(&self, dir: &Vector, t: f64) -> Vector {
        Vector(self.0.iter().zip(&dir.0).map(|(a, d)| a + t * d).collect())
    }

    /// Direction `self / |self|`, or `fallback` for the zero vector.
    pub fn direction_or(&self, fallback: &Vector) -> Vector {
        let n = self.norm();
        if n == 0.0 {
            fallback.clone()
        } else {
            self.scale(1.0 / n)
        }
    }

    fn check_dim(&self, other: &Vector) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: other.dim(),
            });
        }
        Ok(())
    }
}

impl fmt::Debug for Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Vector{:?}", self.0)
    }
}

impl fmt::Display for Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|c| format!("{c}")).collect();
        write!(f, "({})", parts.join(", "))
    }
}

impl Index<usize> for Vector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl Add for &Vector {
    type Output = Vector;
    fn add(self, rhs: &Vector) -> Vector {
        debug_assert_eq!(self.dim(), rhs.dim());
        Vector(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &Vector {
    type Output = Vector;
    fn sub(self, rhs: &Vector) -> Vector {
        debug_assert_eq!(self.dim(), rhs.dim());
        Vector(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Mul<f64> for &Vector {
    type Output = Vector;
    fn mul(self, s: f64) -> Vector {
        self.scale(s)
    }
}

impl Neg for &Vector {
    type Output = Vector;
    fn neg(self) -> Vector {
        self.scale(-1.0)
    }
}

/// A Euclidean unit vector. The zero vector is rejected at construction.
#[derive(Clone, Debug, PartialEq)]
pub struct UnitVector(Vector);

impl UnitVector {
    pub fn new(v: &Vector) -> Result<Self> {
        let n = v.norm();
        if n == 0.0 {
            return Err(Error::InvalidVector("zero vector has no direction".into()));
        }
        Ok(UnitVector(v.scale(1.0 / n)))
    }

    /// Planar direction at angle `theta` from e1.
    pub fn from_angle(theta: f64) -> Self {
        UnitVector(Vector::xy(theta.cos(), theta.sin()))
    }

    pub fn as_vector(&self) -> &Vector {
        &self.0
    }
}

/// The ambient domain `G` of a metric, supplying the boundary distance `d(x)`.
#[derive(Clone, Debug, PartialEq)]
pub enum Domain {
    UnitBall { dim: usize },
    /// `{x : x_n > 0}` (last coordinate positive).
    HalfSpace { dim: usize },
    PuncturedSpace { dim: usize, punctures: Vec<Vector> },
    /// Strictly convex polygon with counterclockwise vertices.
    ConvexPolygon { vertices: Vec<Vector> },
}

impl Domain {
    pub fn unit_ball(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        Ok(Domain::UnitBall { dim })
    }

    pub fn half_space(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        Ok(Domain::HalfSpace { dim })
    }

    pub fn punctured(punctures: Vec<Vector>) -> Result<Self> {
        let dim = punctures
            .first()
            .map(Vector::dim)
            .ok_or_else(|| Error::InvalidDomain("at least one puncture is required".into()))?;
        if punctures.iter().any(|p| p.dim() != dim) {
            return Err(Error::InvalidDomain("punctures of mixed dimension".into()));
        }
        Ok(Domain::PuncturedSpace { dim, punctures })
    }

    pub fn convex_polygon(vertices: Vec<Vector>) -> Result<Self> {
        if vertices.len() < 3 {
            return Err(Error::InvalidDomain("a polygon needs at least 3 vertices".into()));
        }
        if vertices.iter().any(|v| v.dim() != 2) {
            return Err(Error::InvalidDomain("polygon vertices must be planar".into()));
        }
        let n = vertices.len();
        for i in 0..n {
            let (a, b, c) = (&vertices[i], &vertices[(i + 1) % n], &vertices[(i + 2) % n]);
            if cross(&(b - a), &(c - b)) <= 0.0 {
                return Err(Error::InvalidDomain(
                    "polygon vertices must be strictly convex and counterclockwise".into(),
                ));
            }
        }
        Ok(Domain::ConvexPolygon { vertices })
    }

    /// Axis-aligned rectangle `[x0, x1] x [y0, y1]`.
    pub fn rectangle(x0: f64, y0: f64, x1: f64, y1: f64) -> Result<Self> {
        Domain::convex_polygon(vec![
            Vector::xy(x0, y0),
            Vector::xy(x1, y0),
            Vector::xy(x1, y1),
            Vector::xy(x0, y1),
        ])
    }

    pub fn dim(&self) -> usize {
        match self {
            Domain::UnitBall { dim } | Domain::HalfSpace { dim } => *dim,
            Domain::PuncturedSpace { dim, .. } => *dim,
            Domain::ConvexPolygon { .. } => 2,
        }
    }

    pub fn is_unit_ball(&self) -> bool {
        matches!(self, Domain::UnitBall { .. })
    }

    pub fn contains(&self, x: &Vector) -> bool {
        if x.dim() != self.dim() {
            return false;
        }
        match self {
            Domain::UnitBall { .. } => x.norm() < 1.0,
            Domain::HalfSpace { dim } => x[dim - 1] > 0.0,
            Domain::PuncturedSpace { punctures, .. } => punctures.iter().all(|p| p != x),
            Domain::ConvexPolygon { vertices } => {
                let n = vertices.len();
                (0..n).all(|i| {
                    let (a, b) = (&vertices[i], &vertices[(i + 1) % n]);
                    cross(&(b - a), &(x - a)) > 0.0
                })
            }
        }
    }

    pub fn ensure_contains(&self, x: &Vector) -> Result<()> {
        if x.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: x.dim(),
            });
        }
        if !self.contains(x) {
            return Err(Error::NotInDomain {
                point: x.to_string(),
                domain: self.to_string(),
            });
        }
        Ok(())
    }

    /// Euclidean distance from `x` to the boundary of the domain.
    pub fn boundary_distance(&self, x: &Vector) -> Result<f64> {
        self.ensure_contains(x)?;
        Ok(self.boundary_distance_unchecked(x))
    }

    pub(crate) fn boundary_distance_unchecked(&self, x: &Vector) -> f64 {
        match self {
            Domain::UnitBall { .. } => 1.0 - x.norm(),
            Domain::HalfSpace { dim } => x[dim - 1],
            Domain::PuncturedSpace { punctures, .. } => punctures
                .iter()
                .map(|p| p.dist(x))
                .fold(f64::INFINITY, f64::min),
            Domain::ConvexPolygon { vertices } => {
                let n = vertices.len();
                (0..n)
                    .map(|i| segment_distance(x, &vertices[i], &vertices[(i + 1) % n]))
                    .fold(f64::INFINITY, f64::min)
            }
        }
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Domain::UnitBall { dim } => write!(f, "unit-ball({dim})"),
            Domain::HalfSpace { dim } => write!(f, "half-space({dim})"),
            Domain::PuncturedSpace { punctures, .. } => {
                let p: Vec<String> = punctures.iter().map(|p| p.to_string()).collect();
                write!(f, "punctured[{}]", p.join(";"))
            }
            Domain::ConvexPolygon { vertices } => {
                let p: Vec<String> = vertices.iter().map(|p| p.to_string()).collect();
                write!(f, "polygon[{}]", p.join(";"))
            }
        }
    }
}

fn check_dim(dim: usize) -> Result<()> {
    if dim < 2 {
        return Err(Error::InvalidDomain(format!("dimension must be at least 2, got {dim}")));
    }
    Ok(())
}

fn cross(a: &Vector, b: &Vector) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

/// Distance from `p` to the segment `[a, b]`.
pub fn segment_distance(p: &Vector, a: &Vector, b: &Vector) -> f64 {
    let ab = b - a;
    let len_sq = ab.norm_sq();
    if len_sq == 0.0 {
        return p.dist(a);
    }
    let t = ((p - a).dot(&ab) / len_sq).clamp(0.0, 1.0);
    p.dist(&a.offset(&ab, t))
}

/// Open Euclidean ball `B^n(center, radius)`.
#[derive(Clone, Debug, PartialEq)]
pub struct EuclideanBall {
    pub center: Vector,
    pub radius: f64,
}

impl EuclideanBall {
    pub fn new(center: Vector, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::Range(format!("ball radius must be positive, got {radius}")));
        }
        Ok(EuclideanBall { center, radius })
    }

    pub fn contains(&self, y: &Vector) -> bool {
        self.center.dist(y) < self.radius
    }
}

/// `true` iff `inner` lies in `outer`: `|c_o - c_i| + r_i <= r_o`.
pub fn ball_contains_ball(outer: &EuclideanBall, inner: &EuclideanBall) -> bool {
    outer.center.dist(&inner.center) + inner.radius <= outer.radius
}

#[derive(Clone, Debug)]
pub struct RayOptions {
    /// Accepted deviation of the field value from the target.
    pub tol: f64,
    /// Geometric growth factor of the bracket.
    pub growth: f64,
    /// Samples of the coarse monotonicity check.
    pub coarse_grid: usize,
    /// Samples of the fallback scan used when the coarse check fails.
    pub fine_grid: usize,
    pub max_growth_steps: usize,
}

impl Default for RayOptions {
    fn default() -> Self {
        RayOptions {
            tol: 1e-12,
            growth: 2.0,
            coarse_grid: 16,
            fine_grid: 1024,
            max_growth_steps: 200,
        }
    }
}

#[derive(Clone, Debug)]
pub struct RaySolution {
    pub point: Vector,
    /// Ray parameter of `point`.
    pub t: f64,
    /// Final bracket `(lo, hi)` with `f(lo) < target <= f(hi)`.
    pub bracket: (f64, f64),
    /// Field value at `point`.
    pub value: f64,
    /// `false` when the coarse check saw a decreasing sample and the fine scan was used.
    pub monotone: bool,
}

/// Finds `y = x + t dir` with `f(y) = target` for a field with `f(x) = 0` that grows along the ray.
///
/// The bracket grows geometrically from half the boundary distance of `x`. When the ray
/// leaves the domain first, the exit point is located by bisection on membership and the
/// target is reported unreachable if the field stays below it up to the exit.
pub fn solve_radius_along_ray<F>(
    domain: &Domain,
    f: F,
    x: &Vector,
    dir: &UnitVector,
    target: f64,
    opts: &RayOptions,
) -> Result<RaySolution>
where
    F: Fn(&Vector) -> Result<f64>,
{
    domain.ensure_contains(x)?;
    x.check_dim(dir.as_vector())?;
    if !(target > 0.0 && target.is_finite()) {
        return Err(Error::Range(format!("target must be positive, got {target}")));
    }
    if !(opts.tol > 0.0 && opts.growth > 1.0) {
        return Err(Error::Range("ray tolerance must be positive and growth > 1".into()));
    }
    let dir = dir.as_vector();
    let at = |t: f64| x.offset(dir, t);

    let mut lo = 0.0;
    let mut hi = 0.5 * domain.boundary_distance_unchecked(x);
    let mut hi_value = None;
    for _ in 0..opts.max_growth_steps {
        let p = at(hi);
        if !domain.contains(&p) {
            let t_in = last_inside(domain, &at, lo, hi);
            let v = f(&at(t_in))?;
            if v >= target {
                hi = t_in;
                hi_value = Some(v);
                break;
            }
            return Err(Error::UnreachableOnRay { target, sup: v });
        }
        let v = f(&p)?;
        if v >= target {
            hi_value = Some(v);
            break;
        }
        lo = hi;
        hi *= opts.growth;
    }
    if hi_value.is_none() {
        return Err(Error::UnreachableOnRay {
            target,
            sup: f(&at(hi))?,
        });
    }

    // Coarse monotonicity check over [0, hi]; it also tightens the bracket.
    let mut monotone = true;
    let grid = opts.coarse_grid.max(2);
    let mut prev: f64 = 0.0;
    let mut first_cross = None;
    for k in 1..=grid {
        let t = hi * k as f64 / grid as f64;
        let v = if k == grid { hi_value.unwrap() } else { f(&at(t))? };
        if v < prev - 1e-12 * prev.abs().max(1.0) {
            monotone = false;
            break;
        }
        if first_cross.is_none() && v >= target {
            first_cross = Some(k);
        }
        prev = v;
    }
    let (mut lo, mut hi) = if monotone {
        let k = first_cross.unwrap_or(grid);
        (hi * (k - 1) as f64 / grid as f64, hi * k as f64 / grid as f64)
    } else {
        let fine = opts.fine_grid.max(grid);
        let mut cell = (lo, hi);
        for k in 1..=fine {
            let t = hi * k as f64 / fine as f64;
            if f(&at(t))? >= target {
                cell = (hi * (k - 1) as f64 / fine as f64, t);
                break;
            }
        }
        cell
    };

    let mut best = (hi, f(&at(hi))?);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let v = f(&at(mid))?;
        if (v - target).abs() < (best.1 - target).abs() {
            best = (mid, v);
        }
        if (v - target).abs() <= opts.tol {
            break;
        }
        if v < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    // Keep the reported bracket straddling the target even if `best` sits on its edge.
    if best.1 < target {
        lo = lo.max(best.0).min(hi);
    } else {
        hi = hi.min(best.0).max(lo);
    }
    Ok(RaySolution {
        point: at(best.0),
        t: best.0,
        bracket: (lo, hi),
        value: best.1,
        monotone,
    })
}

/// Largest ray parameter in `[inside, outside]` still inside the domain, to machine precision.
fn last_inside(domain: &Domain, at: &impl Fn(f64) -> Vector, mut inside: f64, mut outside: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (inside + outside);
        if mid <= inside || mid >= outside {
            break;
        }
        if domain.contains(&at(mid)) {
            inside = mid;
        } else {
            outside = mid;
        }
    }
    inside
}
