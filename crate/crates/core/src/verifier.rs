//! Sampling oracles for ball inclusions, sharpness, small-radius limits and curvature.
//!
//! An inclusion `B_A(x, a) ⊂ B_B(x, b)` is checked by sampling the sphere `S_A(x, a)`
//! along rays from `x` and evaluating `B` there. Quasihyperbolic spheres are never
//! sampled: when `A = k` the outer sphere `S_B(x, b)` is sampled instead and every point
//! on it must satisfy `k >= a`, which is equivalent because `k`-balls are path-connected.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::ball_geometry::{j_ball_inscribed, j_sphere_radial_pair, polar_curvature, q_ball_inside_threshold};
use crate::error::{Error, Result};
use crate::geometry::{solve_radius_along_ray, Domain, EuclideanBall, RayOptions, UnitVector, Vector};
use crate::metrics::{j_metric, Metric, MetricKind};
use crate::parallel::Execution;
use crate::radii::{radii_for, uniform_m1, ClaimId, InclusionBound};

/// Inclusion tolerance for closed-form metrics.
pub const INCLUSION_TOL: f64 = 1e-9;
/// Largest gap still counted as touching.
pub const SHARPNESS_TOL: f64 = 1e-3;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    /// Failures count against the run.
    Assert,
    /// Failures are reported only.
    Report,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Assert => "assert",
            Mode::Report => "report",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Holds,
    Violated,
    OutOfValidity,
    SkippedRays,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Holds => "holds",
            Status::Violated => "violated",
            Status::OutOfValidity => "out-of-validity",
            Status::SkippedRays => "skipped-rays",
        })
    }
}

/// A metric ball `B_kind(x, radius)` about the record's center.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BallSpec {
    pub kind: MetricKind,
    pub radius: f64,
}

impl BallSpec {
    pub fn new(kind: MetricKind, radius: f64) -> Self {
        BallSpec { kind, radius }
    }
}

/// A point that lies in the inner ball but not in the outer one.
#[derive(Clone, Debug, PartialEq)]
pub struct Witness {
    pub point: Vector,
    pub inner_value: f64,
    pub outer_value: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Sharpness {
    /// Smallest distance between the two spheres in metric units, after refinement.
    pub gap: f64,
    pub sharp: bool,
    /// Whether the claim states sharpness at this point.
    pub expected: bool,
    pub mode: Mode,
    /// Ray angle of the closest approach (planar runs only).
    pub angle: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct InclusionRecord {
    pub claim: String,
    /// `m` for the inner inclusion, `M` for the outer one, `-` for ad hoc checks.
    pub side: String,
    pub absx: f64,
    pub r: f64,
    pub center: Vector,
    pub inner: BallSpec,
    pub outer: BallSpec,
    pub status: Status,
    pub mode: Mode,
    /// Worst `outer radius - outer value` (or `k - inner radius` for `k` inner balls).
    pub margin: f64,
    pub witness: Option<Witness>,
    pub sharpness: Option<Sharpness>,
    pub samples: usize,
    pub skipped: usize,
    pub seed: u64,
    pub note: Option<String>,
    pub wall_time: Option<Duration>,
}

impl InclusionRecord {
    fn out_of_validity(label: &Label, inner: BallSpec, outer: BallSpec, mode: Mode, seed: u64, note: String) -> Self {
        InclusionRecord {
            claim: label.claim.clone(),
            side: label.side.clone(),
            absx: label.absx,
            r: label.r,
            center: label.center.clone(),
            inner,
            outer,
            status: Status::OutOfValidity,
            mode,
            margin: f64::NAN,
            witness: None,
            sharpness: None,
            samples: 0,
            skipped: 0,
            seed,
            note: Some(note),
            wall_time: None,
        }
    }

    /// Whether this record counts as a failure under the given strictness.
    pub fn is_failure(&self, strict: bool) -> bool {
        let counts = |mode: Mode| strict || mode == Mode::Assert;
        let inclusion = self.status == Status::Violated && counts(self.mode);
        let sharp = self
            .sharpness
            .as_ref()
            .is_some_and(|s| s.expected && !s.sharp && counts(s.mode));
        inclusion || sharp
    }

    /// One `key=value` line.
    pub fn to_line(&self, timing: bool) -> String {
        let mut out = format!(
            "claim={} side={} absx={} r={} inner={}:{} outer={}:{} status={} mode={} margin={} samples={} skipped={} seed={}",
            self.claim,
            self.side,
            fmt_num(self.absx),
            fmt_num(self.r),
            self.inner.kind,
            fmt_num(self.inner.radius),
            self.outer.kind,
            fmt_num(self.outer.radius),
            self.status,
            self.mode,
            fmt_num(self.margin),
            self.samples,
            self.skipped,
            self.seed
        );
        if let Some(s) = &self.sharpness {
            out.push_str(&format!(
                " gap={} sharp={} expected_sharp={} sharp_mode={}",
                fmt_num(s.gap),
                s.sharp,
                s.expected,
                s.mode
            ));
        }
        if let Some(w) = &self.witness {
            out.push_str(&format!(
                " witness={} witness_inner={} witness_outer={}",
                fmt_point(&w.point),
                fmt_num(w.inner_value),
                fmt_num(w.outer_value)
            ));
        }
        if let Some(n) = &self.note {
            out.push_str(&format!(" note=\"{n}\""));
        }
        if timing {
            if let Some(t) = self.wall_time {
                out.push_str(&format!(" wall_ms={:.3}", t.as_secs_f64() * 1e3));
            }
        }
        out
    }
}

/// Rounds to 15 significant digits and prints the shortest representation.
pub fn fmt_num(v: f64) -> String {
    if !v.is_finite() {
        return format!("{v}");
    }
    let rounded: f64 = format!("{v:.14e}").parse().unwrap_or(v);
    let a = rounded.abs();
    if a != 0.0 && !(1e-4..1e15).contains(&a) {
        format!("{rounded:e}")
    } else {
        format!("{rounded}")
    }
}

pub fn fmt_point(p: &Vector) -> String {
    p.coords().iter().map(|c| fmt_num(*c)).collect::<Vec<_>>().join(",")
}

/// Sampling parameters shared by the checks.
#[derive(Clone, Debug)]
pub struct SampleOptions {
    /// Number of rays.
    pub n: usize,
    /// Seed of the random directions used in dimension three and up.
    pub seed: u64,
    pub ray: RayOptions,
    /// Tolerance handed to the quasihyperbolic solver.
    pub qh_tol: f64,
    pub exec: Execution,
}

impl Default for SampleOptions {
    fn default() -> Self {
        SampleOptions {
            n: 10_000,
            seed: 0,
            ray: RayOptions::default(),
            qh_tol: Metric::DEFAULT_QH_TOL,
            exec: Execution::default(),
        }
    }
}

impl SampleOptions {
    /// Inclusion tolerance: fixed for closed-form metrics, scaled with the solver for `k`.
    pub fn inclusion_tol(&self, inner: MetricKind, outer: MetricKind) -> f64 {
        if inner == MetricKind::Quasihyperbolic || outer == MetricKind::Quasihyperbolic {
            INCLUSION_TOL.max(10.0 * self.qh_tol)
        } else {
            INCLUSION_TOL
        }
    }
}

struct Label {
    claim: String,
    side: String,
    absx: f64,
    r: f64,
    center: Vector,
}

/// Outcome of one ray.
#[derive(Clone, Debug)]
enum Probe {
    Point {
        point: Vector,
        /// Ray parameter of `point`.
        t: f64,
        inner_value: f64,
        outer_value: f64,
        margin: f64,
    },
    Skipped,
}

impl Probe {
    fn margin(&self) -> f64 {
        match self {
            Probe::Point { margin, .. } => *margin,
            Probe::Skipped => f64::INFINITY,
        }
    }
}

struct Setup<'a> {
    x: &'a Vector,
    inner: Metric,
    outer: Metric,
    a: f64,
    b: f64,
    ray: &'a RayOptions,
}

impl Setup<'_> {
    /// The inner ball is a quasihyperbolic one, handled through the outer sphere.
    fn complement(&self) -> bool {
        self.inner.kind == MetricKind::Quasihyperbolic
    }

    fn probe(&self, dir: &UnitVector) -> Result<Probe> {
        let domain = &self.inner.domain;
        if self.complement() {
            let f = |y: &Vector| self.outer.distance(self.x, y);
            return match solve_radius_along_ray(domain, f, self.x, dir, self.b, self.ray) {
                Ok(sol) => {
                    let k = self.inner.distance(self.x, &sol.point)?;
                    Ok(Probe::Point {
                        point: sol.point,
                        t: sol.t,
                        inner_value: k,
                        outer_value: sol.value,
                        margin: k - self.a,
                    })
                }
                Err(Error::UnreachableOnRay { .. }) => Ok(Probe::Skipped),
                Err(e) => Err(e),
            };
        }
        let f = |y: &Vector| self.inner.distance(self.x, y);
        match solve_radius_along_ray(domain, f, self.x, dir, self.a, self.ray) {
            Ok(sol) => {
                let v = self.outer.distance(self.x, &sol.point)?;
                Ok(Probe::Point {
                    point: sol.point,
                    t: sol.t,
                    inner_value: sol.value,
                    outer_value: v,
                    margin: self.b - v,
                })
            }
            // The inner ball reaches the boundary of the domain along this ray, so it
            // cannot lie in a ball of a metric of the domain; probe just before the exit.
            Err(Error::UnreachableOnRay { .. }) => match exit_parameter(domain, self.x, dir) {
                Some(t_exit) => {
                    let t = t_exit * (1.0 - 1e-9);
                    let point = self.x.offset(dir.as_vector(), t);
                    let inner_value = f(&point)?;
                    let outer_value = self.outer.distance(self.x, &point)?;
                    Ok(Probe::Point {
                        point,
                        t,
                        inner_value,
                        outer_value,
                        margin: self.b - outer_value,
                    })
                }
                None => Ok(Probe::Skipped),
            },
            Err(e) => Err(e),
        }
    }

    /// A point strictly inside the inner ball and strictly outside the outer one.
    fn witness(&self, dir: &UnitVector, probe: &Probe) -> Result<Witness> {
        let Probe::Point {
            point,
            t,
            inner_value,
            outer_value,
            ..
        } = probe
        else {
            unreachable!("witnesses come from sampled points");
        };
        let at = |s: f64| self.x.offset(dir.as_vector(), s);
        // Nudge along the ray until both strict inequalities hold.
        let sign = if self.complement() { 1.0 } else { -1.0 };
        let mut step = 1e-9;
        for _ in 0..30 {
            let p = at(t * (1.0 + sign * step));
            if self.inner.domain.contains(&p) {
                let iv = self.inner.distance(self.x, &p)?;
                let ov = self.outer.distance(self.x, &p)?;
                if iv < self.a && ov > self.b {
                    return Ok(Witness {
                        point: p,
                        inner_value: iv,
                        outer_value: ov,
                    });
                }
            }
            step *= 4.0;
        }
        Ok(Witness {
            point: point.clone(),
            inner_value: *inner_value,
            outer_value: *outer_value,
        })
    }
}

/// Largest `t` with `x + t dir` in the domain, if the ray leaves it at all.
fn exit_parameter(domain: &Domain, x: &Vector, dir: &UnitVector) -> Option<f64> {
    let at = |t: f64| x.offset(dir.as_vector(), t);
    let mut lo = 0.0;
    let mut hi = domain.boundary_distance_unchecked(x).max(1e-300);
    let mut steps = 0;
    while domain.contains(&at(hi)) {
        lo = hi;
        hi *= 2.0;
        steps += 1;
        if steps > 80 {
            return None;
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if domain.contains(&at(mid)) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(lo)
}

/// `n` ray directions: equally spaced angles in the plane, seeded Gaussian directions
/// otherwise.
pub fn directions(dim: usize, n: usize, seed: u64) -> Result<Vec<(Option<f64>, UnitVector)>> {
    if n == 0 {
        return Err(Error::Range("at least one direction is required".into()));
    }
    if dim == 2 {
        return Ok((0..n)
            .map(|i| {
                let angle = 2.0 * PI * i as f64 / n as f64;
                (Some(angle), UnitVector::from_angle(angle))
            })
            .collect());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let coords: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(&mut rng)).collect();
        let v = Vector::new(coords)?;
        if v.norm() > 1e-12 {
            out.push((None, UnitVector::new(&v)?));
        }
    }
    Ok(out)
}

struct Pass {
    status: Status,
    margin: f64,
    witness: Option<Witness>,
    samples: usize,
    skipped: usize,
    sharpness: Option<(f64, Option<f64>)>,
}

fn run_pass(domain: &Domain, x: &Vector, inner: BallSpec, outer: BallSpec, opts: &SampleOptions, refine: bool) -> Result<Pass> {
    for spec in [inner, outer] {
        if !(spec.radius > 0.0 && spec.radius.is_finite()) {
            return Err(Error::Range(format!("ball radius must be positive and finite, got {}", spec.radius)));
        }
    }
    if inner.kind == MetricKind::Quasihyperbolic && outer.kind == MetricKind::Quasihyperbolic {
        return Err(Error::Config("at least one of the two balls must be sampleable".into()));
    }
    domain.ensure_contains(x)?;
    let setup = Setup {
        x,
        inner: Metric::new(inner.kind, domain.clone())?.with_qh_tol(opts.qh_tol),
        outer: Metric::new(outer.kind, domain.clone())?.with_qh_tol(opts.qh_tol),
        a: inner.radius,
        b: outer.radius,
        ray: &opts.ray,
    };
    let dirs = directions(domain.dim(), opts.n, opts.seed)?;
    let probes = opts.exec.map(&dirs, |(_, d)| setup.probe(d));
    let mut worst: Option<(usize, Probe)> = None;
    let mut skipped = 0;
    for (i, p) in probes.into_iter().enumerate() {
        let p = p?;
        if matches!(p, Probe::Skipped) {
            skipped += 1;
            continue;
        }
        if worst.as_ref().is_none_or(|(_, w)| p.margin() < w.margin()) {
            worst = Some((i, p));
        }
    }
    let Some((wi, mut wp)) = worst else {
        return Ok(Pass {
            status: Status::SkippedRays,
            margin: f64::NAN,
            witness: None,
            samples: 0,
            skipped,
            sharpness: None,
        });
    };
    let mut worst_dir = dirs[wi].1.clone();
    let mut min_angle = dirs[wi].0;

    let mut sharpness = None;
    if refine {
        if let Some(theta) = dirs[wi].0 {
            let h = 2.0 * PI / opts.n as f64;
            let (angle, probe) = refine_angle(&setup, theta - h, theta + h)?;
            if probe.margin() < wp.margin() {
                wp = probe;
                worst_dir = UnitVector::from_angle(angle);
                min_angle = Some(angle);
            }
        }
        sharpness = Some((wp.margin(), min_angle));
    }
    let margin = wp.margin();
    let tol = opts.inclusion_tol(inner.kind, outer.kind);
    let (status, witness) = if margin < -tol {
        (Status::Violated, Some(setup.witness(&worst_dir, &wp)?))
    } else {
        (Status::Holds, None)
    };
    Ok(Pass {
        status,
        margin,
        witness,
        samples: opts.n - skipped,
        skipped,
        sharpness,
    })
}

/// Golden-section search for the smallest margin over ray angles in `[lo, hi]`.
fn refine_angle(setup: &Setup<'_>, mut lo: f64, mut hi: f64) -> Result<(f64, Probe)> {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let eval = |t: f64| setup.probe(&UnitVector::from_angle(t));
    let mut c = hi - g * (hi - lo);
    let mut d = lo + g * (hi - lo);
    let mut pc = eval(c)?;
    let mut pd = eval(d)?;
    for _ in 0..60 {
        if pc.margin() < pd.margin() {
            hi = d;
            d = c;
            pd = pc;
            c = hi - g * (hi - lo);
            pc = eval(c)?;
        } else {
            lo = c;
            c = d;
            pc = pd;
            d = lo + g * (hi - lo);
            pd = eval(d)?;
        }
    }
    Ok(if pc.margin() < pd.margin() { (c, pc) } else { (d, pd) })
}

fn record_from(label: &Label, inner: BallSpec, outer: BallSpec, mode: Mode, opts: &SampleOptions, pass: Pass) -> InclusionRecord {
    InclusionRecord {
        claim: label.claim.clone(),
        side: label.side.clone(),
        absx: label.absx,
        r: label.r,
        center: label.center.clone(),
        inner,
        outer,
        status: pass.status,
        mode,
        margin: pass.margin,
        witness: pass.witness,
        sharpness: None,
        samples: pass.samples,
        skipped: pass.skipped,
        seed: opts.seed,
        note: None,
        wall_time: None,
    }
}

fn adhoc_label(x: &Vector) -> Label {
    Label {
        claim: "adhoc".into(),
        side: "-".into(),
        absx: x.norm(),
        r: f64::NAN,
        center: x.clone(),
    }
}

/// Checks `B_inner ⊂ B_outer` about `x` on `opts.n` rays.
///
/// The record holds iff every sampled margin is at least `-tol`; a violated record
/// carries a witness inside the inner ball and outside the outer one.
pub fn verify_inclusion(domain: &Domain, x: &Vector, inner: BallSpec, outer: BallSpec, opts: &SampleOptions) -> Result<InclusionRecord> {
    let start = Instant::now();
    let pass = run_pass(domain, x, inner, outer, opts, false)?;
    let mut rec = record_from(&adhoc_label(x), inner, outer, Mode::Assert, opts, pass);
    rec.wall_time = Some(start.elapsed());
    Ok(rec)
}

/// Like [`verify_inclusion`], and additionally measures how closely the two spheres touch.
///
/// In the plane the angle of the smallest sampled margin is refined by golden-section
/// search over the two neighbouring sample intervals.
pub fn verify_sharpness(domain: &Domain, x: &Vector, inner: BallSpec, outer: BallSpec, opts: &SampleOptions) -> Result<InclusionRecord> {
    let start = Instant::now();
    let pass = run_pass(domain, x, inner, outer, opts, true)?;
    let (gap, angle) = pass.sharpness.unwrap_or((f64::NAN, None));
    let holds = pass.status == Status::Holds;
    let mut rec = record_from(&adhoc_label(x), inner, outer, Mode::Assert, opts, pass);
    rec.sharpness = Some(Sharpness {
        gap,
        sharp: holds && gap <= SHARPNESS_TOL,
        expected: true,
        mode: Mode::Assert,
        angle,
    });
    rec.wall_time = Some(start.elapsed());
    Ok(rec)
}

/// Grid of radii for a claim.
#[derive(Clone, Debug, PartialEq)]
pub enum RadiusGrid {
    Absolute(Vec<f64>),
    /// Fractions of the claim's upper radius limit at each `|x|`.
    Relative(Vec<f64>),
}

/// One claim together with its sampling grid.
#[derive(Clone, Debug)]
pub struct ClaimSpec {
    pub claim: ClaimId,
    pub absx: Vec<f64>,
    pub radii: RadiusGrid,
    pub n: usize,
    pub seed: u64,
    pub mode: Mode,
    pub sharpness_mode: Mode,
}

pub const STANDARD_ABSX: [f64; 5] = [0.0, 0.2, 0.4, 0.6, 0.8];
const FRACTIONS: [f64; 4] = [0.2, 0.4, 0.6, 0.8];

/// Largest radius for which the claim's statement applies, if it is limited.
pub fn radius_limit(claim: ClaimId, absx: f64) -> Option<f64> {
    match claim {
        c if c.needs_chordal_threshold() => Some(q_ball_inside_threshold(absx)),
        // Keeps the outer chordal ball inside the unit ball.
        ClaimId::QJQ => Some((2.0 * (1.0 + absx) / (1.0 + 2.0 * absx - absx * absx)).ln()),
        _ => None,
    }
}

impl ClaimSpec {
    /// The standard grid: `|x|` in `{0, 0.2, 0.4, 0.6, 0.8}` and four radii per `|x|`.
    ///
    /// Quasihyperbolic claims use fewer rays since every sample needs a `k` evaluation.
    pub fn standard(claim: ClaimId) -> Self {
        let radii = match claim {
            c if radius_limit(c, 0.0).is_some() => RadiusGrid::Relative(FRACTIONS.to_vec()),
            ClaimId::UniformRho | ClaimId::UniformK => RadiusGrid::Absolute(vec![0.5, 1.0, 2.0, 3.0]),
            _ => RadiusGrid::Absolute(vec![0.25, 0.5, 1.0, 2.0]),
        };
        let uses_k = claim.bracket_metric() == MetricKind::Quasihyperbolic
            || claim.middle_metric() == MetricKind::Quasihyperbolic;
        ClaimSpec {
            claim,
            absx: STANDARD_ABSX.to_vec(),
            radii,
            n: if uses_k { 256 } else { 10_000 },
            seed: 0,
            mode: if claim.is_uniform() { Mode::Report } else { Mode::Assert },
            sharpness_mode: if claim.sharp() && claim != ClaimId::QJQ {
                Mode::Assert
            } else {
                Mode::Report
            },
        }
    }

    /// Promotes every check to [`Mode::Assert`].
    pub fn strict(mut self) -> Self {
        self.mode = Mode::Assert;
        self.sharpness_mode = Mode::Assert;
        self
    }

    /// The `(|x|, r)` pairs in canonical order.
    pub fn grid(&self) -> Vec<(f64, f64)> {
        let mut out = Vec::new();
        for &absx in &self.absx {
            match &self.radii {
                RadiusGrid::Absolute(rs) => out.extend(rs.iter().map(|&r| (absx, r))),
                RadiusGrid::Relative(fs) => {
                    let limit = radius_limit(self.claim, absx).unwrap_or(1.0);
                    out.extend(fs.iter().map(|&f| (absx, f * limit)));
                }
            }
        }
        out
    }
}

/// The two inclusions of a claim at a bound: `B_A(m) ⊂ B_B(r)` and `B_B(r) ⊂ B_A(M)`.
fn sides(bound: &InclusionBound) -> Vec<(&'static str, BallSpec, BallSpec)> {
    let a = bound.claim.bracket_metric();
    let b = bound.claim.middle_metric();
    let mut out = vec![("m", BallSpec::new(a, bound.m), BallSpec::new(b, bound.r))];
    if bound.big_m.is_finite() || !bound.claim.is_uniform() {
        out.push(("M", BallSpec::new(b, bound.r), BallSpec::new(a, bound.big_m)));
    }
    out
}

/// Runs one claim at one `(|x|, r)` in the unit disk with `x = |x| e1`.
pub fn check_claim_point(spec: &ClaimSpec, absx: f64, r: f64, opts: &SampleOptions) -> Result<Vec<InclusionRecord>> {
    let x = Vector::xy(absx, 0.0);
    let domain = Domain::unit_ball(2)?;
    let a = spec.claim.bracket_metric();
    let b = spec.claim.middle_metric();
    let label = |side: &str| Label {
        claim: spec.claim.name().into(),
        side: side.into(),
        absx,
        r,
        center: x.clone(),
    };
    let bound = match radii_for(spec.claim, absx, r) {
        Ok(bound) => bound,
        Err(Error::Validity(msg)) => {
            let names: &[&str] = if spec.claim.is_uniform() { &["m"] } else { &["m", "M"] };
            return Ok(names
                .iter()
                .map(|s| {
                    let (i, o) = if *s == "m" {
                        (BallSpec::new(a, f64::NAN), BallSpec::new(b, r))
                    } else {
                        (BallSpec::new(b, r), BallSpec::new(a, f64::NAN))
                    };
                    InclusionRecord::out_of_validity(&label(s), i, o, spec.mode, spec.seed, msg.clone())
                })
                .collect());
        }
        Err(e) => return Err(e),
    };
    let opts = SampleOptions {
        n: spec.n,
        seed: spec.seed,
        ..opts.clone()
    };
    let mut records = Vec::new();
    for (side, inner, outer) in sides(&bound) {
        let start = Instant::now();
        if !(inner.radius.is_finite() && outer.radius.is_finite()) {
            records.push(InclusionRecord::out_of_validity(
                &label(side),
                inner,
                outer,
                spec.mode,
                spec.seed,
                "radius undefined for this (|x|, r)".into(),
            ));
            continue;
        }
        let pass = run_pass(&domain, &x, inner, outer, &opts, true)?;
        let (gap, angle) = pass.sharpness.unwrap_or((f64::NAN, None));
        let holds = pass.status == Status::Holds;
        let mut rec = record_from(&label(side), inner, outer, spec.mode, &opts, pass);
        rec.sharpness = Some(Sharpness {
            gap,
            sharp: holds && gap <= SHARPNESS_TOL,
            expected: bound.sharp,
            mode: spec.sharpness_mode,
            angle,
        });
        rec.wall_time = Some(start.elapsed());
        records.push(rec);
    }
    Ok(records)
}

/// Runs a claim over its grid; grid points run through `opts.exec`, in canonical order.
pub fn run_claim(spec: &ClaimSpec, opts: &SampleOptions) -> Result<Vec<InclusionRecord>> {
    let grid = spec.grid();
    let inner = SampleOptions {
        exec: Execution::Sequential,
        ..opts.clone()
    };
    let results = opts.exec.map(&grid, |&(absx, r)| check_claim_point(spec, absx, r, &inner));
    let mut out = Vec::new();
    for res in results {
        out.extend(res?);
    }
    Ok(out)
}

/// Records of a verification run plus the aggregate summary.
#[derive(Clone, Debug, Default)]
pub struct VerificationReport {
    pub records: Vec<InclusionRecord>,
    pub strict: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Summary {
    pub records: usize,
    pub holds: usize,
    pub violated: usize,
    pub out_of_validity: usize,
    pub skipped: usize,
    pub sharp_expected: usize,
    pub sharp_confirmed: usize,
    pub failures: usize,
}

impl VerificationReport {
    pub fn run(specs: &[ClaimSpec], opts: &SampleOptions, strict: bool) -> Result<Self> {
        let mut records = Vec::new();
        for spec in specs {
            let spec = if strict { spec.clone().strict() } else { spec.clone() };
            records.extend(run_claim(&spec, opts)?);
        }
        Ok(VerificationReport { records, strict })
    }

    pub fn summary(&self) -> Summary {
        let mut s = Summary {
            records: self.records.len(),
            ..Summary::default()
        };
        for r in &self.records {
            match r.status {
                Status::Holds => s.holds += 1,
                Status::Violated => s.violated += 1,
                Status::OutOfValidity => s.out_of_validity += 1,
                Status::SkippedRays => s.skipped += 1,
            }
            if let Some(sh) = &r.sharpness {
                if sh.expected {
                    s.sharp_expected += 1;
                    s.sharp_confirmed += sh.sharp as usize;
                }
            }
            s.failures += r.is_failure(self.strict) as usize;
        }
        s
    }

    /// Whether any record fails under the run's strictness.
    pub fn has_failures(&self) -> bool {
        self.records.iter().any(|r| r.is_failure(self.strict))
    }

    /// Serialized report: one line per record, then the summary line.
    pub fn to_text(&self, timing: bool) -> String {
        let mut out = String::new();
        for r in &self.records {
            out.push_str(&r.to_line(timing));
            out.push('\n');
        }
        let s = self.summary();
        out.push_str(&format!(
            "summary records={} holds={} violated={} out_of_validity={} skipped_rays={} sharp_expected={} sharp_confirmed={} failures={} strict={}\n",
            s.records, s.holds, s.violated, s.out_of_validity, s.skipped, s.sharp_expected, s.sharp_confirmed, s.failures, self.strict
        ));
        out
    }
}

/// Ratios `M/m` along a decreasing sequence of radii.
#[derive(Clone, Debug, PartialEq)]
pub struct RatioProbe {
    pub claim: ClaimId,
    pub absx: f64,
    pub ratios: Vec<(f64, f64)>,
    /// Ratios never increase (up to rounding).
    pub decreasing: bool,
    /// The last ratio is at most `1 + 10 r`.
    pub final_within: bool,
}

pub fn ratio_limit_probe(claim: ClaimId, absx: f64, rs: &[f64]) -> Result<RatioProbe> {
    if rs.is_empty() || rs.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::Range("radii must be strictly decreasing".into()));
    }
    let mut ratios = Vec::with_capacity(rs.len());
    for &r in rs {
        let b = radii_for(claim, absx, r)?;
        ratios.push((r, b.big_m / b.m));
    }
    let decreasing = ratios.windows(2).all(|w| w[1].1 <= w[0].1 * (1.0 + 1e-12));
    let (r_last, q_last) = *ratios.last().unwrap();
    Ok(RatioProbe {
        claim,
        absx,
        ratios,
        decreasing,
        final_within: q_last <= 1.0 + 10.0 * r_last,
    })
}

/// Curvature at `samples[index]` of a curve given in polar form `(angle, radius)` about
/// its reference point, from five-point central differences.
pub fn curvature_fd(samples: &[(f64, f64)], index: usize) -> Result<f64> {
    if index < 2 || index + 2 >= samples.len() {
        return Err(Error::Range(format!(
            "five consecutive samples around index {index} are needed, have {}",
            samples.len()
        )));
    }
    let w = &samples[index - 2..=index + 2];
    let h = w[1].0 - w[0].0;
    for pair in w.windows(2) {
        let step = pair[1].0 - pair[0].0;
        if (step - h).abs() > 1e-9 * h.abs().max(1e-300) || h == 0.0 {
            return Err(Error::Range("angle step must be uniform and nonzero".into()));
        }
    }
    let r: Vec<f64> = w.iter().map(|s| s.1).collect();
    let d1 = (r[0] - 8.0 * r[1] + 8.0 * r[3] - r[4]) / (12.0 * h);
    let d2 = (-r[0] + 16.0 * r[1] - 30.0 * r[2] + 16.0 * r[3] - r[4]) / (12.0 * h * h);
    Ok(polar_curvature(r[2], d1, d2))
}

/// Finite-difference curvature of the planar sphere `S_kind(x, r)` at ray angle `angle`,
/// with angle step `h`.
pub fn sphere_curvature_fd(domain: &Domain, kind: MetricKind, x: &Vector, r: f64, angle: f64, h: f64) -> Result<f64> {
    let metric = Metric::new(kind, domain.clone())?;
    let opts = RayOptions::default();
    let mut samples = Vec::with_capacity(5);
    for k in -2..=2 {
        let t = angle + k as f64 * h;
        let sol = solve_radius_along_ray(domain, |y| metric.distance(x, y), x, &UnitVector::from_angle(t), r, &opts)?;
        samples.push((t, sol.t));
    }
    curvature_fd(&samples, 2)
}

/// Bisects on `r` for the smallest radius at which the inner inclusion of a claim holds
/// at `x = |x| e1`, starting from a bracket `[lo, hi]` with a failure at `lo` and
/// success at `hi`. Returns the final bracket.
pub fn inclusion_threshold(claim: ClaimId, absx: f64, mut lo: f64, mut hi: f64, width: f64, opts: &SampleOptions) -> Result<(f64, f64)> {
    let spec = ClaimSpec {
        n: opts.n,
        ..ClaimSpec::standard(claim).strict()
    };
    let holds = |r: f64| -> Result<bool> {
        let recs = check_claim_point(&spec, absx, r, opts)?;
        Ok(recs.iter().filter(|rec| rec.side == "m").all(|rec| rec.status == Status::Holds))
    };
    if holds(lo)? || !holds(hi)? {
        return Err(Error::Range(format!("[{lo}, {hi}] does not bracket the threshold")));
    }
    while hi - lo > width {
        let mid = 0.5 * (lo + hi);
        if holds(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok((lo, hi))
}

/// At the origin `B_j(0, m1(r)) ⊂ B_rho(0, r)` reduces to `1 - e^{-m1} <= tanh(r/2)`.
pub fn uniform_m1_holds_at_origin(r: f64) -> bool {
    -(-uniform_m1(r)).exp_m1() <= (0.5 * r).tanh()
}

/// Checks `ball ⊂ B_j(x, r)` by sampling the ball's boundary circle.
///
/// Returns the largest `j` value seen; points outside the domain give infinity.
pub fn max_j_on_circle(domain: &Domain, x: &Vector, ball: &EuclideanBall, n: usize) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for (_, d) in directions(2, n, 0)? {
        let p = ball.center.offset(d.as_vector(), ball.radius);
        let v = if domain.contains(&p) { j_metric(domain, x, &p)? } else { f64::INFINITY };
        worst = worst.max(v);
    }
    Ok(worst)
}

/// Inscribed-ball check for `B_j(x, r)`: the ball is inside, and its `(1 + inflate)`
/// enlargement is not.
#[derive(Clone, Debug, PartialEq)]
pub struct InscribedCheck {
    pub ball: EuclideanBall,
    pub max_j: f64,
    pub max_j_inflated: f64,
    pub contained: bool,
    pub maximal: bool,
}

pub fn inscribed_check(domain: &Domain, x: &Vector, r: f64, ball: &EuclideanBall, inflate: f64, n: usize) -> Result<InscribedCheck> {
    let max_j = max_j_on_circle(domain, x, ball, n)?;
    let bigger = EuclideanBall::new(ball.center.clone(), ball.radius * (1.0 + inflate))?;
    let max_j_inflated = max_j_on_circle(domain, x, &bigger, n)?;
    Ok(InscribedCheck {
        ball: ball.clone(),
        max_j,
        max_j_inflated,
        contained: max_j <= r + INCLUSION_TOL,
        maximal: max_j_inflated > r,
    })
}

/// The ball of the inscribed-ball construction in the unit ball, checked for maximality.
pub fn unit_ball_inscribed_check(x: &Vector, r: f64, n: usize) -> Result<InscribedCheck> {
    let domain = Domain::unit_ball(x.dim())?;
    inscribed_check(&domain, x, r, &j_ball_inscribed(x, r)?, 1e-3, n)
}

/// The `j`-ball about `e2` of radius `log 2` in the plane punctured at `±e1`.
#[derive(Clone, Debug)]
pub struct TwoPunctureReport {
    pub domain: Domain,
    pub x: Vector,
    pub r: f64,
    /// Ends of the two straight boundary pieces, the other end of both being the origin.
    pub segment_ends: [Vector; 2],
    /// The ball on the segment through `x` and its nearest boundary point.
    pub construction: InscribedCheck,
    /// Largest inscribed ball found by search over the sampled boundary.
    pub largest: EuclideanBall,
    /// Sampled boundary ordered by ray angle.
    pub boundary: Vec<Vector>,
}

pub fn two_puncture_report(n: usize) -> Result<TwoPunctureReport> {
    let domain = Domain::punctured(vec![Vector::xy(-1.0, 0.0), Vector::xy(1.0, 0.0)])?;
    let x = Vector::xy(0.0, 1.0);
    let r = 2f64.ln();
    let metric = Metric::new(MetricKind::DistanceRatio, domain.clone())?;
    let opts = RayOptions::default();
    let dx = domain.boundary_distance(&x)?;
    let on_sphere = |angle: f64| -> Result<Vector> {
        let dir = UnitVector::from_angle(angle);
        Ok(solve_radius_along_ray(&domain, |y| metric.distance(&x, y), &x, &dir, r, &opts)?.point)
    };
    // The straight pieces are where the sphere is closer to a puncture than `x` is.
    let near = |angle: f64| -> Result<bool> { Ok(domain.boundary_distance(&on_sphere(angle)?)? < dx) };
    let switch = |mut inside: f64, mut outside: f64| -> Result<Vector> {
        for _ in 0..100 {
            let mid = 0.5 * (inside + outside);
            if near(mid)? {
                inside = mid;
            } else {
                outside = mid;
            }
        }
        on_sphere(0.5 * (inside + outside))
    };
    let right = switch(-1.2, 1.4)?;
    let left = switch(PI + 1.2, PI - 1.4)?;

    let p = j_sphere_radial_pair_general(&domain, &x, r, &metric, &opts)?;
    let construction = inscribed_check(
        &domain,
        &x,
        r,
        &EuclideanBall::new(p.0.offset(&(&p.1 - &p.0), 0.5), 0.5 * p.0.dist(&p.1))?,
        1e-3,
        4096,
    )?;

    let boundary: Vec<Vector> = directions(2, n, 0)?
        .into_iter()
        .map(|(a, _)| on_sphere(a.unwrap()))
        .collect::<Result<_>>()?;
    let largest = largest_inscribed(&boundary, &x);
    Ok(TwoPunctureReport {
        domain,
        x,
        r,
        segment_ends: [right, left],
        construction,
        largest,
        boundary,
    })
}

/// Points of `S_j(x, r)` on the line through `x` and its nearest boundary point.
fn j_sphere_radial_pair_general(domain: &Domain, x: &Vector, r: f64, metric: &Metric, opts: &RayOptions) -> Result<(Vector, Vector)> {
    if domain.is_unit_ball() {
        let p = j_sphere_radial_pair(x, r)?;
        return Ok((p.y1, p.y2));
    }
    let Domain::PuncturedSpace { punctures, .. } = domain else {
        return Err(Error::Config(format!("no nearest-point line for {domain}")));
    };
    let nearest = punctures
        .iter()
        .min_by(|a, b| x.dist(a).total_cmp(&x.dist(b)))
        .ok_or(Error::EmptyBoundary)?;
    let toward = UnitVector::new(&(nearest - x))?;
    let away = UnitVector::new(&(x - nearest))?;
    let f = |y: &Vector| metric.distance(x, y);
    let y = solve_radius_along_ray(domain, f, x, &toward, r, opts)?.point;
    let z = solve_radius_along_ray(domain, f, x, &away, r, opts)?.point;
    Ok((y, z))
}

/// Largest disk inside a closed polygon star-shaped about `seed`: maximizes the distance
/// to the polygon over candidate centers by a shrinking pattern search.
pub fn largest_inscribed(boundary: &[Vector], seed: &Vector) -> EuclideanBall {
    let edges: Vec<(&Vector, &Vector)> = boundary
        .iter()
        .zip(boundary.iter().cycle().skip(1))
        .collect();
    let clearance = |c: &Vector| {
        edges
            .iter()
            .map(|(a, b)| crate::geometry::segment_distance(c, a, b))
            .fold(f64::INFINITY, f64::min)
    };
    let inside = |c: &Vector| winding_inside(boundary, c);
    // Coarse grid over the bounding box, then local refinement.
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for p in boundary {
        for i in 0..2 {
            lo[i] = lo[i].min(p[i]);
            hi[i] = hi[i].max(p[i]);
        }
    }
    let mut best = (seed.clone(), clearance(seed));
    let g = 60;
    for i in 0..=g {
        for j in 0..=g {
            let c = Vector::xy(
                lo[0] + (hi[0] - lo[0]) * i as f64 / g as f64,
                lo[1] + (hi[1] - lo[1]) * j as f64 / g as f64,
            );
            if inside(&c) {
                let v = clearance(&c);
                if v > best.1 {
                    best = (c, v);
                }
            }
        }
    }
    let mut step = (hi[0] - lo[0]).max(hi[1] - lo[1]) / g as f64;
    while step > 1e-10 {
        let mut moved = false;
        for (dx, dy) in [(1.0, 0.0), (-1.0, 0.0), (0.0, 1.0), (0.0, -1.0)] {
            let c = Vector::xy(best.0[0] + dx * step, best.0[1] + dy * step);
            if inside(&c) {
                let v = clearance(&c);
                if v > best.1 {
                    best = (c, v);
                    moved = true;
                }
            }
        }
        if !moved {
            step *= 0.5;
        }
    }
    EuclideanBall {
        center: best.0,
        radius: best.1,
    }
}

fn winding_inside(poly: &[Vector], p: &Vector) -> bool {
    let mut inside = false;
    let n = poly.len();
    for i in 0..n {
        let (a, b) = (&poly[i], &poly[(i + 1) % n]);
        if (a[1] > p[1]) != (b[1] > p[1]) {
            let t = (p[1] - a[1]) / (b[1] - a[1]);
            if p[0] < a[0] + t * (b[0] - a[0]) {
                inside = !inside;
            }
        }
    }
    inside
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "assert" => Ok(Mode::Assert),
            "report" => Ok(Mode::Report),
            other => Err(Error::Parse(format!("unknown mode '{other}'"))),
        }
    }
}
