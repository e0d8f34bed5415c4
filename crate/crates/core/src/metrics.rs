//! Closed-form hyperbolic-type metrics: the distance ratio metric `j`, the hyperbolic
//! metric of the unit ball `rho`, the chordal metric `q`, and a dispatcher that also
//! reaches the numerical quasihyperbolic metric `k`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::geometry::{Domain, Vector};
use crate::quasihyperbolic;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MetricKind {
    Hyperbolic,
    Quasihyperbolic,
    DistanceRatio,
    Chordal,
}

impl MetricKind {
    pub const ALL: [MetricKind; 4] = [
        MetricKind::Hyperbolic,
        MetricKind::Quasihyperbolic,
        MetricKind::DistanceRatio,
        MetricKind::Chordal,
    ];

    pub fn symbol(self) -> &'static str {
        match self {
            MetricKind::Hyperbolic => "rho",
            MetricKind::Quasihyperbolic => "k",
            MetricKind::DistanceRatio => "j",
            MetricKind::Chordal => "q",
        }
    }

    /// Rejects metric/domain pairs this crate does not evaluate.
    pub fn check_domain(self, domain: &Domain) -> Result<()> {
        match self {
            MetricKind::Hyperbolic | MetricKind::Quasihyperbolic if !domain.is_unit_ball() => {
                Err(Error::Config(format!(
                    "the {} metric is only implemented in the unit ball, not in {domain}",
                    self.symbol()
                )))
            }
            _ => Ok(()),
        }
    }
}

impl fmt::Display for MetricKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

impl FromStr for MetricKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "rho" | "hyperbolic" => Ok(MetricKind::Hyperbolic),
            "k" | "quasihyperbolic" => Ok(MetricKind::Quasihyperbolic),
            "j" | "distance-ratio" => Ok(MetricKind::DistanceRatio),
            "q" | "chordal" => Ok(MetricKind::Chordal),
            other => Err(Error::Parse(format!("unknown metric '{other}'"))),
        }
    }
}

/// A point of the compactified space `R^n ∪ {∞}`.
#[derive(Clone, Debug, PartialEq)]
pub enum ExtendedPoint {
    Finite(Vector),
    Infinity,
}

impl From<Vector> for ExtendedPoint {
    fn from(v: Vector) -> Self {
        ExtendedPoint::Finite(v)
    }
}

/// `j_G(x, y) = log(1 + |x - y| / min{d(x), d(y)})`.
pub fn j_metric(domain: &Domain, x: &Vector, y: &Vector) -> Result<f64> {
    let dx = domain.boundary_distance(x)?;
    let dy = domain.boundary_distance(y)?;
    if x == y {
        return Ok(0.0);
    }
    Ok((x.dist(y) / dx.min(dy)).ln_1p())
}

/// Hyperbolic distance in the unit ball, `2 arsinh(|x-y| / (sqrt(1-|x|^2) sqrt(1-|y|^2)))`.
pub fn rho_unit_ball(x: &Vector, y: &Vector) -> Result<f64> {
    let ball = Domain::UnitBall { dim: x.dim() };
    ball.ensure_contains(x)?;
    ball.ensure_contains(y)?;
    let (nx, ny) = (x.norm(), y.norm());
    let sx = ((1.0 - nx) * (1.0 + nx)).sqrt();
    let sy = ((1.0 - ny) * (1.0 + ny)).sqrt();
    Ok(2.0 * (x.dist(y) / (sx * sy)).asinh())
}

/// Chordal distance on `R^n ∪ {∞}`; always in `[0, 1]`.
pub fn chordal(x: &ExtendedPoint, y: &ExtendedPoint) -> f64 {
    match (x, y) {
        (ExtendedPoint::Finite(a), ExtendedPoint::Finite(b)) => chordal_finite(a, b),
        (ExtendedPoint::Finite(a), ExtendedPoint::Infinity)
        | (ExtendedPoint::Infinity, ExtendedPoint::Finite(a)) => 1.0 / (1.0 + a.norm_sq()).sqrt(),
        (ExtendedPoint::Infinity, ExtendedPoint::Infinity) => 0.0,
    }
}

pub fn chordal_finite(x: &Vector, y: &Vector) -> f64 {
    let v = x.dist(y) / ((1.0 + x.norm_sq()).sqrt() * (1.0 + y.norm_sq()).sqrt());
    v.min(1.0)
}

/// A metric bound to its domain, ready to be evaluated repeatedly.
#[derive(Clone, Debug)]
pub struct Metric {
    pub kind: MetricKind,
    pub domain: Domain,
    /// Tolerance handed to the quasihyperbolic solver.
    pub qh_tol: f64,
}

impl Metric {
    pub const DEFAULT_QH_TOL: f64 = 1e-8;

    pub fn new(kind: MetricKind, domain: Domain) -> Result<Self> {
        kind.check_domain(&domain)?;
        Ok(Metric {
            kind,
            domain,
            qh_tol: Self::DEFAULT_QH_TOL,
        })
    }

    pub fn with_qh_tol(mut self, tol: f64) -> Self {
        self.qh_tol = tol;
        self
    }

    pub fn distance(&self, x: &Vector, y: &Vector) -> Result<f64> {
        match self.kind {
            MetricKind::DistanceRatio => j_metric(&self.domain, x, y),
            MetricKind::Hyperbolic => rho_unit_ball(x, y),
            MetricKind::Chordal => {
                self.domain.ensure_contains(x)?;
                Ok(chordal_finite(x, y))
            }
            MetricKind::Quasihyperbolic => quasihyperbolic::qh_value(x, y, self.qh_tol),
        }
    }
}

/// Evaluates the metric of the given kind in `domain`.
pub fn metric_eval(kind: MetricKind, domain: &Domain, x: &Vector, y: &Vector) -> Result<f64> {
    Metric::new(kind, domain.clone())?.distance(x, y)
}
