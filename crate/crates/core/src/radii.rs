//! Inclusion radii `B_A(x, m) ⊂ B_B(x, r) ⊂ B_A(x, M)` in the unit ball.
//!
//! Every radius depends on `x` only through `|x|`. `f64::INFINITY` stands for an
//! unbounded radius, so `min`/`max` treat it as identity/absorbing element.

use std::fmt;
use std::str::FromStr;

use crate::ball_geometry::q_ball_inside_threshold;
use crate::error::{Error, Result};
use crate::metrics::MetricKind;

/// The inclusion results, named after the metric triple `A B A`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ClaimId {
    JRhoJ,
    RhoJRho,
    JKJ,
    KJK,
    JQJ,
    QJQ,
    RhoQRho,
    QRhoQ,
    KQK,
    QKQ,
    /// `B_j(x, log(1 + 2 sinh(r/2))) ⊂ B_rho(x, r)`
    UniformRho,
    /// `B_j(x, log(1 + 2 sinh(r/4))) ⊂ B_k(x, r)`
    UniformK,
    /// `B_j(x, log(1 + r/sqrt(1-r^2))) ⊂ B_q(x, r)`
    UniformQ,
}

impl ClaimId {
    pub const ALL: [ClaimId; 13] = [
        ClaimId::JRhoJ,
        ClaimId::RhoJRho,
        ClaimId::JKJ,
        ClaimId::KJK,
        ClaimId::JQJ,
        ClaimId::QJQ,
        ClaimId::RhoQRho,
        ClaimId::QRhoQ,
        ClaimId::KQK,
        ClaimId::QKQ,
        ClaimId::UniformRho,
        ClaimId::UniformK,
        ClaimId::UniformQ,
    ];

    /// Results that come with a sharpness statement.
    pub const SHARP: [ClaimId; 6] = [
        ClaimId::JRhoJ,
        ClaimId::RhoJRho,
        ClaimId::JQJ,
        ClaimId::QJQ,
        ClaimId::RhoQRho,
        ClaimId::QRhoQ,
    ];

    /// Results obtained from the hyperbolic ones through `rho/2 <= k <= rho`.
    pub const BAND: [ClaimId; 4] = [ClaimId::JKJ, ClaimId::KJK, ClaimId::KQK, ClaimId::QKQ];

    pub const UNIFORM: [ClaimId; 3] = [ClaimId::UniformRho, ClaimId::UniformK, ClaimId::UniformQ];

    pub fn name(self) -> &'static str {
        match self {
            ClaimId::JRhoJ => "jrhoj",
            ClaimId::RhoJRho => "rhojrho",
            ClaimId::JKJ => "jkj",
            ClaimId::KJK => "kjk",
            ClaimId::JQJ => "jqj",
            ClaimId::QJQ => "qjq",
            ClaimId::RhoQRho => "rhoqrho",
            ClaimId::QRhoQ => "qrhoq",
            ClaimId::KQK => "kqk",
            ClaimId::QKQ => "qkq",
            ClaimId::UniformRho => "uniform-rho",
            ClaimId::UniformK => "uniform-k",
            ClaimId::UniformQ => "uniform-q",
        }
    }

    /// The metric `A` whose balls bracket the `B`-ball.
    pub fn bracket_metric(self) -> MetricKind {
        use ClaimId::*;
        match self {
            JRhoJ | JKJ | JQJ | UniformRho | UniformK | UniformQ => MetricKind::DistanceRatio,
            RhoJRho | RhoQRho => MetricKind::Hyperbolic,
            KJK | KQK => MetricKind::Quasihyperbolic,
            QJQ | QRhoQ | QKQ => MetricKind::Chordal,
        }
    }

    /// The metric `B` of the ball with the given radius `r`.
    pub fn middle_metric(self) -> MetricKind {
        use ClaimId::*;
        match self {
            JRhoJ | QRhoQ | UniformRho => MetricKind::Hyperbolic,
            JKJ | QKQ | UniformK => MetricKind::Quasihyperbolic,
            RhoJRho | KJK | QJQ => MetricKind::DistanceRatio,
            JQJ | RhoQRho | KQK | UniformQ => MetricKind::Chordal,
        }
    }

    /// Whether sharpness of both radii is part of the statement.
    pub fn sharp(self) -> bool {
        ClaimId::SHARP.contains(&self)
    }

    /// Whether the statement only has the inner radius.
    pub fn is_uniform(self) -> bool {
        ClaimId::UNIFORM.contains(&self)
    }

    /// Whether `r` must stay below `(1-|x|)/sqrt(2(1+|x|^2))`.
    pub fn needs_chordal_threshold(self) -> bool {
        matches!(self, ClaimId::JQJ | ClaimId::RhoQRho | ClaimId::KQK | ClaimId::UniformQ)
    }
}

impl fmt::Display for ClaimId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ClaimId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ClaimId::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown claim '{s}'")))
    }
}

/// Which of the intervals `I1`, `I2`, `I3` of the `j`/`q` result contains `r`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum JqInterval {
    I1,
    I2,
    I3,
}

/// Thresholds and interval bookkeeping attached to a bound.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Validity {
    /// `(1-|x|)/sqrt(2(1+|x|^2))`, below which chordal balls stay in the unit ball.
    pub r0: Option<f64>,
    /// `|x|/sqrt(1+|x|^2)`
    pub r1: Option<f64>,
    /// `2|x|/(1+|x|^2)`
    pub r2: Option<f64>,
    pub interval: Option<JqInterval>,
    /// Whether the outer chordal ball `B_q(x, M)` lies in the unit ball.
    pub outer_ball_inside: Option<bool>,
}

/// A radius pair `(m, M)` for one claim at one `(|x|, r)`.
#[derive(Clone, Debug, PartialEq)]
pub struct InclusionBound {
    pub claim: ClaimId,
    pub absx: f64,
    pub r: f64,
    /// Inner radius `m`.
    pub m: f64,
    /// Outer radius `M`; infinite for the uniform claims, which have none.
    pub big_m: f64,
    pub sharp: bool,
    pub validity: Validity,
    /// Named sub-radii such as `m1`, `m2`.
    pub components: Vec<(&'static str, f64)>,
}

fn check_args(absx: f64, r: f64) -> Result<()> {
    if !(0.0..1.0).contains(&absx) {
        return Err(Error::Range(format!("|x| must lie in [0, 1), got {absx}")));
    }
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::Range(format!("r must be positive and finite, got {r}")));
    }
    Ok(())
}

fn check_chordal_threshold(absx: f64, r: f64) -> Result<f64> {
    let r0 = q_ball_inside_threshold(absx);
    if r >= r0 {
        return Err(Error::Validity(format!(
            "r = {r} must be below (1-|x|)/sqrt(2(1+|x|^2)) = {r0} at |x| = {absx}"
        )));
    }
    Ok(r0)
}

fn bound(claim: ClaimId, absx: f64, r: f64, m: f64, big_m: f64) -> InclusionBound {
    InclusionBound {
        claim,
        absx,
        r,
        m,
        big_m,
        sharp: claim.sharp(),
        validity: Validity::default(),
        components: Vec::new(),
    }
}

/// `B_j(x, m) ⊂ B_rho(x, r) ⊂ B_j(x, M)`.
pub fn radii_j_in_rho(absx: f64, r: f64) -> Result<InclusionBound> {
    check_args(absx, r)?;
    let m1 = ((1.0 + absx) * (0.5 * r).sinh()).ln_1p();
    let m2 = ((1.0 - absx) * r.exp_m1() / 2.0).ln_1p();
    let big_m = ((1.0 + absx) * r.exp_m1() / 2.0).ln_1p();
    let mut b = bound(ClaimId::JRhoJ, absx, r, m1.max(m2), big_m);
    b.components = vec![("m1", m1), ("m2", m2)];
    Ok(b)
}

/// `B_rho(x, m) ⊂ B_j(x, r) ⊂ B_rho(x, M)`.
pub fn radii_rho_in_j(absx: f64, r: f64) -> Result<InclusionBound> {
    check_args(absx, r)?;
    let e = r.exp_m1();
    let m = (2.0 * e / (1.0 + absx)).ln_1p();
    let m_a = 2.0 * (e / (1.0 + absx)).asinh();
    let m_b = ((2.0 * r.exp() - 1.0 - absx) / (1.0 - absx)).ln();
    let mut b = bound(ClaimId::RhoJRho, absx, r, m, m_a.min(m_b));
    b.components = vec![("M_arcsinh", m_a), ("M_log", m_b)];
    Ok(b)
}

/// `B_j(x, m) ⊂ B_k(x, r) ⊂ B_j(x, M)`, with the radii as stated: the inner radius of
/// the hyperbolic result at `r/2` and its outer radius at `r`.
pub fn radii_j_in_k(absx: f64, r: f64) -> Result<InclusionBound> {
    let half = radii_j_in_rho(absx, r / 2.0)?;
    let full = radii_j_in_rho(absx, r)?;
    let mut b = bound(ClaimId::JKJ, absx, r, half.m, full.big_m);
    b.components = half.components;
    Ok(b)
}

/// `B_k(x, m) ⊂ B_j(x, r) ⊂ B_k(x, M)`, as stated: `m` of the hyperbolic result and
/// twice its outer radius.
pub fn radii_k_in_j(absx: f64, r: f64) -> Result<InclusionBound> {
    let h = radii_rho_in_j(absx, r)?;
    let mut b = bound(ClaimId::KJK, absx, r, h.m, 2.0 * h.big_m);
    b.components = h.components.into_iter().map(|(n, v)| (n, 2.0 * v)).collect();
    Ok(b)
}

fn jq_thresholds(absx: f64) -> (f64, f64, f64) {
    let s = 1.0 + absx * absx;
    (q_ball_inside_threshold(absx), absx / s.sqrt(), 2.0 * absx / s)
}

/// The interval among `I1`, `I2`, `I3` containing `r`, honoring the `|x|` conditions.
pub fn jq_interval(absx: f64, r: f64) -> Option<JqInterval> {
    let (r0, r1, r2) = jq_thresholds(absx);
    let (a, b) = (r0.min(r1), r0.min(r2));
    if (0.0..a).contains(&r) {
        Some(JqInterval::I1)
    } else if absx < 2f64.sqrt() - 1.0 && (a..b).contains(&r) {
        Some(JqInterval::I2)
    } else if absx < 2.0 - 3f64.sqrt() && (r2..r0).contains(&r) {
        Some(JqInterval::I3)
    } else {
        None
    }
}

/// `B_j(x, m) ⊂ B_q(x, r) ⊂ B_j(x, M)` for `r < r0`.
pub fn radii_j_q(absx: f64, r: f64) -> Result<InclusionBound> {
    check_args(absx, r)?;
    let r0 = check_chordal_threshold(absx, r)?;
    let (_, r1, r2) = jq_thresholds(absx);
    let s = 1.0 + absx * absx;
    let a = 1.0 - r * r * s;
    let root = (1.0 - r * r).sqrt();
    let interval = jq_interval(absx, r);

    let big_m = ((1.0 - absx) * a / (1.0 - absx - r * s * (r + root))).ln();
    let m1 = match interval {
        Some(JqInterval::I1) | Some(JqInterval::I2) => {
            (r * s * (root - r * absx) / ((1.0 - absx) * a)).ln_1p()
        }
        _ => f64::INFINITY,
    };
    let m2 = match interval {
        Some(JqInterval::I3) => ((1.0 + absx) * a / (1.0 + absx - r * (r + root) * s)).ln(),
        _ => f64::INFINITY,
    };
    let mut b = bound(ClaimId::JQJ, absx, r, m1.min(m2), big_m);
    b.components = vec![("m1", m1), ("m2", m2)];
    b.validity = Validity {
        r0: Some(r0),
        r1: Some(r1),
        r2: Some(r2),
        interval,
        outer_ball_inside: None,
    };
    Ok(b)
}

/// Outer chordal radius of `B_j(x, r)` exactly as printed, whose second branch carries
/// `e^{-r}(1-|x|)` where the radial point `y2` gives `e^{-r}(1+|x|)`. Kept to document
/// the discrepancy; [`radii_q_in_j`] uses the corrected branch.
pub fn qjq_outer_as_printed(absx: f64, r: f64) -> Result<f64> {
    check_args(absx, r)?;
    Ok(qjq_outer(absx, r, 1.0 - absx))
}

fn qjq_outer(absx: f64, r: f64, branch2_factor: f64) -> f64 {
    let s = (1.0 + absx * absx).sqrt();
    if r <= ((1.0 + absx) / (1.0 - absx)).ln() {
        let u = r.exp() * (1.0 - absx) - 1.0;
        r.exp_m1() * (1.0 - absx) / (s * (1.0 + u * u).sqrt())
    } else {
        let u = (-r).exp() * branch2_factor - 1.0;
        r.exp_m1() * (1.0 + absx) / (r.exp() * s * (1.0 + u * u).sqrt())
    }
}

/// `B_q(x, m) ⊂ B_j(x, r) ⊂ B_q(x, M)`.
///
/// Both radii are chordal distances from `x` to the radial points of `S_j(x, r)`.
pub fn radii_q_in_j(absx: f64, r: f64) -> Result<InclusionBound> {
    check_args(absx, r)?;
    let s = (1.0 + absx * absx).sqrt();
    let u = (-r).exp() * (1.0 - absx) - 1.0;
    let m = -(-r).exp_m1() * (1.0 - absx) / (s * (1.0 + u * u).sqrt());
    let big_m = qjq_outer(absx, r, 1.0 + absx);
    let mut b = bound(ClaimId::QJQ, absx, r, m, big_m);
    let limit = (2.0 * (1.0 + absx) / (1.0 + 2.0 * absx - absx * absx)).ln();
    b.validity = Validity {
        r0: Some(q_ball_inside_threshold(absx)),
        outer_ball_inside: Some(r <= limit),
        ..Validity::default()
    };
    Ok(b)
}

/// `2 arcsinh` of the hyperbolic distance from `x` to the radial chordal point whose
/// norm is `(|x| + sign r sqrt(1-r^2)(1+|x|^2)) / a`; `sign` selects the outer point.
fn rho_to_chordal_point(absx: f64, r: f64, sign: f64) -> f64 {
    let s = 1.0 + absx * absx;
    let a = 1.0 - r * r * s;
    let root = (1.0 - r * r).sqrt();
    let y = (absx + sign * r * root * s) / a;
    let num = r * (root + sign * r * absx) * s;
    2.0 * (num / ((1.0 - absx * absx).sqrt() * a * (1.0 - y * y).sqrt())).asinh()
}

/// `B_rho(x, m) ⊂ B_q(x, r) ⊂ B_rho(x, M)` for `r < r0`.
pub fn radii_rho_q(absx: f64, r: f64) -> Result<InclusionBound> {
    check_args(absx, r)?;
    let r0 = check_chordal_threshold(absx, r)?;
    let mut b = bound(
        ClaimId::RhoQRho,
        absx,
        r,
        rho_to_chordal_point(absx, r, -1.0),
        rho_to_chordal_point(absx, r, 1.0),
    );
    b.validity.r0 = Some(r0);
    Ok(b)
}

fn chordal_to_rho_point(absx: f64, r: f64, sign: f64) -> f64 {
    let s = 1.0 + absx * absx;
    (1.0 - absx * absx) * (0.5 * r).sinh() / (s.sqrt() * (s * r.cosh() + sign * 2.0 * absx * r.sinh()).sqrt())
}

/// `B_q(x, m) ⊂ B_rho(x, r) ⊂ B_q(x, M)`.
pub fn radii_q_in_rho(absx: f64, r: f64) -> Result<InclusionBound> {
    check_args(absx, r)?;
    let big_m = chordal_to_rho_point(absx, r, -1.0);
    let mut b = bound(ClaimId::QRhoQ, absx, r, chordal_to_rho_point(absx, r, 1.0), big_m);
    let r0 = q_ball_inside_threshold(absx);
    b.validity = Validity {
        r0: Some(r0),
        outer_ball_inside: Some(big_m <= r0),
        ..Validity::default()
    };
    Ok(b)
}

/// `B_k(x, m) ⊂ B_q(x, r) ⊂ B_k(x, M)` for `r < r0`, as stated: the hyperbolic radii
/// with the outer one doubled.
pub fn radii_k_q(absx: f64, r: f64) -> Result<InclusionBound> {
    let h = radii_rho_q(absx, r)?;
    let mut b = bound(ClaimId::KQK, absx, r, h.m, 2.0 * h.big_m);
    b.validity = h.validity;
    Ok(b)
}

/// `B_q(x, m) ⊂ B_k(x, r) ⊂ B_q(x, M)`, as stated: the hyperbolic inner radius at `r/2`
/// and the outer one at `r`.
pub fn radii_q_in_k(absx: f64, r: f64) -> Result<InclusionBound> {
    let half = radii_q_in_rho(absx, r / 2.0)?;
    let full = radii_q_in_rho(absx, r)?;
    let mut b = bound(ClaimId::QKQ, absx, r, half.m, full.big_m);
    b.validity = full.validity;
    Ok(b)
}

pub fn uniform_m1(r: f64) -> f64 {
    (2.0 * (0.5 * r).sinh()).ln_1p()
}

pub fn uniform_m2(r: f64) -> f64 {
    (2.0 * (0.25 * r).sinh()).ln_1p()
}

/// Defined for `0 < r < 1`.
pub fn uniform_m3(r: f64) -> Result<f64> {
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::Validity(format!("m3 needs 0 < r < 1, got {r}")));
    }
    Ok((r / (1.0 - r * r).sqrt()).ln_1p())
}

/// The three `|x|`-free inner radii `(m1, m2, m3)`.
pub fn uniform_radii(r: f64) -> Result<(f64, f64, f64)> {
    check_args(0.0, r)?;
    Ok((uniform_m1(r), uniform_m2(r), uniform_m3(r)?))
}

/// Bound of one of the uniform claims at `(|x|, r)`; only `m` is meaningful.
pub fn radii_uniform(claim: ClaimId, absx: f64, r: f64) -> Result<InclusionBound> {
    check_args(absx, r)?;
    let m = match claim {
        ClaimId::UniformRho => uniform_m1(r),
        ClaimId::UniformK => uniform_m2(r),
        ClaimId::UniformQ => {
            check_chordal_threshold(absx, r)?;
            uniform_m3(r)?
        }
        other => return Err(Error::Config(format!("{other} is not a uniform claim"))),
    };
    let mut b = bound(claim, absx, r, m, f64::INFINITY);
    if claim == ClaimId::UniformQ {
        b.validity.r0 = Some(q_ball_inside_threshold(absx));
    }
    Ok(b)
}

/// Radii of any claim.
pub fn radii_for(claim: ClaimId, absx: f64, r: f64) -> Result<InclusionBound> {
    match claim {
        ClaimId::JRhoJ => radii_j_in_rho(absx, r),
        ClaimId::RhoJRho => radii_rho_in_j(absx, r),
        ClaimId::JKJ => radii_j_in_k(absx, r),
        ClaimId::KJK => radii_k_in_j(absx, r),
        ClaimId::JQJ => radii_j_q(absx, r),
        ClaimId::QJQ => radii_q_in_j(absx, r),
        ClaimId::RhoQRho => radii_rho_q(absx, r),
        ClaimId::QRhoQ => radii_q_in_rho(absx, r),
        ClaimId::KQK => radii_k_q(absx, r),
        ClaimId::QKQ => radii_q_in_k(absx, r),
        c => radii_uniform(c, absx, r),
    }
}

/// Both sides of an inequality `lhs <= rhs`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PredicateOutcome {
    pub holds: bool,
    pub lhs: f64,
    pub rhs: f64,
    /// `rhs - lhs`
    pub margin: f64,
}

/// Relative slack for inequalities that are attained, such as the first one at `a = b`.
const PREDICATE_SLACK: f64 = 1e-12;

impl PredicateOutcome {
    fn new(lhs: f64, rhs: f64) -> Self {
        PredicateOutcome {
            holds: lhs <= rhs + PREDICATE_SLACK * rhs.abs().max(1.0),
            lhs,
            rhs,
            margin: rhs - lhs,
        }
    }
}

fn check_unit(name: &str, v: f64) -> Result<()> {
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(Error::Validity(format!("{name} must lie in [0, 1], got {v}")))
    }
}

/// `min{1-a, 1-b}(1 + max{a, b}) <= sqrt(1-a^2) sqrt(1-b^2)` for `a, b` in `[0, 1]`.
pub fn min_gap_inequality(a: f64, b: f64) -> Result<PredicateOutcome> {
    check_unit("a", a)?;
    check_unit("b", b)?;
    let lhs = (1.0 - a).min(1.0 - b) * (1.0 + a.max(b));
    Ok(PredicateOutcome::new(lhs, ((1.0 - a * a) * (1.0 - b * b)).sqrt()))
}

/// `arcsinh(2|x|/(1-|x|^2))`, the lower limit on `r` of the two `|x|`-dependent predicates.
pub fn technical_r_threshold(absx: f64) -> f64 {
    (2.0 * absx / (1.0 - absx * absx)).asinh()
}

fn check_technical(absx: f64, r: f64) -> Result<()> {
    check_args(absx, r)?;
    if r < technical_r_threshold(absx) {
        return Err(Error::Validity(format!(
            "r = {r} is below arcsinh(2|x|/(1-|x|^2)) = {}",
            technical_r_threshold(absx)
        )));
    }
    Ok(())
}

/// `min{d(x), d(y)}(1 + |x|) <= sqrt(1-|x|^2) sqrt(1-|y|^2)` in the unit ball.
pub fn boundary_distance_inequality(absx: f64, absy: f64, r: f64) -> Result<PredicateOutcome> {
    check_technical(absx, r)?;
    if !(0.0..1.0).contains(&absy) {
        return Err(Error::Validity(format!("|y| must lie in [0, 1), got {absy}")));
    }
    let lhs = (1.0 - absx).min(1.0 - absy) * (1.0 + absx);
    Ok(PredicateOutcome::new(lhs, ((1.0 - absx * absx) * (1.0 - absy * absy)).sqrt()))
}

/// `2|x|/(1-|x|) - (1+|x|)/(1/tanh(r/2) - |x|) <= (1+|x|)(e^r - 1)/2`.
pub fn tanh_inequality(absx: f64, r: f64) -> Result<PredicateOutcome> {
    check_technical(absx, r)?;
    let lhs = 2.0 * absx / (1.0 - absx) - (1.0 + absx) / (1.0 / (0.5 * r).tanh() - absx);
    Ok(PredicateOutcome::new(lhs, (1.0 + absx) * r.exp_m1() / 2.0))
}

/// The three technical predicates: the first on `(a, b)`, the second on `|x|` and a point
/// with `|y| = b`, the third on `(|x|, r)`.
pub fn technical_inequalities(a: f64, b: f64, absx: f64, r: f64) -> Result<[PredicateOutcome; 3]> {
    Ok([
        min_gap_inequality(a, b)?,
        boundary_distance_inequality(absx, b.min(1.0 - f64::EPSILON), r)?,
        tanh_inequality(absx, r)?,
    ])
}
