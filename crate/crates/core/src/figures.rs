//! Static SVG figures: sampled metric spheres, exact Euclidean circles, and the named
//! figure sets reproduced by the command-line tool.

use std::fmt::Write as _;

use crate::ball_geometry::{q_ball_euclidean, rho_ball_euclidean, sample_metric_sphere_2d};
use crate::error::{Error, Result};
use crate::geometry::{Domain, EuclideanBall, Vector};
use crate::metrics::MetricKind;
use crate::radii::{radii_for, ClaimId};
use crate::verifier::{fmt_num, radius_limit, two_puncture_report};

pub const FIGURE_SETS: [&str; 6] = ["jballs", "remark26", "rho-j", "q-j", "rho-q", "all"];

/// Rays used for every sampled sphere in the figures.
const FIGURE_RAYS: usize = 720;

/// A minimal SVG canvas in world coordinates (y up).
pub struct Svg {
    xmin: f64,
    ymax: f64,
    scale: f64,
    width: f64,
    height: f64,
    body: String,
}

impl Svg {
    /// Canvas showing `[xmin, xmax] x [ymin, ymax]`, `px` pixels wide.
    pub fn new(xmin: f64, xmax: f64, ymin: f64, ymax: f64, px: f64) -> Self {
        let scale = px / (xmax - xmin);
        Svg {
            xmin,
            ymax,
            scale,
            width: px,
            height: (ymax - ymin) * scale + 30.0,
            body: String::new(),
        }
    }

    fn map(&self, p: &Vector) -> (f64, f64) {
        ((p[0] - self.xmin) * self.scale, (self.ymax - p[1]) * self.scale)
    }

    pub fn comment(&mut self, text: &str) {
        let _ = writeln!(self.body, "<!-- {} -->", text.replace("--", "- -"));
    }

    pub fn polyline(&mut self, points: &[Vector], stroke: &str, width: f64, dashed: bool, closed: bool) {
        if points.is_empty() {
            return;
        }
        let mut coords: Vec<String> = points
            .iter()
            .map(|p| {
                let (a, b) = self.map(p);
                format!("{a:.3},{b:.3}")
            })
            .collect();
        if closed {
            coords.push(coords[0].clone());
        }
        let dash = if dashed { r#" stroke-dasharray="6,4""# } else { "" };
        let _ = writeln!(
            self.body,
            r#"<polyline points="{}" fill="none" stroke="{stroke}" stroke-width="{width}"{dash}/>"#,
            coords.join(" ")
        );
    }

    pub fn circle(&mut self, ball: &EuclideanBall, stroke: &str, width: f64, dashed: bool) {
        let (cx, cy) = self.map(&ball.center);
        let dash = if dashed { r#" stroke-dasharray="6,4""# } else { "" };
        let _ = writeln!(
            self.body,
            r#"<circle cx="{cx:.3}" cy="{cy:.3}" r="{:.3}" fill="none" stroke="{stroke}" stroke-width="{width}"{dash}/>"#,
            ball.radius * self.scale
        );
    }

    pub fn dot(&mut self, p: &Vector, radius_px: f64) {
        let (cx, cy) = self.map(p);
        let _ = writeln!(self.body, r#"<circle cx="{cx:.3}" cy="{cy:.3}" r="{radius_px}" fill="black"/>"#);
    }

    pub fn caption(&mut self, text: &str) {
        let y = self.height - 10.0;
        let text = text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;");
        let _ = writeln!(self.body, r#"<text x="10" y="{y:.1}" font-family="sans-serif" font-size="13">{text}</text>"#);
    }

    pub fn finish(&self) -> String {
        format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w:.0}\" height=\"{h:.0}\" viewBox=\"0 0 {w:.0} {h:.0}\">\n{}</svg>\n",
            self.body,
            w = self.width,
            h = self.height
        )
    }
}

/// Sampled boundary of the planar sphere `S_kind(x, r)`.
pub fn sphere_polyline(domain: &Domain, kind: MetricKind, x: &Vector, r: f64, n: usize) -> Result<Vec<Vector>> {
    Ok(sample_metric_sphere_2d(domain, kind, x, r, n)?
        .points
        .into_iter()
        .map(|p| p.point)
        .collect())
}

/// The exact Euclidean form of `B_kind(x, r)` when there is one.
pub fn exact_circle(domain: &Domain, kind: MetricKind, x: &Vector, r: f64) -> Option<EuclideanBall> {
    match kind {
        MetricKind::Hyperbolic if domain.is_unit_ball() => rho_ball_euclidean(x, r).ok(),
        MetricKind::Chordal => q_ball_euclidean(x, r).ok().map(|c| c.ball),
        _ => None,
    }
}

fn unit_circle() -> EuclideanBall {
    EuclideanBall {
        center: Vector::zeros(2),
        radius: 1.0,
    }
}

/// One named figure: file stem and SVG text.
pub type Figure = (String, String);

fn jballs() -> Result<Vec<Figure>> {
    let mut out = Vec::new();

    let domain = Domain::punctured(vec![Vector::zeros(2)])?;
    let x = Vector::xy(1.0, 0.0);
    let r = 1.0;
    let mut svg = Svg::new(-1.5, 3.5, -2.5, 2.5, 500.0);
    svg.comment(&format!("domain={domain} x={} r={}", fmt_point2(&x), fmt_num(r)));
    svg.circle(&EuclideanBall { center: Vector::zeros(2), radius: x.norm() }, "gray", 1.0, true);
    svg.polyline(&sphere_polyline(&domain, MetricKind::DistanceRatio, &x, r, FIGURE_RAYS)?, "black", 2.0, false, true);
    svg.dot(&Vector::zeros(2), 3.0);
    svg.dot(&x, 3.0);
    svg.caption("j-disk in the punctured plane; dashed: d(z) = d(x)");
    out.push(("jballs-punctured".to_string(), svg.finish()));

    let domain = Domain::half_space(2)?;
    let x = Vector::xy(0.0, 1.0);
    let mut svg = Svg::new(-3.0, 3.0, -0.2, 4.0, 500.0);
    svg.comment(&format!("domain={domain} x={} r={}", fmt_point2(&x), fmt_num(r)));
    svg.polyline(&[Vector::xy(-3.0, 0.0), Vector::xy(3.0, 0.0)], "black", 1.0, false, false);
    svg.polyline(&[Vector::xy(-3.0, 1.0), Vector::xy(3.0, 1.0)], "gray", 1.0, true, false);
    svg.polyline(&sphere_polyline(&domain, MetricKind::DistanceRatio, &x, r, FIGURE_RAYS)?, "black", 2.0, false, true);
    svg.dot(&x, 3.0);
    svg.caption("j-disk in the upper half-plane; dashed: d(z) = d(x)");
    out.push(("jballs-halfplane".to_string(), svg.finish()));

    let domain = Domain::rectangle(0.0, 0.0, 4.0, 2.0)?;
    let x = Vector::xy(1.5, 0.6);
    let r = 0.8;
    let d = domain.boundary_distance(&x)?;
    let mut svg = Svg::new(-0.2, 4.2, -0.2, 2.2, 500.0);
    svg.comment(&format!("domain={domain} x={} r={}", fmt_point2(&x), fmt_num(r)));
    let rect = |a: f64| {
        vec![
            Vector::xy(a, a),
            Vector::xy(4.0 - a, a),
            Vector::xy(4.0 - a, 2.0 - a),
            Vector::xy(a, 2.0 - a),
        ]
    };
    svg.polyline(&rect(0.0), "black", 1.0, false, true);
    // Medial axis of the rectangle.
    let (p, q) = (Vector::xy(1.0, 1.0), Vector::xy(3.0, 1.0));
    svg.polyline(&[Vector::xy(0.0, 0.0), p.clone(), Vector::xy(0.0, 2.0)], "gray", 1.0, false, false);
    svg.polyline(&[Vector::xy(4.0, 0.0), q.clone(), Vector::xy(4.0, 2.0)], "gray", 1.0, false, false);
    svg.polyline(&[p, q], "gray", 1.0, false, false);
    svg.polyline(&rect(d), "gray", 1.0, true, true);
    svg.polyline(&sphere_polyline(&domain, MetricKind::DistanceRatio, &x, r, FIGURE_RAYS)?, "black", 2.0, false, true);
    svg.dot(&x, 3.0);
    svg.caption("j-disk in a rectangle; gray: medial axis; dashed: d(z) = d(x)");
    out.push(("jballs-rectangle".to_string(), svg.finish()));
    Ok(out)
}

fn fmt_point2(p: &Vector) -> String {
    format!("{},{}", fmt_num(p[0]), fmt_num(p[1]))
}

fn remark26() -> Result<Vec<Figure>> {
    let rep = two_puncture_report(FIGURE_RAYS)?;
    let [right, left] = &rep.segment_ends;
    let mut svg = Svg::new(-2.5, 2.5, -1.0, 3.5, 500.0);
    svg.comment(&format!(
        "domain={} x={} r={} segment_ends={};{} endpoint_norms={},{}",
        rep.domain,
        fmt_point2(&rep.x),
        fmt_num(rep.r),
        fmt_point2(right),
        fmt_point2(left),
        fmt_num(right.norm()),
        fmt_num(left.norm())
    ));
    svg.polyline(&rep.boundary, "black", 2.0, false, true);
    svg.polyline(&[left.clone(), Vector::zeros(2), right.clone()], "gray", 1.0, false, false);
    svg.circle(&rep.construction.ball, "gray", 1.0, true);
    svg.circle(&rep.largest, "gray", 1.0, false);
    for p in [Vector::xy(-1.0, 0.0), Vector::xy(1.0, 0.0)] {
        svg.dot(&p, 3.0);
    }
    svg.dot(&rep.x, 3.0);
    svg.caption(&format!(
        "j-disk about e2 of radius log 2 in R^2 minus {{-e1, e1}}; segment ends at norm {}",
        fmt_num(right.norm())
    ));
    Ok(vec![("remark26".to_string(), svg.finish())])
}

/// Unit-disk inclusion figure of a claim at `x = |x| e1`: the bracketing balls of radii
/// `m` and `M` in gray and the middle ball in black.
fn inclusion_figure(name: &str, claim: ClaimId, absx: f64, r: f64) -> Result<Figure> {
    let domain = Domain::unit_ball(2)?;
    let x = Vector::xy(absx, 0.0);
    let b = radii_for(claim, absx, r)?;
    let (a_kind, b_kind) = (claim.bracket_metric(), claim.middle_metric());
    let mut svg = Svg::new(-1.1, 1.1, -1.1, 1.1, 500.0);
    svg.comment(&format!(
        "claim={claim} x={} r={} m={} M={}",
        fmt_point2(&x),
        fmt_num(r),
        fmt_num(b.m),
        fmt_num(b.big_m)
    ));
    svg.circle(&unit_circle(), "black", 0.7, false);
    for radius in [b.m, b.big_m] {
        match exact_circle(&domain, a_kind, &x, radius) {
            Some(ball) => svg.circle(&ball, "gray", 2.0, false),
            None => svg.polyline(&sphere_polyline(&domain, a_kind, &x, radius, FIGURE_RAYS)?, "gray", 2.0, false, true),
        }
    }
    match exact_circle(&domain, b_kind, &x, r) {
        Some(ball) => svg.circle(&ball, "black", 2.0, false),
        None => svg.polyline(&sphere_polyline(&domain, b_kind, &x, r, FIGURE_RAYS)?, "black", 2.0, false, true),
    }
    svg.dot(&x, 3.0);
    svg.caption(&format!(
        "B_{a_kind}(x, {}) in B_{b_kind}(x, {}) in B_{a_kind}(x, {}), |x| = {}",
        fmt_num(b.m),
        fmt_num(r),
        fmt_num(b.big_m),
        fmt_num(absx)
    ));
    Ok((name.to_string(), svg.finish()))
}

/// The figures of a named set.
pub fn figure_set(name: &str) -> Result<Vec<Figure>> {
    let absx = 0.4;
    let chordal_r = 0.5 * radius_limit(ClaimId::JQJ, absx).unwrap_or(0.2);
    match name {
        "jballs" => jballs(),
        "remark26" => remark26(),
        "rho-j" => Ok(vec![inclusion_figure("rho-j", ClaimId::JRhoJ, absx, 1.0)?]),
        "q-j" => Ok(vec![inclusion_figure("q-j", ClaimId::JQJ, absx, chordal_r)?]),
        "rho-q" => Ok(vec![inclusion_figure("rho-q", ClaimId::RhoQRho, absx, chordal_r)?]),
        "all" => {
            let mut out = Vec::new();
            for set in FIGURE_SETS.iter().filter(|s| **s != "all") {
                out.extend(figure_set(set)?);
            }
            Ok(out)
        }
        other => Err(Error::Parse(format!(
            "unknown figure set '{other}', expected one of {}",
            FIGURE_SETS.join(", ")
        ))),
    }
}
