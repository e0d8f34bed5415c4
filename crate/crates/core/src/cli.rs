//! Command-line front end: `dist`, `ball`, `radii`, `verify` and `figures`.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::ball_geometry::sample_metric_sphere_2d;
use crate::error::{Error, Result};
use crate::figures::{exact_circle, figure_set, Svg};
use crate::geometry::{Domain, EuclideanBall, Vector};
use crate::metrics::{Metric, MetricKind};
use crate::parallel::Execution;
use crate::radii::{radii_for, ClaimId};
use crate::verifier::{fmt_num, fmt_point, ClaimSpec, SampleOptions, VerificationReport};

/// Default output directory for files when no explicit path is given.
pub const OUT_DIR_ENV: &str = "METRIC_BALLS_OUT_DIR";

pub const EXIT_OTHER: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_VALIDITY: i32 = 3;
pub const EXIT_VIOLATION: i32 = 4;

#[derive(Parser, Debug)]
#[command(name = "metric-balls", version, about = "Hyperbolic-type metric balls and their inclusion radii")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Distance between two points.
    Dist(DistArgs),
    /// Sampled boundary of a planar metric ball as CSV or SVG.
    Ball(BallArgs),
    /// Inclusion radii of a claim.
    Radii(RadiiArgs),
    /// Sampling verification of the inclusion claims.
    Verify(VerifyArgs),
    /// Named SVG figure sets.
    Figures(FiguresArgs),
}

#[derive(Args, Debug)]
pub struct DistArgs {
    /// unit-ball[:n], half-space[:n], punctured:x,y[;x,y...], rectangle:x0,y0,x1,y1 or polygon:x,y;x,y;...
    #[arg(long, default_value = "unit-ball")]
    pub domain: String,
    /// rho, k, j or q.
    #[arg(long)]
    pub metric: String,
    #[arg(long, allow_hyphen_values = true)]
    pub x: String,
    #[arg(long, allow_hyphen_values = true)]
    pub y: String,
    #[arg(long, default_value_t = Metric::DEFAULT_QH_TOL)]
    pub qh_tol: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum BallFormat {
    Csv,
    Svg,
}

#[derive(Args, Debug)]
pub struct BallArgs {
    #[arg(long, default_value = "unit-ball")]
    pub domain: String,
    #[arg(long)]
    pub metric: String,
    #[arg(long, allow_hyphen_values = true)]
    pub x: String,
    #[arg(long)]
    pub r: f64,
    /// Number of rays.
    #[arg(long, default_value_t = 720)]
    pub n: usize,
    #[arg(long, value_enum, default_value_t = BallFormat::Csv)]
    pub format: BallFormat,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct RadiiArgs {
    #[arg(long)]
    pub claim: String,
    #[arg(long)]
    pub absx: f64,
    #[arg(long)]
    pub r: f64,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// Run every claim (the default when no --claim is given).
    #[arg(long)]
    pub all: bool,
    /// Claim to run; repeatable.
    #[arg(long)]
    pub claim: Vec<String>,
    /// Count report-mode failures too.
    #[arg(long)]
    pub strict: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Rays per record, overriding the per-claim default.
    #[arg(long)]
    pub n: Option<usize>,
    /// Add wall time to each record.
    #[arg(long)]
    pub timing: bool,
    #[arg(long)]
    pub sequential: bool,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct FiguresArgs {
    /// jballs, remark26, rho-j, q-j, rho-q or all.
    #[arg(long, default_value = "all")]
    pub set: String,
    /// Directory for the SVG files; defaults to $METRIC_BALLS_OUT_DIR, then the working directory.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

/// Whether a run found failing records.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Clean,
    Violations,
}

/// Exit status for an error.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Parse(_) | Error::Config(_) => EXIT_USAGE,
        Error::Validity(_)
        | Error::Range(_)
        | Error::NotInDomain { .. }
        | Error::DimensionMismatch { .. }
        | Error::InvalidVector(_)
        | Error::InvalidDomain(_) => EXIT_VALIDITY,
        _ => EXIT_OTHER,
    }
}

pub fn parse_point(s: &str) -> Result<Vector> {
    let coords = s
        .split(',')
        .map(|c| c.trim().parse::<f64>().map_err(|e| Error::Parse(format!("bad coordinate '{c}' in '{s}': {e}"))))
        .collect::<Result<Vec<f64>>>()?;
    Vector::new(coords)
}

fn parse_points(s: &str) -> Result<Vec<Vector>> {
    s.split(';').filter(|p| !p.trim().is_empty()).map(parse_point).collect()
}

fn parse_dim(rest: Option<&str>) -> Result<usize> {
    match rest {
        None => Ok(2),
        Some(d) => d.parse().map_err(|e| Error::Parse(format!("bad dimension '{d}': {e}"))),
    }
}

pub fn parse_domain(s: &str) -> Result<Domain> {
    let (kind, rest) = match s.split_once(':') {
        Some((k, r)) => (k, Some(r)),
        None => (s, None),
    };
    match kind {
        "unit-ball" | "ball" | "disk" => Domain::unit_ball(parse_dim(rest)?),
        "half-space" | "half-plane" => Domain::half_space(parse_dim(rest)?),
        "punctured" => Domain::punctured(parse_points(rest.unwrap_or("0,0"))?),
        "polygon" => Domain::convex_polygon(parse_points(rest.unwrap_or(""))?),
        "rectangle" => {
            let c = parse_point(rest.ok_or_else(|| Error::Parse("rectangle needs x0,y0,x1,y1".into()))?)?;
            if c.dim() != 4 {
                return Err(Error::Parse("rectangle needs x0,y0,x1,y1".into()));
            }
            Domain::rectangle(c[0], c[1], c[2], c[3])
        }
        other => Err(Error::Parse(format!("unknown domain '{other}'"))),
    }
}

fn default_out_dir() -> PathBuf {
    std::env::var_os(OUT_DIR_ENV).map(PathBuf::from).unwrap_or_else(|| PathBuf::from("."))
}

fn resolve_output(path: &Path) -> PathBuf {
    if path.is_absolute() {
        path.to_path_buf()
    } else {
        default_out_dir().join(path)
    }
}

fn emit(out: &mut dyn Write, path: Option<&PathBuf>, text: &str) -> Result<()> {
    match path {
        Some(p) => {
            let p = resolve_output(p);
            if let Some(dir) = p.parent() {
                fs::create_dir_all(dir)?;
            }
            fs::write(&p, text)?;
            writeln!(out, "wrote {}", p.display())?;
        }
        None => out.write_all(text.as_bytes())?,
    }
    Ok(())
}

pub fn run(cli: Cli, out: &mut dyn Write) -> Result<Outcome> {
    match cli.command {
        Command::Dist(a) => dist(a, out),
        Command::Ball(a) => ball(a, out),
        Command::Radii(a) => radii(a, out),
        Command::Verify(a) => verify(a, out),
        Command::Figures(a) => figures(a, out),
    }
}

fn dist(a: DistArgs, out: &mut dyn Write) -> Result<Outcome> {
    let domain = parse_domain(&a.domain)?;
    let kind: MetricKind = a.metric.parse()?;
    let (x, y) = (parse_point(&a.x)?, parse_point(&a.y)?);
    let metric = Metric::new(kind, domain.clone())?.with_qh_tol(a.qh_tol);
    let v = metric.distance(&x, &y)?;
    writeln!(
        out,
        "# dist domain={domain} metric={kind} x={} y={} qh_tol={}",
        fmt_point(&x),
        fmt_point(&y),
        fmt_num(a.qh_tol)
    )?;
    writeln!(out, "{}", fmt_num(v))?;
    Ok(Outcome::Clean)
}

fn ball(a: BallArgs, out: &mut dyn Write) -> Result<Outcome> {
    let domain = parse_domain(&a.domain)?;
    let kind: MetricKind = a.metric.parse()?;
    let x = parse_point(&a.x)?;
    let sample = sample_metric_sphere_2d(&domain, kind, &x, a.r, a.n)?;
    let header = format!(
        "ball domain={domain} metric={kind} x={} r={} n={} skipped={}",
        fmt_point(&x),
        fmt_num(a.r),
        a.n,
        sample.skipped.len()
    );
    let text = match a.format {
        BallFormat::Csv => {
            let mut s = format!("# {header}\nangle,x,y\n");
            for p in &sample.points {
                s.push_str(&format!("{},{},{}\n", fmt_num(p.angle), fmt_num(p.point[0]), fmt_num(p.point[1])));
            }
            s
        }
        BallFormat::Svg => {
            let pts: Vec<Vector> = sample.points.iter().map(|p| p.point.clone()).collect();
            let (mut lo, mut hi) = ([x[0], x[1]], [x[0], x[1]]);
            for p in &pts {
                for i in 0..2 {
                    lo[i] = lo[i].min(p[i]);
                    hi[i] = hi[i].max(p[i]);
                }
            }
            let exact = exact_circle(&domain, kind, &x, a.r);
            if domain.is_unit_ball() {
                lo = [lo[0].min(-1.0), lo[1].min(-1.0)];
                hi = [hi[0].max(1.0), hi[1].max(1.0)];
            }
            let pad = 0.05 * (hi[0] - lo[0]).max(hi[1] - lo[1]);
            let mut svg = Svg::new(lo[0] - pad, hi[0] + pad, lo[1] - pad, hi[1] + pad, 500.0);
            svg.comment(&header);
            if domain.is_unit_ball() {
                svg.circle(&EuclideanBall { center: Vector::zeros(2), radius: 1.0 }, "black", 0.7, false);
            }
            if let Some(ball) = exact {
                svg.circle(&ball, "gray", 3.0, false);
            }
            svg.polyline(&pts, "black", 1.5, false, true);
            svg.dot(&x, 3.0);
            svg.caption(&format!("S_{kind}(x, {}) in {domain}", fmt_num(a.r)));
            svg.finish()
        }
    };
    emit(out, a.output.as_ref(), &text)?;
    Ok(Outcome::Clean)
}

fn radii(a: RadiiArgs, out: &mut dyn Write) -> Result<Outcome> {
    let claim: ClaimId = a.claim.parse()?;
    let b = radii_for(claim, a.absx, a.r)?;
    writeln!(out, "# radii claim={claim} absx={} r={}", fmt_num(a.absx), fmt_num(a.r))?;
    writeln!(out, "inner_metric={}", claim.bracket_metric())?;
    writeln!(out, "middle_metric={}", claim.middle_metric())?;
    writeln!(out, "m={}", fmt_num(b.m))?;
    writeln!(out, "M={}", fmt_num(b.big_m))?;
    writeln!(out, "sharp={}", b.sharp)?;
    for (name, v) in &b.components {
        writeln!(out, "{name}={}", fmt_num(*v))?;
    }
    let v = &b.validity;
    for (name, val) in [("r0", v.r0), ("r1", v.r1), ("r2", v.r2)] {
        if let Some(val) = val {
            writeln!(out, "{name}={}", fmt_num(val))?;
        }
    }
    if let Some(i) = v.interval {
        writeln!(out, "interval={i:?}")?;
    } else if claim == ClaimId::JQJ {
        writeln!(out, "interval=none")?;
    }
    if let Some(inside) = v.outer_ball_inside {
        writeln!(out, "outer_ball_inside={inside}")?;
    }
    Ok(Outcome::Clean)
}

fn verify(a: VerifyArgs, out: &mut dyn Write) -> Result<Outcome> {
    let claims: Vec<ClaimId> = if a.all || a.claim.is_empty() {
        ClaimId::ALL.to_vec()
    } else {
        a.claim.iter().map(|c| c.parse()).collect::<Result<_>>()?
    };
    let specs: Vec<ClaimSpec> = claims
        .iter()
        .map(|&c| {
            let s = ClaimSpec::standard(c);
            ClaimSpec {
                n: a.n.unwrap_or(s.n),
                seed: a.seed,
                ..s
            }
        })
        .collect();
    let exec = if a.sequential { Execution::Sequential } else { Execution::Parallel };
    let opts = SampleOptions {
        seed: a.seed,
        exec,
        ..SampleOptions::default()
    };
    let report = VerificationReport::run(&specs, &opts, a.strict)?;
    let names: Vec<&str> = claims.iter().map(|c| c.name()).collect();
    let mut text = format!(
        "# verify claims={} n={} seed={} strict={} exec={exec}\n",
        names.join(","),
        a.n.map(|n| n.to_string()).unwrap_or_else(|| "default".into()),
        a.seed,
        a.strict
    );
    text.push_str(&report.to_text(a.timing));
    emit(out, a.output.as_ref(), &text)?;
    Ok(if report.has_failures() { Outcome::Violations } else { Outcome::Clean })
}

fn figures(a: FiguresArgs, out: &mut dyn Write) -> Result<Outcome> {
    let dir = a.out_dir.unwrap_or_else(default_out_dir);
    let figs = figure_set(&a.set)?;
    fs::create_dir_all(&dir)?;
    writeln!(out, "# figures set={} out_dir={}", a.set, dir.display())?;
    for (stem, svg) in figs {
        let path = dir.join(format!("{stem}.svg"));
        fs::write(&path, svg)?;
        writeln!(out, "{}", path.display())?;
    }
    Ok(Outcome::Clean)
}
