//! Hyperbolic-type metrics on the unit ball and related planar domains: the hyperbolic,
//! quasihyperbolic, distance-ratio and chordal metrics, Euclidean descriptions of their
//! balls, sharp ball-inclusion radii, and a sampling verifier for the inclusions.

pub mod ball_geometry;
pub mod cli;
pub mod error;
pub mod figures;
pub mod geometry;
pub mod metrics;
pub mod parallel;
pub mod quasihyperbolic;
pub mod radii;
pub mod verifier;

pub use error::{Error, Result};
pub use geometry::{ball_contains_ball, solve_radius_along_ray, Domain, EuclideanBall, RayOptions, UnitVector, Vector};
pub use metrics::{chordal, j_metric, metric_eval, rho_unit_ball, ExtendedPoint, Metric, MetricKind};
pub use parallel::Execution;
