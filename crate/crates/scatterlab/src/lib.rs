//! Desk-scale laboratory for 2D transverse electromagnetic scattering by
//! penetrable convex-polygonal media.
//!
//! The crate solves the transmission problem
//!
//! ```text
//!   div(sigma grad u) + k^2 q u = 0   in R^2,   sigma = 1 + (gamma - 1) chi_D,
//! ```
//!
//! with the outgoing radiation condition, evaluates near fields and far-field
//! patterns, and provides the corner-singularity calculus (exponents,
//! angular profiles, singularity coefficients, complex-exponential probe
//! fields and contour integral identities) together with Herglotz wave
//! synthesis/recovery and a set of empirical sweep harnesses.
//!
//! Module map:
//! - [`geometry`]: polygons, convex hulls, Hausdorff distance, corner frames,
//!   contour sets with quadrature.
//! - [`specfun`]: Bessel J/Y, Hankel H1, Gamma.
//! - [`forward`]: boundary-integral transmission solver, field evaluation,
//!   far-field patterns, disk series oracle.
//! - [`corner`]: singularity exponent/profile, coefficient extraction,
//!   exponential probe fields, contour integral identities.
//! - [`herglotz`]: Herglotz waves, density recovery, disk transmission
//!   eigenvalues, Hoelder quotient probe.
//! - [`experiments`]: stability / corner-bound / smallness / blow-up sweeps.
//! - [`config`] and [`runner`]: declarative experiment configs and the CLI
//!   back end.

pub mod config;
pub mod corner;
pub mod experiments;
pub mod forward;
pub mod geometry;
pub mod herglotz;
pub mod quadrature;
pub mod runner;
pub mod specfun;

use thiserror::Error;

/// Tool version string, embedded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Crate-wide error type.
///
/// Variants map onto the CLI exit codes: config errors exit 2, solver errors
/// exit 3, contract/precondition violations exit 4.
#[derive(Debug, Error)]
pub enum Error {
    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(String),

    #[error("contract violation: {0}")]
    ContractViolation(String),

    #[error("precondition not met: {0}")]
    Precondition(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("range error: {0}")]
    Range(String),

    #[error("solver diagnostic: {msg} (condition estimate {cond_estimate:.3e}, residual {residual:.3e})")]
    Solver {
        msg: String,
        cond_estimate: f64,
        residual: f64,
    },

    #[error("parameter error: {0}")]
    Parameter(String),

    #[error("no root found: {0}")]
    NoRoot(String),

    #[error("config error:\n{}", .0.join("\n"))]
    Config(Vec<String>),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code for the CLI (`0` success, `2` config, `3` solver,
    /// `4` contract violation).
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Parameter(_) | Error::Json(_) => 2,
            Error::Solver { .. } | Error::NoRoot(_) => 3,
            Error::ContractViolation(_)
            | Error::Precondition(_)
            | Error::DegenerateGeometry(_)
            | Error::Domain(_)
            | Error::Range(_) => 4,
            Error::Io(_) => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
