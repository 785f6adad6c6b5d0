//! The singularity exponent at a transmission corner: the smallest root in
//! (0, 1) of
//!
//! ```text
//!   ( sin(eta (pi - a)) / sin(eta pi) )^2 = ( (gamma + 1)/(gamma - 1) )^2.
//! ```
//!
//! On (0, 1) the left ratio is positive, runs from ((pi-a)/pi)^2 < 1 to
//! +infinity, and the right side always exceeds 1, so a root exists; roots
//! of both sign branches of the square root are scanned and the smallest
//! is returned (the strongest singularity dominates as r -> 0).

use crate::{Error, Result};
use std::f64::consts::PI;

/// Scaled residual of the exponent equation at eta.
pub fn exponent_equation_residual(gamma: f64, opening: f64, eta: f64) -> f64 {
    let lhs = ((eta * (PI - opening)).sin() / (eta * PI).sin()).powi(2);
    let rhs = ((gamma + 1.0) / (gamma - 1.0)).powi(2);
    (lhs - rhs).abs()
}

/// Smallest exponent in (0, 1) for contrast `gamma` and corner opening
/// `opening`, by sign-bracketing bisection of both branches of the square
/// root.
pub fn singularity_exponent(gamma: f64, opening: f64) -> Result<f64> {
    if !(gamma > 0.0) || gamma == 1.0 {
        return Err(Error::Domain(format!(
            "exponent needs gamma > 0, gamma != 1; got {gamma}"
        )));
    }
    if !(opening > 0.0 && opening < PI) {
        return Err(Error::Domain(format!(
            "corner opening must lie in (0, pi); got {opening}"
        )));
    }
    let target = ((gamma + 1.0) / (gamma - 1.0)).abs();
    let ratio = |eta: f64| (eta * (PI - opening)).sin() / (eta * PI).sin();
    let mut best: Option<f64> = None;
    // scan both sign branches; the ratio is positive on (0,1) so only the
    // positive branch can bracket, but scanning both is cheap and keeps the
    // search free of sign assumptions
    for branch in [1.0f64, -1.0] {
        let g = |eta: f64| ratio(eta) - branch * target;
        let n = 4000;
        let lo_lim = 1e-9;
        let hi_lim = 1.0 - 1e-9;
        let mut prev = g(lo_lim);
        for i in 1..=n {
            let eta = lo_lim + (hi_lim - lo_lim) * i as f64 / n as f64;
            let val = g(eta);
            if prev == 0.0 || prev.signum() != val.signum() {
                let mut a = lo_lim + (hi_lim - lo_lim) * (i - 1) as f64 / n as f64;
                let mut b = eta;
                let mut fa = prev;
                for _ in 0..200 {
                    let mid = 0.5 * (a + b);
                    let fm = g(mid);
                    if fa.signum() == fm.signum() {
                        a = mid;
                        fa = fm;
                    } else {
                        b = mid;
                    }
                    if b - a < 1e-16 {
                        break;
                    }
                }
                let root = 0.5 * (a + b);
                if best.map(|r| root < r).unwrap_or(true) {
                    best = Some(root);
                }
            }
            prev = val;
        }
    }
    let eta = best.ok_or_else(|| {
        Error::NoRoot(format!(
            "no exponent in (0,1) for gamma={gamma}, opening={opening}"
        ))
    })?;
    let scale = ((gamma + 1.0) / (gamma - 1.0)).powi(2).max(1.0);
    let res = exponent_equation_residual(gamma, opening, eta);
    if res > 1e-10 * scale {
        return Err(Error::NoRoot(format!(
            "exponent root failed to converge: residual {res:.3e}"
        )));
    }
    Ok(eta)
}
