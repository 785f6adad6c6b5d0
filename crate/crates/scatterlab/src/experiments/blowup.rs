//! Herglotz density blow-up probe: misfit-versus-norm curves for a
//! regular target (a genuine Herglotz wave) and a corner-singular target
//! (smooth part plus the model term r^eta phi), compared at matched
//! misfit.

use super::SweepContext;
use crate::corner::SingularityData;
use crate::geometry::{CornerFrame, Polygon};
use crate::herglotz::{H1Grid, HerglotzDensity, HerglotzFitter};
use crate::Result;
use num_complex::Complex64;
use serde::Serialize;

/// One point of a blow-up curve.
#[derive(Debug, Clone, Serialize)]
pub struct BlowupPoint {
    pub lambda: f64,
    pub epsilon: f64,
    pub density_norm: f64,
}

/// Target and sweep description.
#[derive(Debug, Clone)]
pub struct BlowupSpec {
    /// Domain polygon and the corner of the singular target.
    pub domain: Polygon,
    pub corner_index: usize,
    /// Contrast pinning the exponent at the corner.
    pub gamma: f64,
    pub k: f64,
    /// Geometric regularization grid.
    pub lambdas: Vec<f64>,
    /// H1 grid resolution across the domain.
    pub grid_across: usize,
    /// Direction count of the recovered densities.
    pub directions: usize,
    /// Singular coefficient: 0 for the regular case, 1 for the singular.
    pub coefficient: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct BlowupSummary {
    pub regular: Vec<BlowupPoint>,
    pub singular: Vec<BlowupPoint>,
    /// Densities recovered at the weakest regularization of the grid.
    pub final_regular_density: HerglotzDensity,
    pub final_singular_density: HerglotzDensity,
    pub eta: f64,
    /// Regular-curve norms bounded by twice the synthesizing density norm.
    pub regular_bounded: bool,
    pub synthesizing_norm: f64,
    /// Singular norms non-decreasing as the misfit decreases.
    pub singular_monotone: bool,
    /// Singular norm >= regular norm at matched misfit on every grid point.
    pub dominates_at_matched_misfit: bool,
}

/// The smooth synthesizing density of the regular target (three modes).
pub fn smooth_density(m: usize) -> Result<HerglotzDensity> {
    HerglotzDensity::from_fn(m, |th| {
        Complex64::new(1.0, 0.0)
            + 0.5 * Complex64::new(th.cos(), th.sin())
            + 0.25 * Complex64::new((2.0 * th).cos(), -(2.0 * th).sin())
    })
}

/// Piecewise-linear interpolation of the regular curve's norm at a given
/// misfit (log-misfit abscissa, endpoint extension beyond the range).
fn norm_at_misfit(curve: &[BlowupPoint], eps: f64) -> f64 {
    // curve ordered by decreasing epsilon (lambda decreasing)
    let mut pts: Vec<(f64, f64)> = curve
        .iter()
        .filter(|p| p.epsilon > 0.0)
        .map(|p| (p.epsilon.ln(), p.density_norm))
        .collect();
    pts.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let x = eps.max(1e-300).ln();
    if pts.is_empty() {
        return 0.0;
    }
    if x <= pts[0].0 {
        return pts[0].1;
    }
    if x >= pts[pts.len() - 1].0 {
        return pts[pts.len() - 1].1;
    }
    for w in pts.windows(2) {
        if x >= w[0].0 && x <= w[1].0 {
            let t = (x - w[0].0) / (w[1].0 - w[0].0).max(1e-300);
            return w[0].1 + t * (w[1].1 - w[0].1);
        }
    }
    pts[pts.len() - 1].1
}

fn sweep_curve(
    fitter: &HerglotzFitter,
    lambdas: &[f64],
) -> Result<Vec<BlowupPoint>> {
    let mut out = Vec::new();
    for &l in lambdas {
        let fit = fitter.solve(l, None)?;
        out.push(BlowupPoint {
            lambda: l,
            epsilon: fit.misfit,
            density_norm: fit.density_norm,
        });
    }
    Ok(out)
}

/// Run both the regular and the singular case of the blow-up probe and
/// compare at matched misfit.
pub fn run_herglotz_blowup(spec: &BlowupSpec, _ctx: &SweepContext) -> Result<BlowupSummary> {
    let grid = H1Grid::new(&spec.domain, spec.grid_across)?;
    let g0 = smooth_density(spec.directions)?;
    let frame = CornerFrame::build(
        &spec.domain,
        &spec.domain,
        spec.domain.vertex(spec.corner_index),
    )?;
    let sd = SingularityData::for_frame(spec.gamma, &frame, &spec.domain)?;

    let regular_target: Vec<Complex64> = grid
        .points
        .iter()
        .map(|&p| g0.wave_at(spec.k, p))
        .collect();
    let singular_target: Vec<Complex64> = grid
        .points
        .iter()
        .map(|&p| {
            g0.wave_at(spec.k, p)
                + spec.coefficient * Complex64::new(sd.singular_field(&frame, p), 0.0)
        })
        .collect();

    let reg_fitter = HerglotzFitter::new(grid.clone(), spec.k, spec.directions, &regular_target)?;
    let sing_fitter =
        HerglotzFitter::new(grid.clone(), spec.k, spec.directions, &singular_target)?;
    let regular = sweep_curve(&reg_fitter, &spec.lambdas)?;
    let singular = sweep_curve(&sing_fitter, &spec.lambdas)?;
    let lambda_last = spec.lambdas.iter().cloned().fold(f64::MAX, f64::min);
    let final_regular_density = reg_fitter.solve(lambda_last, None)?.density;
    let final_singular_density = sing_fitter.solve(lambda_last, None)?.density;

    // matching curve: extend the regular sweep toward weaker regularization
    // so every singular misfit lies inside the interpolation range (the
    // singular misfits stagnate well above the regular ones)
    let lambda_max = spec.lambdas.iter().cloned().fold(0.0f64, f64::max);
    let mut match_lambdas = spec.lambdas.clone();
    for extra in [10.0, 100.0, 1000.0, 10000.0] {
        match_lambdas.push(lambda_max * extra);
    }
    let regular_match = sweep_curve(&reg_fitter, &match_lambdas)?;

    let g0_norm = g0.l2_norm();
    let regular_bounded = regular.iter().all(|p| p.density_norm <= 2.0 * g0_norm);
    let mut singular_monotone = true;
    for w in singular.windows(2) {
        // lambda decreases along the grid: misfit must not increase and
        // the norm must not decrease
        if w[1].epsilon > w[0].epsilon * (1.0 + 1e-9)
            || w[1].density_norm < w[0].density_norm * (1.0 - 1e-9)
        {
            singular_monotone = false;
        }
    }
    let dominates = singular
        .iter()
        .all(|p| p.density_norm >= norm_at_misfit(&regular_match, p.epsilon) * (1.0 - 1e-9));
    Ok(BlowupSummary {
        regular,
        singular,
        final_regular_density,
        final_singular_density,
        eta: sd.eta,
        regular_bounded,
        synthesizing_norm: g0_norm,
        singular_monotone,
        dominates_at_matched_misfit: dominates,
    })
}
