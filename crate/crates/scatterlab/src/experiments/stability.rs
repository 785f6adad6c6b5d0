//! Far-field stability sweep: how the far-field distance grows with the
//! Hausdorff distance over a family of shape perturbations, and the
//! empirical exponent of the double-log law.

use super::{
    calibrate_floor, corner_coefficients, delta_axis, fit_slope, spearman, FloorCalibration,
    SweepContext,
};
use crate::forward::{far_field, farfield_l2_distance, solve_scattering, BoundaryMesh, Scatterer, Support};
use crate::forward::IncidentField;
use crate::geometry::{hausdorff_distance, Polygon, Vec2};
use crate::Result;
use serde::Serialize;

/// One sweep point: a perturbed polygon against the base.
#[derive(Debug, Clone, Serialize)]
pub struct StabilityRecord {
    pub index: usize,
    pub hausdorff: f64,
    pub epsilon: f64,
    /// Smallest |K| over the vertices of both polygons.
    pub k_min: f64,
    pub amplitude: f64,
    /// (ln ln (S/eps))^(-eta_m), None below the domain guard.
    pub delta_axis: Option<f64>,
    pub solver_residual: f64,
    pub failed: bool,
    pub note: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct StabilitySummary {
    pub records: Vec<StabilityRecord>,
    /// Spearman rank correlation between d_H and epsilon.
    pub spearman_dh_eps: f64,
    /// Fitted exponent of ln d_H against -ln ln ln (S/eps).
    pub beta: f64,
    pub eta_min: f64,
    pub floor: FloorCalibration,
    pub amplitude: f64,
}

/// Run the sweep: solve the base polygon once, then every translate, and
/// regress the double-log law. Solver failures mark their record and the
/// sweep continues.
pub fn run_stability_sweep(
    base: &Polygon,
    gamma: f64,
    q: f64,
    incident: &IncidentField,
    translations: &[Vec2],
    ctx: &SweepContext,
) -> Result<StabilitySummary> {
    let k = incident.wavenumber();
    let scat = Scatterer::new(Support::Polygon(base.clone()), gamma, q, &ctx.admissibility)?;
    let floor = calibrate_floor(&scat, incident, ctx)?;
    let amplitude = incident.amplitude_surrogate(ctx.admissibility.radius, ctx.amplitude_grid);

    let base_mesh = BoundaryMesh::polygon(base, k, &ctx.mesh)?;
    let base_sol = solve_scattering(&scat, incident, &base_mesh, &ctx.solve)?;
    let base_ff = far_field(&base_sol, ctx.farfield_angles)?;
    let base_corners = corner_coefficients(&base_sol, gamma)?;
    let eta_min = base_corners
        .iter()
        .map(|c| c.1)
        .fold(f64::MAX, f64::min);

    let mut records = Vec::new();
    for (index, &t) in translations.iter().enumerate() {
        let poly = base.translate(t);
        let run = (|| -> Result<StabilityRecord> {
            let s = Scatterer::new(Support::Polygon(poly.clone()), gamma, q, &ctx.admissibility)?;
            let mesh = BoundaryMesh::polygon(&poly, k, &ctx.mesh)?;
            let sol = solve_scattering(&s, incident, &mesh, &ctx.solve)?;
            let ff = far_field(&sol, ctx.farfield_angles)?;
            let epsilon = farfield_l2_distance(&ff, &base_ff)?;
            let dh = hausdorff_distance(base, &poly)?;
            let corners = corner_coefficients(&sol, gamma)?;
            let k_min = base_corners
                .iter()
                .chain(&corners)
                .map(|c| c.2)
                .fold(f64::MAX, f64::min);
            Ok(StabilityRecord {
                index,
                hausdorff: dh,
                epsilon,
                k_min,
                amplitude,
                delta_axis: delta_axis(amplitude, epsilon, eta_min),
                solver_residual: sol.diagnostics.residual,
                failed: false,
                note: String::new(),
            })
        })();
        match run {
            Ok(rec) => records.push(rec),
            Err(e) => records.push(StabilityRecord {
                index,
                hausdorff: f64::NAN,
                epsilon: f64::NAN,
                k_min: f64::NAN,
                amplitude,
                delta_axis: None,
                solver_residual: f64::NAN,
                failed: true,
                note: e.to_string(),
            }),
        }
    }

    let good: Vec<&StabilityRecord> = records.iter().filter(|r| !r.failed).collect();
    let dh: Vec<f64> = good.iter().map(|r| r.hausdorff).collect();
    let eps: Vec<f64> = good.iter().map(|r| r.epsilon).collect();
    let spearman_dh_eps = spearman(&dh, &eps);

    // beta: ln d_H ~ beta * ln( (ln ln S/eps)^{-1} ) + c over guarded points
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for r in &good {
        if let Some(da) = r.delta_axis {
            if r.hausdorff > 0.0 {
                // delta_axis = (ln ln S/eps)^{-eta_min}; rescale to the
                // plain inverse double-log
                xs.push(da.powf(1.0 / eta_min).ln());
                ys.push(r.hausdorff.ln());
            }
        }
    }
    let beta = fit_slope(&xs, &ys);

    Ok(StabilitySummary {
        records,
        spearman_dh_eps,
        beta,
        eta_min,
        floor,
        amplitude,
    })
}
