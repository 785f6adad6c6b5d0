//! Assembly and solution of the combined boundary-integral transmission
//! system in the trace `f` and the interior normal derivative `g`.
//!
//! The two equations are the sums of the interior and exterior trace
//! identities and of the interior and exterior normal-derivative
//! identities; the hypersingular parts enter only as the difference of two
//! wavenumbers, leaving log-singular kernels throughout. Panel meshes use
//! plain product quadrature for well-separated pairs and adaptive
//! panel-local corrections otherwise; the smooth-curve path uses the
//! global trigonometric rule with dedicated weights for the log factor.

use super::kernels::{GeomPair, TransmissionKernels};
use super::mesh::{modal_matrix, BoundaryMesh, PanelMesh, SmoothMesh};
use super::{IncidentField, Scatterer};
use crate::quadrature::{adaptive_vector, legendre_values};
use crate::{Error, Result};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;

/// Tunables of the discretization.
#[derive(Debug, Clone)]
pub struct SolveOptions {
    /// Panels closer than `near_factor * panel_length` get adaptive
    /// corrections.
    pub near_factor: f64,
    /// Absolute tolerance of the adaptive panel corrections in assembly.
    pub adaptive_tol: f64,
    /// Tolerance of the near-panel corrections in field evaluation (looser
    /// than assembly; evaluation error is budgeted downstream).
    pub eval_adaptive_tol: f64,
    pub adaptive_depth: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            near_factor: 1.2,
            adaptive_tol: 1e-11,
            eval_adaptive_tol: 1e-9,
            adaptive_depth: 40,
        }
    }
}

/// Solver health report stored with every solution.
#[derive(Debug, Clone, Serialize)]
pub struct SolverDiagnostics {
    pub system_size: usize,
    pub residual: f64,
    pub cond_estimate: f64,
    pub nodes_per_wavelength: f64,
}

/// Solved boundary data for one scatterer/incident pair.
#[derive(Debug, Clone)]
pub struct FieldSolution {
    pub scatterer: Scatterer,
    pub incident: IncidentField,
    pub mesh: BoundaryMesh,
    /// Boundary trace of the total field.
    pub trace: Vec<Complex64>,
    /// Interior normal derivative; the exterior one is gamma times this.
    pub normal_deriv_int: Vec<Complex64>,
    /// Exterior representation densities: w = f - u_inc, psi = gamma g -
    /// dn u_inc (cached at solve time).
    pub density_w: Vec<Complex64>,
    pub density_psi: Vec<Complex64>,
    pub diagnostics: SolverDiagnostics,
    pub vacuum: bool,
    pub options: SolveOptions,
}

/// Solve the transmission problem. The vacuum shortcut (`gamma = q = 1`)
/// bypasses the linear algebra: the total field is the incident field.
pub fn solve_scattering(
    scatterer: &Scatterer,
    incident: &IncidentField,
    mesh: &BoundaryMesh,
    options: &SolveOptions,
) -> Result<FieldSolution> {
    let k = incident.wavenumber();
    let n = mesh.len();
    let nodes = mesh.nodes();
    let normals = mesh.normals();

    let u_inc: Vec<Complex64> = nodes.iter().map(|&p| incident.value(p)).collect();
    let dn_inc: Vec<Complex64> = nodes
        .iter()
        .zip(normals)
        .map(|(&p, &nu)| incident.normal_derivative(p, nu))
        .collect();

    let perimeter: f64 = mesh.weights().iter().sum();
    let npw = n as f64 / (perimeter * k / (2.0 * PI));

    if scatterer.is_vacuum() {
        let trace = u_inc.clone();
        let g = dn_inc.clone();
        return Ok(FieldSolution {
            scatterer: scatterer.clone(),
            incident: incident.clone(),
            mesh: mesh.clone(),
            density_w: vec![Complex64::new(0.0, 0.0); n],
            density_psi: vec![Complex64::new(0.0, 0.0); n],
            trace,
            normal_deriv_int: g,
            diagnostics: SolverDiagnostics {
                system_size: 0,
                residual: 0.0,
                cond_estimate: 1.0,
                nodes_per_wavelength: npw,
            },
            vacuum: true,
            options: options.clone(),
        });
    }

    let kers = TransmissionKernels {
        k_ext: k,
        k_int: scatterer.interior_wavenumber(k),
        gamma: scatterer.gamma,
    };

    let a = match mesh {
        BoundaryMesh::Panels(m) => assemble_panel_system(m, &kers, options),
        BoundaryMesh::Smooth(m) => assemble_smooth_system(m, &kers),
    };

    let mut rhs = DVector::from_element(2 * n, Complex64::new(0.0, 0.0));
    for i in 0..n {
        rhs[i] = u_inc[i];
        rhs[n + i] = dn_inc[i];
    }

    let lu = a.clone().lu();
    let sol = lu.solve(&rhs).ok_or_else(|| Error::Solver {
        msg: "transmission system is numerically singular".into(),
        cond_estimate: f64::INFINITY,
        residual: f64::INFINITY,
    })?;

    let residual = {
        let r = &a * &sol - &rhs;
        r.norm() / rhs.norm().max(1e-300)
    };
    let cond_estimate = condition_estimate(&a, &lu);
    if residual > 1e-8 {
        return Err(Error::Solver {
            msg: "linear solve residual too large (near-singular system?)".into(),
            cond_estimate,
            residual,
        });
    }

    let trace: Vec<Complex64> = (0..n).map(|i| sol[i]).collect();
    let g: Vec<Complex64> = (0..n).map(|i| sol[n + i]).collect();
    let density_w: Vec<Complex64> = (0..n).map(|i| trace[i] - u_inc[i]).collect();
    let density_psi: Vec<Complex64> = (0..n)
        .map(|i| scatterer.gamma * g[i] - dn_inc[i])
        .collect();

    Ok(FieldSolution {
        scatterer: scatterer.clone(),
        incident: incident.clone(),
        mesh: mesh.clone(),
        trace,
        normal_deriv_int: g,
        density_w,
        density_psi,
        diagnostics: SolverDiagnostics {
            system_size: 2 * n,
            residual,
            cond_estimate,
            nodes_per_wavelength: npw,
        },
        vacuum: false,
        options: options.clone(),
    })
}

/// Crude lower estimate of the 1-norm condition number from a few solves
/// with deterministic probe vectors.
fn condition_estimate(a: &DMatrix<Complex64>, lu: &nalgebra::LU<Complex64, nalgebra::Dyn, nalgebra::Dyn>) -> f64 {
    let n = a.nrows();
    let norm_a = (0..n)
        .map(|j| a.column(j).iter().map(|v| v.norm()).sum::<f64>())
        .fold(0.0, f64::max);
    let mut inv_norm: f64 = 0.0;
    let mut state = 0x12345678u64;
    for _ in 0..3 {
        let mut v = DVector::from_element(n, Complex64::new(0.0, 0.0));
        for x in v.iter_mut() {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            *x = Complex64::new(if state >> 63 == 0 { 1.0 } else { -1.0 }, 0.0);
        }
        if let Some(y) = lu.solve(&v) {
            let y1: f64 = y.iter().map(|c| c.norm()).sum();
            let v1: f64 = v.iter().map(|c| c.norm()).sum();
            inv_norm = inv_norm.max(y1 / v1);
        }
    }
    norm_a * inv_norm
}

/// Panel-mesh assembly with adaptive near corrections.
fn assemble_panel_system(
    mesh: &PanelMesh,
    kers: &TransmissionKernels,
    options: &SolveOptions,
) -> DMatrix<Complex64> {
    let n = mesh.nodes.len();
    let p = mesh.gauss;
    let modal = modal_matrix(p);
    let rows: Vec<(Vec<Complex64>, Vec<Complex64>)> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut row1 = vec![Complex64::new(0.0, 0.0); 2 * n];
            let mut row2 = vec![Complex64::new(0.0, 0.0); 2 * n];
            let x = mesh.nodes[i];
            let nx = mesh.normals[i];
            let own_panel = mesh.node_panel[i];
            for (pi, pan) in mesh.panels.iter().enumerate() {
                let near = pi == own_panel
                    || pan.distance_to(x) <= options.near_factor * pan.length();
                if !near {
                    for j in 0..pan.n_nodes {
                        let idx = pan.first_node + j;
                        let y = mesh.nodes[idx];
                        let ny = mesh.normals[idx];
                        let same_line = pan.edge_id == mesh.panels[own_panel].edge_id;
                        let geom = if same_line {
                            GeomPair::same_line((x - y).norm())
                        } else {
                            GeomPair::generic(x, nx, y, ny)
                        };
                        let ks = kers.all_rows(&geom);
                        let w = mesh.weights[idx];
                        let lr = geom.r.ln();
                        row1[idx] += w * (ks[0].b + ks[0].a * lr);
                        row1[n + idx] += w * (ks[1].b + ks[1].a * lr);
                        row2[idx] += w * (ks[2].b + ks[2].a * lr);
                        row2[n + idx] += w * (ks[3].b + ks[3].a * lr);
                    }
                } else {
                    // adaptive correction: integrate the four kernels times
                    // the Legendre basis over the panel
                    let jac = 0.5 * pan.length();
                    let ny = mesh.normals[pan.first_node];
                    let same_line = pan.edge_id == mesh.panels[own_panel].edge_id;
                    let dim = 4 * p;
                    let mut lbuf = vec![0.0; p];
                    let mut f = |u: f64, out: &mut [Complex64]| {
                        let y = pan.point_at(u);
                        let r = (x - y).norm().max(1e-300);
                        let geom = if same_line {
                            GeomPair::same_line(r)
                        } else {
                            GeomPair::generic(x, nx, y, ny)
                        };
                        let ks = kers.all_rows(&geom);
                        let lr = r.ln();
                        legendre_values(p - 1, u, &mut lbuf);
                        for m in 0..p {
                            let lm = lbuf[m] * jac;
                            out[4 * m] = (ks[0].b + ks[0].a * lr) * lm;
                            out[4 * m + 1] = (ks[1].b + ks[1].a * lr) * lm;
                            out[4 * m + 2] = (ks[2].b + ks[2].a * lr) * lm;
                            out[4 * m + 3] = (ks[3].b + ks[3].a * lr) * lm;
                        }
                    };
                    // split at the parameter nearest the target
                    let mut splits = vec![-1.0, 1.0];
                    if pi == own_panel {
                        splits.push(mesh.node_param[i]);
                    } else {
                        let dir = (pan.b - pan.a) / pan.length();
                        let t = (x - pan.a).dot(&dir) / pan.length();
                        if t > 0.0 && t < 1.0 {
                            splits.push(2.0 * t - 1.0);
                        }
                    }
                    splits.sort_by(|a, b| a.partial_cmp(b).unwrap());
                    let mut c = vec![Complex64::new(0.0, 0.0); dim];
                    for w in splits.windows(2) {
                        if w[1] - w[0] < 1e-14 {
                            continue;
                        }
                        let part = adaptive_vector(
                            w[0],
                            w[1],
                            dim,
                            options.adaptive_tol,
                            options.adaptive_depth,
                            &mut f,
                        );
                        for (acc, v) in c.iter_mut().zip(&part) {
                            *acc += v;
                        }
                    }
                    // convert the modal integrals into nodal row weights
                    for j in 0..p {
                        let idx = pan.first_node + j;
                        let mut w1f = Complex64::new(0.0, 0.0);
                        let mut w1g = Complex64::new(0.0, 0.0);
                        let mut w2f = Complex64::new(0.0, 0.0);
                        let mut w2g = Complex64::new(0.0, 0.0);
                        for m in 0..p {
                            let mm = modal[m][j];
                            w1f += mm * c[4 * m];
                            w1g += mm * c[4 * m + 1];
                            w2f += mm * c[4 * m + 2];
                            w2g += mm * c[4 * m + 3];
                        }
                        row1[idx] += w1f;
                        row1[n + idx] += w1g;
                        row2[idx] += w2f;
                        row2[n + idx] += w2g;
                    }
                }
            }
            row1[i] += Complex64::new(1.0, 0.0);
            row2[n + i] += Complex64::new(0.5 * (kers.gamma + 1.0), 0.0);
            (row1, row2)
        })
        .collect();

    let mut a = DMatrix::from_element(2 * n, 2 * n, Complex64::new(0.0, 0.0));
    for (i, (row1, row2)) in rows.into_iter().enumerate() {
        for j in 0..2 * n {
            a[(i, j)] = row1[j];
            a[(n + i, j)] = row2[j];
        }
    }
    a
}

/// Quadrature weights for the periodic log factor ln(4 sin^2((t-s)/2)) on
/// an even uniform grid; returns the weight as a function of the index
/// offset.
pub fn log_rule_weights(n: usize) -> Vec<f64> {
    assert!(n % 2 == 0);
    let half = n / 2;
    let mut r = vec![0.0; n];
    for (d, rd) in r.iter_mut().enumerate() {
        let delta = 2.0 * PI * d as f64 / n as f64;
        let mut acc = 0.0;
        for m in 1..half {
            acc += (m as f64 * delta).cos() / m as f64;
        }
        *rd = -4.0 * PI / n as f64 * acc - 4.0 * PI / (n * n) as f64 * (half as f64 * delta).cos();
    }
    r
}

/// Smooth-curve (circle) assembly with the trigonometric log rule. On a
/// circle the chord/parameter ratio r / (2 sin(|dt|/2)) equals the radius
/// exactly, which keeps the regular part of every kernel closed-form.
fn assemble_smooth_system(mesh: &SmoothMesh, kers: &TransmissionKernels) -> DMatrix<Complex64> {
    let n = mesh.n;
    let radius = mesh.radius;
    let rlog = log_rule_weights(n);
    let wtrap = 2.0 * PI / n as f64;
    let mut a = DMatrix::from_element(2 * n, 2 * n, Complex64::new(0.0, 0.0));
    let ln_rad = radius.ln();
    for i in 0..n {
        for j in 0..n {
            let d = (i + n - j) % n;
            let delta = 2.0 * PI * d as f64 / n as f64;
            let r = 2.0 * radius * (0.5 * delta).sin().abs();
            let geom = GeomPair::same_circle(r, radius);
            let ks = kers.all_rows(&geom);
            for (kidx, split) in ks.iter().enumerate() {
                // kernel = a ln r + b, ln r = 0.5 ln(4 sin^2) + ln radius
                let m1 = 0.5 * split.a * radius;
                let m2 = (split.b + split.a * ln_rad) * radius;
                let entry = rlog[d] * m1 + wtrap * m2;
                match kidx {
                    0 => a[(i, j)] += entry,
                    1 => a[(i, n + j)] += entry,
                    2 => a[(n + i, j)] += entry,
                    _ => a[(n + i, n + j)] += entry,
                }
            }
        }
        a[(i, i)] += Complex64::new(1.0, 0.0);
        a[(n + i, n + i)] += Complex64::new(0.5 * (kers.gamma + 1.0), 0.0);
    }
    a
}
