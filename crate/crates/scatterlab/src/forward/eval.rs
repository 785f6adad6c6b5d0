//! Near-field evaluation of solved transmission problems via the interior
//! and exterior Green representations, with adaptive panel corrections for
//! points close to the boundary. Values, gradients and fused
//! value+gradient evaluation share one correction machinery.

use super::kernels::{dlp_gradient, dlp_value, fundamental, slp_gradient};
use super::mesh::{modal_matrix, BoundaryMesh, PanelMesh};
use super::solve::FieldSolution;
use super::Vec2;
use crate::quadrature::{adaptive_vector, legendre_values};
use crate::Result;
use num_complex::Complex64;
use rayon::prelude::*;

/// One evaluated field value; `warn` marks points closer to the boundary
/// than one local mesh spacing (accuracy degraded).
#[derive(Debug, Clone, Copy)]
pub struct FieldSample {
    pub value: Complex64,
    pub warn: bool,
}

/// Kernel components per source node in a near-panel correction row.
#[derive(Clone, Copy, PartialEq)]
enum RowMode {
    Value,
    Gradient,
    Both,
}

impl RowMode {
    fn dim(self) -> usize {
        match self {
            RowMode::Value => 2,
            RowMode::Gradient => 4,
            RowMode::Both => 6,
        }
    }
}

impl FieldSolution {
    /// Total field at the given points: incident + scattered outside D,
    /// interior field inside D.
    pub fn evaluate(&self, points: &[Vec2]) -> Vec<FieldSample> {
        points.par_iter().map(|&p| self.evaluate_one(p)).collect()
    }

    /// Gradients at many points (parallel).
    pub fn gradients(&self, points: &[Vec2]) -> Vec<([Complex64; 2], bool)> {
        points.par_iter().map(|&p| self.gradient_one(p)).collect()
    }

    /// Fused value + gradient at many points (parallel; one adaptive pass
    /// per near panel).
    pub fn values_and_gradients(&self, points: &[Vec2]) -> Vec<(Complex64, [Complex64; 2], bool)> {
        points
            .par_iter()
            .map(|&p| self.value_and_gradient_one(p))
            .collect()
    }

    pub fn evaluate_one(&self, p: Vec2) -> FieldSample {
        if self.vacuum {
            return FieldSample {
                value: self.incident.value(p),
                warn: false,
            };
        }
        let (value, _, warn) = self.combined_eval(p, RowMode::Value);
        FieldSample { value, warn }
    }

    /// Gradient of the total field at a point, with the same adaptive
    /// near-panel corrections as the value evaluation.
    pub fn gradient_one(&self, p: Vec2) -> ([Complex64; 2], bool) {
        if self.vacuum {
            return (self.incident.gradient(p), false);
        }
        let (_, g, warn) = self.combined_eval(p, RowMode::Gradient);
        (g, warn)
    }

    pub fn value_and_gradient_one(&self, p: Vec2) -> (Complex64, [Complex64; 2], bool) {
        if self.vacuum {
            return (self.incident.value(p), self.incident.gradient(p), false);
        }
        self.combined_eval(p, RowMode::Both)
    }

    /// Representation dispatch: interior S_i[g] - K_i[f]; exterior
    /// u_inc + K_e[w] - S_e[psi].
    fn combined_eval(&self, p: Vec2, mode: RowMode) -> (Complex64, [Complex64; 2], bool) {
        let warn = self.mesh.distance_to_boundary(p) < self.mesh.local_spacing(p);
        let inside = self.scatterer.support.contains(p);
        let k = self.incident.wavenumber();
        let (kappa, dens_s, sign_s, dens_d, sign_d, inc_v, inc_g) = if inside {
            (
                self.scatterer.interior_wavenumber(k),
                &self.normal_deriv_int,
                1.0,
                &self.trace,
                -1.0,
                Complex64::new(0.0, 0.0),
                [Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)],
            )
        } else {
            (
                k,
                &self.density_psi,
                -1.0,
                &self.density_w,
                1.0,
                self.incident.value(p),
                self.incident.gradient(p),
            )
        };
        let (mut v, mut g) = self.layer_eval(p, kappa, dens_s, sign_s, dens_d, sign_d, mode);
        v += inc_v;
        g[0] += inc_g[0];
        g[1] += inc_g[1];
        (v, g, warn)
    }

    /// sign_s * S[dens_s] + sign_d * K[dens_d] and/or its gradient.
    fn layer_eval(
        &self,
        p: Vec2,
        kappa: f64,
        dens_s: &[Complex64],
        sign_s: f64,
        dens_d: &[Complex64],
        sign_d: f64,
        mode: RowMode,
    ) -> (Complex64, [Complex64; 2]) {
        let zero = Complex64::new(0.0, 0.0);
        let mut val = zero;
        let mut grad = [zero, zero];
        let want_v = mode != RowMode::Gradient;
        let want_g = mode != RowMode::Value;
        match &self.mesh {
            BoundaryMesh::Smooth(m) => {
                for j in 0..m.n {
                    let d = p - m.nodes[j];
                    let r = d.norm();
                    let e = d / r;
                    let w = m.weights[j];
                    if want_v {
                        val += w
                            * (sign_s * fundamental(kappa, r) * dens_s[j]
                                + sign_d * dlp_value(kappa, r, e.dot(&m.normals[j])) * dens_d[j]);
                    }
                    if want_g {
                        let gs = slp_gradient(kappa, r, e);
                        let gd = dlp_gradient(kappa, r, e, m.normals[j]);
                        grad[0] += w * (sign_s * gs[0] * dens_s[j] + sign_d * gd[0] * dens_d[j]);
                        grad[1] += w * (sign_s * gs[1] * dens_s[j] + sign_d * gd[1] * dens_d[j]);
                    }
                }
            }
            BoundaryMesh::Panels(mesh) => {
                for (pi, pan) in mesh.panels.iter().enumerate() {
                    if pan.distance_to(p) > self.options.near_factor * pan.length() {
                        for j in 0..pan.n_nodes {
                            let idx = pan.first_node + j;
                            let d = p - mesh.nodes[idx];
                            let r = d.norm();
                            let e = d / r;
                            let w = mesh.weights[idx];
                            if want_v {
                                val += w
                                    * (sign_s * fundamental(kappa, r) * dens_s[idx]
                                        + sign_d
                                            * dlp_value(kappa, r, e.dot(&mesh.normals[idx]))
                                            * dens_d[idx]);
                            }
                            if want_g {
                                let gs = slp_gradient(kappa, r, e);
                                let gd = dlp_gradient(kappa, r, e, mesh.normals[idx]);
                                grad[0] += w
                                    * (sign_s * gs[0] * dens_s[idx] + sign_d * gd[0] * dens_d[idx]);
                                grad[1] += w
                                    * (sign_s * gs[1] * dens_s[idx] + sign_d * gd[1] * dens_d[idx]);
                            }
                        }
                    } else {
                        let rows = self.panel_rows(mesh, pi, p, kappa, mode);
                        for j in 0..pan.n_nodes {
                            let idx = pan.first_node + j;
                            if want_v {
                                val += sign_s * rows[0][j] * dens_s[idx]
                                    + sign_d * rows[1][j] * dens_d[idx];
                            }
                            if want_g {
                                let off = if want_v { 2 } else { 0 };
                                grad[0] += sign_s * rows[off][j] * dens_s[idx]
                                    + sign_d * rows[off + 2][j] * dens_d[idx];
                                grad[1] += sign_s * rows[off + 1][j] * dens_s[idx]
                                    + sign_d * rows[off + 3][j] * dens_d[idx];
                            }
                        }
                    }
                }
            }
        }
        (val, grad)
    }

    /// Corrected quadrature rows on one panel for a target close to it.
    /// Row layout by mode: Value -> [S, K]; Gradient -> [dSx, dSy, dKx,
    /// dKy]; Both -> [S, K, dSx, dSy, dKx, dKy].
    fn panel_rows(
        &self,
        mesh: &PanelMesh,
        pi: usize,
        p: Vec2,
        kappa: f64,
        mode: RowMode,
    ) -> Vec<Vec<Complex64>> {
        let pan = &mesh.panels[pi];
        let np = pan.n_nodes;
        let jac = 0.5 * pan.length();
        let ny = mesh.normals[pan.first_node];
        let nk = mode.dim();
        let dim = nk * np;
        let mut lbuf = vec![0.0; np];
        let mut f = |u: f64, out: &mut [Complex64]| {
            let y = pan.point_at(u);
            let d = p - y;
            let r = d.norm().max(1e-300);
            let e = d / r;
            legendre_values(np - 1, u, &mut lbuf);
            let mut vals = [Complex64::new(0.0, 0.0); 6];
            let mut c = 0;
            if mode != RowMode::Gradient {
                vals[c] = fundamental(kappa, r);
                vals[c + 1] = dlp_value(kappa, r, e.dot(&ny));
                c += 2;
            }
            if mode != RowMode::Value {
                let gs = slp_gradient(kappa, r, e);
                let gd = dlp_gradient(kappa, r, e, ny);
                vals[c] = gs[0];
                vals[c + 1] = gs[1];
                vals[c + 2] = gd[0];
                vals[c + 3] = gd[1];
            }
            for m in 0..np {
                let lm = lbuf[m] * jac;
                for ki in 0..nk {
                    out[nk * m + ki] = vals[ki] * lm;
                }
            }
        };
        let mut splits = vec![-1.0, 1.0];
        let dir = (pan.b - pan.a) / pan.length();
        let t = (p - pan.a).dot(&dir) / pan.length();
        if t > 0.0 && t < 1.0 {
            splits.push(2.0 * t - 1.0);
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
                self.options.eval_adaptive_tol,
                self.options.adaptive_depth,
                &mut f,
            );
            for (acc, v) in c.iter_mut().zip(&part) {
                *acc += v;
            }
        }
        let modal = modal_matrix(np);
        let mut rows = vec![vec![Complex64::new(0.0, 0.0); np]; nk];
        for j in 0..np {
            for m in 0..np {
                let mm = modal[m][j];
                for (ki, row) in rows.iter_mut().enumerate() {
                    row[j] += mm * c[nk * m + ki];
                }
            }
        }
        rows
    }

    /// Interpolated boundary trace at arclength `s` along polygon edge
    /// `edge_id`.
    pub fn trace_on_edge(&self, edge_id: usize, s: f64) -> Result<Complex64> {
        match &self.mesh {
            BoundaryMesh::Panels(m) => m.density_on_edge(edge_id, s, &self.trace),
            BoundaryMesh::Smooth(_) => Err(crate::Error::ContractViolation(
                "edge traces need a panel mesh".into(),
            )),
        }
    }

    /// Interpolated interior normal derivative at arclength `s` along edge
    /// `edge_id`.
    pub fn normal_deriv_on_edge(&self, edge_id: usize, s: f64) -> Result<Complex64> {
        match &self.mesh {
            BoundaryMesh::Panels(m) => m.density_on_edge(edge_id, s, &self.normal_deriv_int),
            BoundaryMesh::Smooth(_) => Err(crate::Error::ContractViolation(
                "edge traces need a panel mesh".into(),
            )),
        }
    }
}
