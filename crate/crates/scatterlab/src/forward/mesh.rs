//! Boundary discretizations.
//!
//! Polygons get a panel mesh: composite Gauss panels on every edge, panel
//! lengths graded algebraically toward both corners of the edge. Smooth
//! test curves (circles) get a global uniform grid for the trigonometric
//! quadrature path. Both carry nodes, arclength weights and outward
//! normals; the panel mesh additionally supports polynomial interpolation
//! of nodal densities within each panel.

use crate::geometry::{point_segment_distance, Polygon, Vec2};
use crate::quadrature::{doubly_graded_breakpoints, gauss_rule, legendre_values};
use crate::{Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Mesh resolution parameters.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MeshParams {
    /// Gauss nodes per panel (panel meshes).
    pub nodes_per_panel: usize,
    /// Graded panels per half edge, so every edge carries 2m panels.
    pub panels_per_half_edge: usize,
    /// Grading exponent toward corners.
    pub grading: f64,
    /// Minimum resolution in nodes per wavelength (checked at build).
    pub min_nodes_per_wavelength: f64,
    /// Node count for smooth curves; 0 means derive from the wavelength rule.
    pub smooth_nodes: usize,
}

impl Default for MeshParams {
    fn default() -> Self {
        MeshParams {
            nodes_per_panel: 8,
            panels_per_half_edge: 8,
            grading: 3.0,
            min_nodes_per_wavelength: 10.0,
            smooth_nodes: 0,
        }
    }
}

impl MeshParams {
    /// Double the resolution (panel count or smooth node count).
    pub fn refine(&self) -> MeshParams {
        MeshParams {
            nodes_per_panel: self.nodes_per_panel,
            panels_per_half_edge: self.panels_per_half_edge * 2,
            grading: self.grading,
            min_nodes_per_wavelength: self.min_nodes_per_wavelength,
            smooth_nodes: if self.smooth_nodes == 0 {
                0
            } else {
                self.smooth_nodes * 2
            },
        }
    }
}

/// A straight panel on a polygon edge.
#[derive(Debug, Clone)]
pub struct Panel {
    pub a: Vec2,
    pub b: Vec2,
    pub edge_id: usize,
    /// Arclength of the panel start/end measured along its edge.
    pub s_start: f64,
    pub s_end: f64,
    pub first_node: usize,
    pub n_nodes: usize,
}

impl Panel {
    pub fn length(&self) -> f64 {
        (self.b - self.a).norm()
    }

    pub fn point_at(&self, u: f64) -> Vec2 {
        self.a + (self.b - self.a) * (0.5 * (u + 1.0))
    }

    pub fn distance_to(&self, p: Vec2) -> f64 {
        point_segment_distance(p, self.a, self.b)
    }
}

/// Panel mesh over a polygon boundary.
#[derive(Debug, Clone)]
pub struct PanelMesh {
    pub polygon: Polygon,
    pub panels: Vec<Panel>,
    pub nodes: Vec<Vec2>,
    pub normals: Vec<Vec2>,
    pub weights: Vec<f64>,
    /// Gauss parameter of each node within its panel.
    pub node_param: Vec<f64>,
    pub node_panel: Vec<usize>,
    pub gauss: usize,
}

/// Uniform global grid on a circle for the trigonometric quadrature path.
#[derive(Debug, Clone)]
pub struct SmoothMesh {
    pub center: Vec2,
    pub radius: f64,
    pub n: usize,
    pub t: Vec<f64>,
    pub nodes: Vec<Vec2>,
    pub normals: Vec<Vec2>,
    pub weights: Vec<f64>,
}

#[derive(Debug, Clone)]
pub enum BoundaryMesh {
    Panels(PanelMesh),
    Smooth(SmoothMesh),
}

impl BoundaryMesh {
    /// Graded panel mesh on a polygon. The wavelength-resolution
    /// precondition is checked against `k`.
    pub fn polygon(poly: &Polygon, k: f64, params: &MeshParams) -> Result<BoundaryMesh> {
        let p = params.nodes_per_panel;
        let m = params.panels_per_half_edge;
        if p < 2 || m < 1 {
            return Err(Error::Parameter(
                "mesh needs at least 2 nodes per panel and 1 panel per half edge".into(),
            ));
        }
        let rule = gauss_rule(p);
        let mut panels = Vec::new();
        let mut nodes = Vec::new();
        let mut normals = Vec::new();
        let mut weights = Vec::new();
        let mut node_param = Vec::new();
        let mut node_panel = Vec::new();
        for (edge_id, (a, b)) in poly.edges().enumerate() {
            let dir = b - a;
            let len = dir.norm();
            let tangent = dir / len;
            let outward = Vec2::new(tangent.y, -tangent.x);
            let brk = doubly_graded_breakpoints(len, m, params.grading);
            for w in brk.windows(2) {
                let pa = a + tangent * w[0];
                let pb = a + tangent * w[1];
                let panel_idx = panels.len();
                let first_node = nodes.len();
                let half = 0.5 * (w[1] - w[0]);
                for (x, wt) in rule.nodes.iter().zip(&rule.weights) {
                    let s = 0.5 * (w[0] + w[1]) + half * x;
                    nodes.push(a + tangent * s);
                    normals.push(outward);
                    weights.push(wt * half);
                    node_param.push(*x);
                    node_panel.push(panel_idx);
                }
                panels.push(Panel {
                    a: pa,
                    b: pb,
                    edge_id,
                    s_start: w[0],
                    s_end: w[1],
                    first_node,
                    n_nodes: p,
                });
            }
        }
        let mesh = PanelMesh {
            polygon: poly.clone(),
            panels,
            nodes,
            normals,
            weights,
            node_param,
            node_panel,
            gauss: p,
        };
        let total_len: f64 = poly.edges().map(|(a, b)| (b - a).norm()).sum();
        let npw = mesh.nodes.len() as f64 / (total_len * k / (2.0 * PI));
        if npw < params.min_nodes_per_wavelength {
            return Err(Error::Precondition(format!(
                "mesh resolves only {npw:.2} nodes per wavelength (need >= {})",
                params.min_nodes_per_wavelength
            )));
        }
        Ok(BoundaryMesh::Panels(mesh))
    }

    /// Global uniform grid on a circle of given radius about the origin.
    pub fn disk(radius: f64, k: f64, params: &MeshParams) -> Result<BoundaryMesh> {
        let mut n = if params.smooth_nodes > 0 {
            params.smooth_nodes
        } else {
            (params.min_nodes_per_wavelength * k * radius).ceil() as usize
        };
        n = n.max(8);
        if n % 2 == 1 {
            n += 1;
        }
        let center = Vec2::zeros();
        let mut t = Vec::with_capacity(n);
        let mut nodes = Vec::with_capacity(n);
        let mut normals = Vec::with_capacity(n);
        let mut weights = Vec::with_capacity(n);
        for j in 0..n {
            let tj = 2.0 * PI * j as f64 / n as f64;
            let nu = Vec2::new(tj.cos(), tj.sin());
            t.push(tj);
            nodes.push(center + nu * radius);
            normals.push(nu);
            weights.push(2.0 * PI * radius / n as f64);
        }
        Ok(BoundaryMesh::Smooth(SmoothMesh {
            center,
            radius,
            n,
            t,
            nodes,
            normals,
            weights,
        }))
    }

    pub fn nodes(&self) -> &[Vec2] {
        match self {
            BoundaryMesh::Panels(m) => &m.nodes,
            BoundaryMesh::Smooth(m) => &m.nodes,
        }
    }

    pub fn normals(&self) -> &[Vec2] {
        match self {
            BoundaryMesh::Panels(m) => &m.normals,
            BoundaryMesh::Smooth(m) => &m.normals,
        }
    }

    pub fn weights(&self) -> &[f64] {
        match self {
            BoundaryMesh::Panels(m) => &m.weights,
            BoundaryMesh::Smooth(m) => &m.weights,
        }
    }

    pub fn len(&self) -> usize {
        self.nodes().len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes().is_empty()
    }

    /// Local mesh spacing near a point (used for near-boundary warnings).
    pub fn local_spacing(&self, p: Vec2) -> f64 {
        match self {
            BoundaryMesh::Panels(m) => {
                let mut best = f64::INFINITY;
                let mut len = 0.0;
                for panel in &m.panels {
                    let d = panel.distance_to(p);
                    if d < best {
                        best = d;
                        len = panel.length();
                    }
                }
                len
            }
            BoundaryMesh::Smooth(m) => 2.0 * PI * m.radius / m.n as f64,
        }
    }

    /// Distance from a point to the meshed boundary.
    pub fn distance_to_boundary(&self, p: Vec2) -> f64 {
        match self {
            BoundaryMesh::Panels(m) => m.polygon.distance_to_boundary(p),
            BoundaryMesh::Smooth(m) => ((p - m.center).norm() - m.radius).abs(),
        }
    }
}

/// Nodal-to-modal (Legendre) conversion matrix for a Gauss order: row m is
/// (2m+1)/2 * w_j * P_m(u_j). Exact for the nodal interpolant.
pub fn modal_matrix(p: usize) -> Vec<Vec<f64>> {
    let rule = gauss_rule(p);
    let mut vals = vec![0.0; p];
    let mut m = vec![vec![0.0; p]; p];
    for (j, (&u, &w)) in rule.nodes.iter().zip(&rule.weights).enumerate() {
        legendre_values(p - 1, u, &mut vals);
        for (row, mrow) in m.iter_mut().enumerate() {
            mrow[j] = (2.0 * row as f64 + 1.0) / 2.0 * w * vals[row];
        }
    }
    m
}

impl PanelMesh {
    /// Interpolate a nodal density at parameter u of a panel.
    pub fn interp(&self, panel: usize, u: f64, nodal: &[Complex64]) -> Complex64 {
        let p = self.gauss;
        let pan = &self.panels[panel];
        let modal = modal_matrix(p);
        let mut vals = vec![0.0; p];
        legendre_values(p - 1, u, &mut vals);
        let mut acc = Complex64::new(0.0, 0.0);
        for (m, val) in vals.iter().enumerate() {
            let mut coeff = Complex64::new(0.0, 0.0);
            for j in 0..p {
                coeff += modal[m][j] * nodal[pan.first_node + j];
            }
            acc += coeff * val;
        }
        acc
    }

    /// Locate the panel containing arclength `s` along edge `edge_id` and
    /// the corresponding Gauss parameter.
    pub fn locate(&self, edge_id: usize, s: f64) -> Result<(usize, f64)> {
        for (idx, pan) in self.panels.iter().enumerate() {
            if pan.edge_id == edge_id && s >= pan.s_start - 1e-12 && s <= pan.s_end + 1e-12 {
                let u = 2.0 * (s - pan.s_start) / (pan.s_end - pan.s_start) - 1.0;
                return Ok((idx, u.clamp(-1.0, 1.0)));
            }
        }
        Err(Error::ContractViolation(format!(
            "no panel on edge {edge_id} covers arclength {s}"
        )))
    }

    /// Value of a nodal density at arclength `s` along edge `edge_id`.
    pub fn density_on_edge(&self, edge_id: usize, s: f64, nodal: &[Complex64]) -> Result<Complex64> {
        let (panel, u) = self.locate(edge_id, s)?;
        Ok(self.interp(panel, u, nodal))
    }
}
