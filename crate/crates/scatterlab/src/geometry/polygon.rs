//! Simple polygons, convex hulls and the Hausdorff distance between convex
//! polygonal regions.

use super::{cross, Vec2, GEOM_TOL};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// A simple polygon with counterclockwise vertex order.
///
/// Construction normalizes orientation, rejects self-intersecting or
/// degenerate chains, and records whether the polygon is convex.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Polygon {
    vertices: Vec<Vec2>,
    convex: bool,
}

impl Polygon {
    pub fn new(mut vertices: Vec<Vec2>) -> Result<Self> {
        if vertices.len() < 3 {
            return Err(Error::DegenerateGeometry(format!(
                "polygon needs at least 3 vertices, got {}",
                vertices.len()
            )));
        }
        let area = signed_area(&vertices);
        if area.abs() < GEOM_TOL * GEOM_TOL {
            return Err(Error::DegenerateGeometry(
                "polygon area is numerically zero".into(),
            ));
        }
        if area < 0.0 {
            vertices.reverse();
        }
        for i in 0..vertices.len() {
            let j = (i + 1) % vertices.len();
            if (vertices[i] - vertices[j]).norm() < GEOM_TOL {
                return Err(Error::DegenerateGeometry(format!(
                    "duplicate vertices at index {i}"
                )));
            }
        }
        if !is_simple(&vertices) {
            return Err(Error::DegenerateGeometry(
                "polygon boundary self-intersects".into(),
            ));
        }
        let convex = is_convex(&vertices);
        Ok(Polygon { vertices, convex })
    }

    pub fn vertices(&self) -> &[Vec2] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn vertex(&self, i: usize) -> Vec2 {
        self.vertices[i % self.vertices.len()]
    }

    pub fn is_convex(&self) -> bool {
        self.convex
    }

    pub fn area(&self) -> f64 {
        signed_area(&self.vertices)
    }

    /// Edges as (start, end) pairs in CCW order.
    pub fn edges(&self) -> impl Iterator<Item = (Vec2, Vec2)> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| (self.vertices[i], self.vertices[(i + 1) % n]))
    }

    pub fn edge_length(&self, i: usize) -> f64 {
        let n = self.vertices.len();
        (self.vertices[(i + 1) % n] - self.vertices[i]).norm()
    }

    /// Interior angle at vertex i, in (0, 2 pi); below pi for convex corners.
    pub fn interior_angle(&self, i: usize) -> f64 {
        let n = self.vertices.len();
        let prev = self.vertices[(i + n - 1) % n];
        let here = self.vertices[i];
        let next = self.vertices[(i + 1) % n];
        let incoming = here - prev;
        let outgoing = next - here;
        let turn = cross(incoming, outgoing).atan2(incoming.dot(&outgoing));
        std::f64::consts::PI - turn
    }

    /// Winding-free even-odd containment test (boundary counts as inside
    /// within GEOM_TOL).
    pub fn contains(&self, p: Vec2) -> bool {
        if self.distance_to_boundary(p) < GEOM_TOL {
            return true;
        }
        let n = self.vertices.len();
        let mut inside = false;
        for i in 0..n {
            let a = self.vertices[i];
            let b = self.vertices[(i + 1) % n];
            if (a.y > p.y) != (b.y > p.y) {
                let t = (p.y - a.y) / (b.y - a.y);
                let x_cross = a.x + t * (b.x - a.x);
                if p.x < x_cross {
                    inside = !inside;
                }
            }
        }
        inside
    }

    /// Distance from p to the polygon boundary.
    pub fn distance_to_boundary(&self, p: Vec2) -> f64 {
        self.edges()
            .map(|(a, b)| point_segment_distance(p, a, b))
            .fold(f64::INFINITY, f64::min)
    }

    /// Distance from p to the closed polygonal region (zero inside).
    pub fn distance(&self, p: Vec2) -> f64 {
        let d = self.distance_to_boundary(p);
        if d < GEOM_TOL || self.contains(p) {
            0.0
        } else {
            d
        }
    }

    pub fn translate(&self, t: Vec2) -> Polygon {
        Polygon {
            vertices: self.vertices.iter().map(|v| v + t).collect(),
            convex: self.convex,
        }
    }

    pub fn scale_about_centroid(&self, s: f64) -> Result<Polygon> {
        let c = self.centroid();
        Polygon::new(self.vertices.iter().map(|v| c + (v - c) * s).collect())
    }

    pub fn centroid(&self) -> Vec2 {
        let mut c = Vec2::zeros();
        let mut a = 0.0;
        let n = self.vertices.len();
        for i in 0..n {
            let p = self.vertices[i];
            let q = self.vertices[(i + 1) % n];
            let w = cross(p, q);
            c += (p + q) * w;
            a += w;
        }
        c / (3.0 * a)
    }

    /// Maximum vertex distance from the origin.
    pub fn bounding_radius(&self) -> f64 {
        self.vertices.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Index of the vertex equal to p within tolerance.
    pub fn vertex_index(&self, p: Vec2, tol: f64) -> Option<usize> {
        self.vertices.iter().position(|v| (v - p).norm() <= tol)
    }

    pub fn min_edge_length(&self) -> f64 {
        (0..self.len())
            .map(|i| self.edge_length(i))
            .fold(f64::INFINITY, f64::min)
    }

    /// True when the two polygons have identical vertex sets up to cyclic
    /// shift (orientation is already normalized).
    pub fn same_support(&self, other: &Polygon, tol: f64) -> bool {
        if self.len() != other.len() {
            return false;
        }
        let n = self.len();
        'shift: for s in 0..n {
            for i in 0..n {
                if (self.vertices[i] - other.vertices[(i + s) % n]).norm() > tol {
                    continue 'shift;
                }
            }
            return true;
        }
        false
    }

    /// Parse the plain-text polygon format: one "x y" pair per line,
    /// counterclockwise. Blank lines and `#` comments are skipped.
    pub fn from_text(text: &str) -> Result<Polygon> {
        let mut pts = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut it = line.split_whitespace();
            let x: f64 = it
                .next()
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| Error::Parameter(format!("polygon file line {}: bad x", lineno + 1)))?;
            let y: f64 = it
                .next()
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| Error::Parameter(format!("polygon file line {}: bad y", lineno + 1)))?;
            pts.push(Vec2::new(x, y));
        }
        Polygon::new(pts)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for v in &self.vertices {
            s.push_str(&format!("{:.17e} {:.17e}\n", v.x, v.y));
        }
        s
    }
}

fn signed_area(vs: &[Vec2]) -> f64 {
    let n = vs.len();
    0.5 * (0..n)
        .map(|i| cross(vs[i], vs[(i + 1) % n]))
        .sum::<f64>()
}

fn is_convex(vs: &[Vec2]) -> bool {
    let n = vs.len();
    (0..n).all(|i| {
        let a = vs[i];
        let b = vs[(i + 1) % n];
        let c = vs[(i + 2) % n];
        cross(b - a, c - b) > -GEOM_TOL
    })
}

fn is_simple(vs: &[Vec2]) -> bool {
    let n = vs.len();
    for i in 0..n {
        for j in (i + 1)..n {
            // skip adjacent edges (they share a vertex)
            if j == i || (j + 1) % n == i || (i + 1) % n == j {
                continue;
            }
            let (a, b) = (vs[i], vs[(i + 1) % n]);
            let (c, d) = (vs[j], vs[(j + 1) % n]);
            if segments_intersect(a, b, c, d) {
                return false;
            }
        }
    }
    true
}

fn segments_intersect(a: Vec2, b: Vec2, c: Vec2, d: Vec2) -> bool {
    let d1 = cross(b - a, c - a);
    let d2 = cross(b - a, d - a);
    let d3 = cross(d - c, a - c);
    let d4 = cross(d - c, b - c);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    false
}

/// Distance from a point to a closed segment.
pub fn point_segment_distance(p: Vec2, a: Vec2, b: Vec2) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_squared();
    if len2 == 0.0 {
        return (p - a).norm();
    }
    let t = ((p - a).dot(&ab) / len2).clamp(0.0, 1.0);
    (p - (a + ab * t)).norm()
}

/// Smallest convex polygon containing the input points (monotone chain).
/// Errors on fewer than three effective points or a collinear set.
pub fn convex_hull(points: &[Vec2]) -> Result<Polygon> {
    if points.len() < 3 {
        return Err(Error::DegenerateGeometry(format!(
            "convex hull needs at least 3 points, got {}",
            points.len()
        )));
    }
    let mut pts: Vec<Vec2> = points.to_vec();
    pts.sort_by(|a, b| (a.x, a.y).partial_cmp(&(b.x, b.y)).unwrap());
    pts.dedup_by(|a, b| (*a - *b).norm() < GEOM_TOL);
    if pts.len() < 3 {
        return Err(Error::DegenerateGeometry(
            "convex hull input collapses to fewer than 3 distinct points".into(),
        ));
    }
    let mut lower: Vec<Vec2> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2
            && cross(lower[lower.len() - 1] - lower[lower.len() - 2], p - lower[lower.len() - 2])
                <= GEOM_TOL * GEOM_TOL
        {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<Vec2> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2
            && cross(upper[upper.len() - 1] - upper[upper.len() - 2], p - upper[upper.len() - 2])
                <= GEOM_TOL * GEOM_TOL
        {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    if lower.len() < 3 {
        return Err(Error::DegenerateGeometry(
            "convex hull degenerate (collinear input)".into(),
        ));
    }
    Polygon::new(lower)
}

/// Hausdorff distance between two convex polygonal regions.
///
/// For convex targets the directed distance sup_{x in A} dist(x, B) is a
/// convex function maximized at a vertex of A, so vertex/edge projections
/// give the exact value. Nonconvex inputs are rejected (out of scope).
pub fn hausdorff_distance(a: &Polygon, b: &Polygon) -> Result<f64> {
    if !a.is_convex() || !b.is_convex() {
        return Err(Error::ContractViolation(
            "hausdorff_distance requires convex polygons".into(),
        ));
    }
    Ok(directed_hausdorff(a, b).max(directed_hausdorff(b, a)))
}

/// sup_{x in A} dist(x, B) for convex B (exact: attained at a vertex of A).
pub fn directed_hausdorff(a: &Polygon, b: &Polygon) -> f64 {
    a.vertices()
        .iter()
        .map(|&v| b.distance(v))
        .fold(0.0, f64::max)
}

/// Vertex of `a` realizing the directed distance sup_{x in a} dist(x, b).
pub fn directed_hausdorff_realizer(a: &Polygon, b: &Polygon) -> (usize, f64) {
    let mut best = (0usize, -1.0);
    for (i, &v) in a.vertices().iter().enumerate() {
        let d = b.distance(v);
        if d > best.1 {
            best = (i, d);
        }
    }
    best
}

/// A-priori admissibility parameters (opening-angle band, minimum edge
/// length, bounding radius, contrast band, q bound).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AdmissibilityParams {
    pub gamma_min: f64,
    pub gamma_max: f64,
    pub angle_min: f64,
    pub angle_max: f64,
    pub edge_min: f64,
    pub radius: f64,
    pub q_max: f64,
}

impl Default for AdmissibilityParams {
    fn default() -> Self {
        AdmissibilityParams {
            gamma_min: 0.05,
            gamma_max: 50.0,
            angle_min: std::f64::consts::PI / 16.0,
            angle_max: std::f64::consts::PI * 15.0 / 16.0,
            edge_min: 0.05,
            radius: 4.0,
            q_max: 20.0,
        }
    }
}

/// Check a polygon against the admissible-class constraints. Every violated
/// constraint is reported by name.
pub fn validate_admissible(poly: &Polygon, params: &AdmissibilityParams) -> Result<()> {
    let mut violations = Vec::new();
    if !poly.is_convex() {
        violations.push("polygon must be convex".to_string());
    }
    for i in 0..poly.len() {
        let a = poly.interior_angle(i);
        if a < params.angle_min {
            violations.push(format!(
                "angle below a_m at vertex {i}: {a:.6} < {:.6}",
                params.angle_min
            ));
        }
        if a > params.angle_max {
            violations.push(format!(
                "angle above a_M at vertex {i}: {a:.6} > {:.6}",
                params.angle_max
            ));
        }
        let l = poly.edge_length(i);
        if l < params.edge_min {
            violations.push(format!(
                "length of each edge must be at least l: edge {i} has {l:.6} < {:.6}",
                params.edge_min
            ));
        }
    }
    if poly.bounding_radius() >= params.radius {
        violations.push(format!(
            "polygon must lie strictly inside the disk of radius R = {:.6} (bounding radius {:.6})",
            params.radius,
            poly.bounding_radius()
        ));
    }
    if violations.is_empty() {
        Ok(())
    } else {
        Err(Error::Config(violations))
    }
}
