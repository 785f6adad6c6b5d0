//! Quadrature-equipped contour construction at a corner: the two edge
//! segments inside a disk of radius h, the circular arcs at r = h, the outer
//! closing arc behind the corner, and area rules on the corner sector and
//! its complementary region inside the closed contour.

use super::{CornerFrame, Polygon, Vec2, GEOM_TOL};
use crate::quadrature::{gauss_rule, graded_breakpoints};
use crate::{Error, Result};
use std::f64::consts::PI;

/// A quadrature rule along a curve: world points, arclength weights, unit
/// normals and the scalar parameter of each node (radius on rays, polar or
/// arc angle on circles).
#[derive(Debug, Clone)]
pub struct CurveQuad {
    pub points: Vec<Vec2>,
    pub weights: Vec<f64>,
    pub normals: Vec<Vec2>,
    pub param: Vec<f64>,
}

impl CurveQuad {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn arclength(&self) -> f64 {
        self.weights.iter().sum()
    }

    fn with_capacity(n: usize) -> Self {
        CurveQuad {
            points: Vec::with_capacity(n),
            weights: Vec::with_capacity(n),
            normals: Vec::with_capacity(n),
            param: Vec::with_capacity(n),
        }
    }
}

/// An area quadrature rule: world points and weights.
#[derive(Debug, Clone)]
pub struct AreaQuad {
    pub points: Vec<Vec2>,
    pub weights: Vec<f64>,
}

impl AreaQuad {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn area(&self) -> f64 {
        self.weights.iter().sum()
    }
}

/// Resolution knobs for the contour quadratures.
#[derive(Debug, Clone)]
pub struct ContourParams {
    /// Gauss nodes per panel.
    pub gauss: usize,
    /// Panels on each ray segment (graded toward the corner).
    pub ray_panels: usize,
    /// Panels on each circular arc.
    pub arc_panels: usize,
    /// Radial x angular panels on the corner sector.
    pub sector_panels: (usize, usize),
    /// Radial x angular panels on the complementary region.
    pub complement_panels: (usize, usize),
    /// Grading exponent toward the corner.
    pub grading: f64,
}

impl Default for ContourParams {
    fn default() -> Self {
        ContourParams {
            gauss: 8,
            ray_panels: 10,
            arc_panels: 12,
            sector_panels: (10, 10),
            complement_panels: (8, 24),
            grading: 3.0,
        }
    }
}

impl ContourParams {
    /// Double every panel count (for refinement studies).
    pub fn refine(&self) -> ContourParams {
        ContourParams {
            gauss: self.gauss,
            ray_panels: self.ray_panels * 2,
            arc_panels: self.arc_panels * 2,
            sector_panels: (self.sector_panels.0 * 2, self.sector_panels.1 * 2),
            complement_panels: (self.complement_panels.0 * 2, self.complement_panels.1 * 2),
            grading: self.grading,
        }
    }
}

/// The full contour set at a corner. Curve and area rules are expressed in
/// world coordinates; `theta_minus/theta_plus` are the frame angles of D's
/// edges at the corner.
#[derive(Debug, Clone)]
pub struct ContourSet {
    pub frame: CornerFrame,
    pub h: f64,
    pub tau: f64,
    pub tau0: f64,
    pub theta_minus: f64,
    pub theta_plus: f64,
    /// Edge segment of D at frame angle theta_minus (param = radius).
    pub gamma_minus: CurveQuad,
    /// Edge segment of D at frame angle theta_plus (param = radius).
    pub gamma_plus: CurveQuad,
    /// Arc r = h inside D (param = polar angle).
    pub arc_inner_d: CurveQuad,
    /// Arc r = h across the widened sector |theta| <= (pi+b)/4.
    pub arc_inner_q: CurveQuad,
    /// Outer closing arc behind the corner (param = angle about its center).
    pub arc_outer: CurveQuad,
    /// Area rule on the corner sector of D (radius h).
    pub sector_d: AreaQuad,
    /// Area rule on the hull sector (radius h, opening b); only used by the
    /// geometric property checks.
    pub sector_q: AreaQuad,
    /// Area rule on the complementary region bounded by the edge segments,
    /// the widened arc and the outer arc.
    pub complement: AreaQuad,
    /// Center (frame coordinates, on the bisector axis) and radius of the
    /// outer arc's circle.
    pub outer_center: f64,
    pub outer_radius: f64,
}

impl ContourSet {
    /// Smallest admissible probe scale for a given h and hull opening.
    pub fn tau_floor(h: f64, hull_opening: f64) -> f64 {
        1.0 / (2.0 * h * ((PI - hull_opening) / 4.0).sin())
    }

    /// Geometric invariants of the construction:
    /// (1) sector nodes stay in the decay cone of the probe field,
    /// (2) complement and outer-arc nodes have bisector coordinate >= -1/tau,
    /// (3) outer-arc nodes keep distance >= 1/(2 tau) from the hull boundary.
    pub fn verify_properties(&self, hull: &Polygon) -> Result<()> {
        let tol = GEOM_TOL;
        let cone = ((PI + self.frame.hull_opening) / 4.0).cos();
        for p in self.sector_d.points.iter().chain(&self.sector_q.points) {
            let f = self.frame.to_frame(*p);
            if f.x < cone * f.norm() - tol {
                return Err(Error::ContractViolation(format!(
                    "contour property (1) violated at {p:?}: xi = {} < {}",
                    f.x,
                    cone * f.norm()
                )));
            }
        }
        let floor = -1.0 / self.tau - tol;
        for p in self.complement.points.iter().chain(&self.arc_outer.points) {
            let f = self.frame.to_frame(*p);
            if f.x < floor {
                return Err(Error::ContractViolation(format!(
                    "contour property (2) violated at {p:?}: xi = {} < -1/tau = {}",
                    f.x,
                    -1.0 / self.tau
                )));
            }
        }
        let clearance = 0.5 / self.tau - tol;
        for p in &self.arc_outer.points {
            let d = hull.distance_to_boundary(*p);
            if d < clearance {
                return Err(Error::ContractViolation(format!(
                    "contour property (3) violated at {p:?}: dist to hull boundary {d} < 1/(2 tau) = {}",
                    0.5 / self.tau
                )));
            }
        }
        Ok(())
    }
}

/// Gauss rule along a ray at frame angle `theta`, radii in [r0, r1], graded
/// toward r0 when `grading > 1`. The normal is the outward normal of the
/// sector below `theta` for the upper edge (`outward_ccw = true`), i.e. the
/// direction of increasing theta.
pub fn ray_quad(
    frame: &CornerFrame,
    theta: f64,
    r0: f64,
    r1: f64,
    panels: usize,
    gauss: usize,
    grading: f64,
    outward_ccw: bool,
) -> CurveQuad {
    let rule = gauss_rule(gauss);
    let brk = graded_breakpoints(r1 - r0, panels, grading);
    let mut q = CurveQuad::with_capacity(panels * gauss);
    let normal = if outward_ccw {
        frame.angular_dir(theta)
    } else {
        -frame.angular_dir(theta)
    };
    for w in brk.windows(2) {
        let (lo, hi) = (r0 + w[0], r0 + w[1]);
        let half = 0.5 * (hi - lo);
        let mid = 0.5 * (lo + hi);
        for (x, wt) in rule.nodes.iter().zip(&rule.weights) {
            let r = mid + half * x;
            q.points.push(frame.from_polar(r, theta));
            q.weights.push(wt * half);
            q.normals.push(normal);
            q.param.push(r);
        }
    }
    q
}

/// Gauss rule on the circle r = rad about the corner, theta in [t0, t1],
/// outward radial normals.
fn corner_arc_quad(
    frame: &CornerFrame,
    rad: f64,
    t0: f64,
    t1: f64,
    panels: usize,
    gauss: usize,
) -> CurveQuad {
    let rule = gauss_rule(gauss);
    let mut q = CurveQuad::with_capacity(panels * gauss);
    for p in 0..panels {
        let lo = t0 + (t1 - t0) * p as f64 / panels as f64;
        let hi = t0 + (t1 - t0) * (p + 1) as f64 / panels as f64;
        let half = 0.5 * (hi - lo);
        let mid = 0.5 * (lo + hi);
        for (x, wt) in rule.nodes.iter().zip(&rule.weights) {
            let th = mid + half * x;
            q.points.push(frame.from_polar(rad, th));
            q.weights.push(wt * half * rad);
            q.normals.push(frame.radial_dir(th));
            q.param.push(th);
        }
    }
    q
}

/// Sector area rule: radii graded toward the corner, uniform panels in
/// angle, jacobian r.
fn sector_quad(
    frame: &CornerFrame,
    rad: f64,
    t0: f64,
    t1: f64,
    r_panels: usize,
    t_panels: usize,
    gauss: usize,
    grading: f64,
) -> AreaQuad {
    let rule = gauss_rule(gauss);
    let rbrk = graded_breakpoints(rad, r_panels, grading);
    let mut q = AreaQuad {
        points: Vec::new(),
        weights: Vec::new(),
    };
    for tw in 0..t_panels {
        let tlo = t0 + (t1 - t0) * tw as f64 / t_panels as f64;
        let thi = t0 + (t1 - t0) * (tw + 1) as f64 / t_panels as f64;
        let thalf = 0.5 * (thi - tlo);
        let tmid = 0.5 * (thi + tlo);
        for rw in rbrk.windows(2) {
            let rhalf = 0.5 * (rw[1] - rw[0]);
            let rmid = 0.5 * (rw[1] + rw[0]);
            for (tx, twt) in rule.nodes.iter().zip(&rule.weights) {
                let th = tmid + thalf * tx;
                for (rx, rwt) in rule.nodes.iter().zip(&rule.weights) {
                    let r = rmid + rhalf * rx;
                    q.points.push(frame.from_polar(r, th));
                    q.weights.push(twt * thalf * rwt * rhalf * r);
                }
            }
        }
    }
    q
}

/// Build the contour set at the corner described by `frame`.
///
/// Preconditions checked here: tau >= tau0; D's corner edges are long
/// enough that the disk of radius h meets the boundary of D only along
/// those two edges; the edge angles lie inside the hull sector.
pub fn build_contours(
    frame: &CornerFrame,
    d: &Polygon,
    q: &Polygon,
    h: f64,
    tau: f64,
    params: &ContourParams,
) -> Result<ContourSet> {
    if h <= 0.0 {
        return Err(Error::Precondition(format!("contour radius h must be positive, got {h}")));
    }
    let tau0 = ContourSet::tau_floor(h, frame.hull_opening);
    if tau < tau0 * (1.0 - 1e-12) {
        return Err(Error::Precondition(format!(
            "probe scale tau = {tau:.6e} below floor tau0 = {tau0:.6e}"
        )));
    }
    let (theta_minus, theta_plus) = frame.edge_angles(d)?;
    let b = frame.hull_opening;
    if theta_minus < -0.5 * b - 1e-9 || theta_plus > 0.5 * b + 1e-9 {
        return Err(Error::ContractViolation(format!(
            "D edges at angles [{theta_minus:.6}, {theta_plus:.6}] leave the hull sector [-{0:.6}, {0:.6}]",
            0.5 * b
        )));
    }
    // The disk must meet D's boundary only along the two corner edges.
    let di = d
        .vertex_index(frame.vertex, GEOM_TOL)
        .ok_or_else(|| Error::ContractViolation("contours: frame vertex not a vertex of D".into()))?;
    let n = d.len();
    for i in 0..n {
        if i == di {
            continue;
        }
        if (d.vertex(i) - frame.vertex).norm() <= h + GEOM_TOL {
            return Err(Error::ContractViolation(format!(
                "vertex {i} of D lies inside the contour disk (h too large)"
            )));
        }
    }
    for i in 0..n {
        // edges not adjacent to the corner must stay outside the disk
        if i == di || (i + 1) % n == di {
            continue;
        }
        let a = d.vertex(i);
        let bv = d.vertex((i + 1) % n);
        if super::point_segment_distance(frame.vertex, a, bv) <= h + GEOM_TOL {
            return Err(Error::ContractViolation(format!(
                "edge {i} of D intersects the contour disk (h too large)"
            )));
        }
    }

    let phi_q = 0.25 * (PI + b);
    let gauss = params.gauss;

    let gamma_plus = ray_quad(frame, theta_plus, 0.0, h, params.ray_panels, gauss, params.grading, true);
    let gamma_minus = ray_quad(frame, theta_minus, 0.0, h, params.ray_panels, gauss, params.grading, false);
    let arc_inner_d = corner_arc_quad(frame, h, theta_minus, theta_plus, params.arc_panels, gauss);
    let arc_inner_q = corner_arc_quad(frame, h, -phi_q, phi_q, 2 * params.arc_panels, gauss);

    // Outer arc: circle through the two arc endpoints at angles +-phi_q and
    // the apex one probe length behind the corner on the bisector axis.
    let apex = -1.0 / tau;
    let c = (h * h - 1.0 / (tau * tau)) / (2.0 * (h * phi_q.cos() + 1.0 / tau));
    let rho = c - apex;
    debug_assert!(rho > 0.0);
    let p_plus = Vec2::new(h * phi_q.cos(), h * phi_q.sin());
    let psi_plus = (p_plus.y).atan2(p_plus.x - c);
    let arc_outer = {
        let rule = gauss_rule(gauss);
        let (t0, t1) = (psi_plus, 2.0 * PI - psi_plus);
        let mut quad = CurveQuad::with_capacity(params.arc_panels * gauss);
        for p in 0..2 * params.arc_panels {
            let lo = t0 + (t1 - t0) * p as f64 / (2 * params.arc_panels) as f64;
            let hi = t0 + (t1 - t0) * (p + 1) as f64 / (2 * params.arc_panels) as f64;
            let half = 0.5 * (hi - lo);
            let mid = 0.5 * (lo + hi);
            for (x, wt) in rule.nodes.iter().zip(&rule.weights) {
                let psi = mid + half * x;
                let fpt = Vec2::new(c + rho * psi.cos(), rho * psi.sin());
                quad.points.push(frame.from_frame(fpt));
                quad.weights.push(wt * half * rho);
                quad
                    .normals
                    .push(frame.x_hat * psi.cos() + frame.y_hat * psi.sin());
                quad.param.push(psi);
            }
        }
        quad
    };

    let sector_d = sector_quad(
        frame,
        h,
        theta_minus,
        theta_plus,
        params.sector_panels.0,
        params.sector_panels.1,
        gauss,
        params.grading,
    );
    let sector_q = sector_quad(frame, h, -0.5 * b, 0.5 * b, 6, 6, gauss, params.grading);

    // Complementary region in polar form: theta runs from theta_plus the
    // long way around to theta_minus + 2 pi; the radial extent is h inside
    // the widened sector and the outer-arc radius beyond it.
    let complement = {
        let rule = gauss_rule(gauss);
        let mut quad = AreaQuad {
            points: Vec::new(),
            weights: Vec::new(),
        };
        let stops = [theta_plus, phi_q, PI, 2.0 * PI - phi_q, 2.0 * PI + theta_minus];
        let (r_panels, t_per_span) = params.complement_panels;
        let radius_at = |theta: f64| -> f64 {
            let mut tw = theta;
            while tw > PI {
                tw -= 2.0 * PI;
            }
            if tw.abs() <= phi_q {
                h
            } else {
                c * tw.cos() + (rho * rho - c * c * tw.sin() * tw.sin()).sqrt()
            }
        };
        for span in stops.windows(2) {
            let (t0, t1) = (span[0], span[1]);
            if t1 - t0 < 1e-14 {
                continue;
            }
            for tp in 0..t_per_span {
                let tlo = t0 + (t1 - t0) * tp as f64 / t_per_span as f64;
                let thi = t0 + (t1 - t0) * (tp + 1) as f64 / t_per_span as f64;
                let thalf = 0.5 * (thi - tlo);
                let tmid = 0.5 * (thi + tlo);
                for (tx, twt) in rule.nodes.iter().zip(&rule.weights) {
                    let th = tmid + thalf * tx;
                    let rmax = radius_at(th);
                    let rbrk = graded_breakpoints(rmax, r_panels, 2.0);
                    for rw in rbrk.windows(2) {
                        let rhalf = 0.5 * (rw[1] - rw[0]);
                        let rmid = 0.5 * (rw[1] + rw[0]);
                        for (rx, rwt) in rule.nodes.iter().zip(&rule.weights) {
                            let r = rmid + rhalf * rx;
                            quad.points.push(frame.from_polar(r, th));
                            quad.weights.push(twt * thalf * rwt * rhalf * r);
                        }
                    }
                }
            }
        }
        quad
    };

    let set = ContourSet {
        frame: frame.clone(),
        h,
        tau,
        tau0,
        theta_minus,
        theta_plus,
        gamma_minus,
        gamma_plus,
        arc_inner_d,
        arc_inner_q,
        arc_outer,
        sector_d,
        sector_q,
        complement,
        outer_center: c,
        outer_radius: rho,
    };
    set.verify_properties(q)?;
    Ok(set)
}
