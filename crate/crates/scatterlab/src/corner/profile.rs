//! Angular profile of the corner singularity: the piecewise-cosine profile
//! phi with continuity and flux matching across the two corner rays, and
//! the singular model field r^eta phi(theta).

use super::exponent::singularity_exponent;
use crate::geometry::{CornerFrame, Vec2};
use crate::{Error, Result};
use nalgebra::SMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Exponent, angular profile and (optionally) the fitted coefficient of
/// the leading corner term K r^eta phi(theta).
///
/// The interior piece (between the edge angles) has unit amplitude by
/// convention; the exterior piece is expressed at the unwrapped angle
/// theta + 2 pi below the lower edge. Flux matching is
/// gamma * phi'_int = phi'_ext at both rays.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SingularityData {
    pub eta: f64,
    pub gamma: f64,
    pub theta_minus: f64,
    pub theta_plus: f64,
    int_cos: f64,
    int_sin: f64,
    ext_cos: f64,
    ext_sin: f64,
    /// Relative size of the smallest singular value of the matching system
    /// (the fourth condition; vanishes exactly at a true exponent).
    pub matching_residual: f64,
    /// Fitted coefficient, set by the extraction step.
    pub coefficient: Option<Complex64>,
    pub fit_residual: Option<f64>,
}

impl SingularityData {
    /// Solve the matching conditions for a corner with edges at frame
    /// angles (theta_minus, theta_plus) and exponent eta.
    pub fn new(gamma: f64, eta: f64, theta_minus: f64, theta_plus: f64) -> Result<SingularityData> {
        if !(eta > 0.0 && eta < 1.0) {
            return Err(Error::Domain(format!("exponent must lie in (0,1), got {eta}")));
        }
        if !(theta_plus > theta_minus) {
            return Err(Error::Domain("edge angles must satisfy theta_minus < theta_plus".into()));
        }
        let tp = theta_plus;
        let tm_ext = theta_minus + 2.0 * PI;
        let (ctp, stp) = ((eta * tp).cos(), (eta * tp).sin());
        let (ctm, stm) = ((eta * theta_minus).cos(), (eta * theta_minus).sin());
        let (cte, ste) = ((eta * tm_ext).cos(), (eta * tm_ext).sin());
        // unknowns [c1, s1, c2, s2]:
        // continuity at theta_plus, continuity at theta_minus (exterior at
        // the unwrapped angle), flux at theta_plus, flux at theta_minus
        let a = SMatrix::<f64, 4, 4>::from_rows(&[
            [ctp, stp, -ctp, -stp].into(),
            [ctm, stm, -cte, -ste].into(),
            [-gamma * stp, gamma * ctp, stp, -ctp].into(),
            [-gamma * stm, gamma * ctm, ste, -cte].into(),
        ]);
        let svd = a.svd(true, true);
        let sv = svd.singular_values;
        let matching_residual = sv[3] / sv[0].max(1e-300);
        if matching_residual > 1e-8 {
            return Err(Error::Domain(format!(
                "matching system has no null direction at eta={eta} (residual {matching_residual:.3e}); eta does not solve the exponent equation"
            )));
        }
        let vt = svd.v_t.ok_or_else(|| Error::Domain("profile svd failed".into()))?;
        let mut v = [vt[(3, 0)], vt[(3, 1)], vt[(3, 2)], vt[(3, 3)]];
        let amp = (v[0] * v[0] + v[1] * v[1]).sqrt();
        if amp < 1e-12 {
            return Err(Error::Domain(
                "degenerate profile: interior amplitude vanishes".into(),
            ));
        }
        for x in v.iter_mut() {
            *x /= amp;
        }
        // deterministic sign convention on the interior pair
        let flip = if v[0].abs() >= v[1].abs() {
            v[0] < 0.0
        } else {
            v[1] < 0.0
        };
        if flip {
            for x in v.iter_mut() {
                *x = -*x;
            }
        }
        Ok(SingularityData {
            eta,
            gamma,
            theta_minus,
            theta_plus,
            int_cos: v[0],
            int_sin: v[1],
            ext_cos: v[2],
            ext_sin: v[3],
            matching_residual,
            coefficient: None,
            fit_residual: None,
        })
    }

    /// Exponent and profile for a corner of the given opening with edges
    /// symmetric about the frame axis.
    pub fn for_corner(gamma: f64, opening: f64) -> Result<SingularityData> {
        let eta = singularity_exponent(gamma, opening)?;
        SingularityData::new(gamma, eta, -0.5 * opening, 0.5 * opening)
    }

    /// Exponent and profile for the corner described by a frame (edges at
    /// the frame angles of D).
    pub fn for_frame(gamma: f64, frame: &CornerFrame, d: &crate::geometry::Polygon) -> Result<SingularityData> {
        let eta = singularity_exponent(gamma, frame.opening)?;
        let (tm, tp) = frame.edge_angles(d)?;
        SingularityData::new(gamma, eta, tm, tp)
    }

    pub fn opening(&self) -> f64 {
        self.theta_plus - self.theta_minus
    }

    pub fn with_coefficient(mut self, k: Complex64, fit_residual: f64) -> SingularityData {
        self.coefficient = Some(k);
        self.fit_residual = Some(fit_residual);
        self
    }

    fn unwrap_angle(&self, theta: f64) -> (f64, bool) {
        // map into [theta_minus, theta_minus + 2 pi)
        let mut t = theta;
        while t < self.theta_minus {
            t += 2.0 * PI;
        }
        while t >= self.theta_minus + 2.0 * PI {
            t -= 2.0 * PI;
        }
        let interior = t <= self.theta_plus;
        (t, interior)
    }

    /// Profile value at a frame angle.
    pub fn phi(&self, theta: f64) -> f64 {
        let (t, interior) = self.unwrap_angle(theta);
        if interior {
            self.int_cos * (self.eta * t).cos() + self.int_sin * (self.eta * t).sin()
        } else {
            self.ext_cos * (self.eta * t).cos() + self.ext_sin * (self.eta * t).sin()
        }
    }

    /// Angular derivative of the profile at a frame angle.
    pub fn phi_deriv(&self, theta: f64) -> f64 {
        let (t, interior) = self.unwrap_angle(theta);
        let (c, s) = if interior {
            (self.int_cos, self.int_sin)
        } else {
            (self.ext_cos, self.ext_sin)
        };
        self.eta * (-c * (self.eta * t).sin() + s * (self.eta * t).cos())
    }

    /// Interior-side angular derivative exactly on the two rays.
    pub fn phi_deriv_interior(&self, theta: f64) -> f64 {
        self.eta
            * (-self.int_cos * (self.eta * theta).sin() + self.int_sin * (self.eta * theta).cos())
    }

    /// Interior amplitude (unit by normalization) and phase of
    /// phi = A cos(eta theta + Phi).
    pub fn interior_phase(&self) -> f64 {
        (-self.int_sin).atan2(self.int_cos)
    }

    pub fn exterior_amplitude(&self) -> f64 {
        (self.ext_cos * self.ext_cos + self.ext_sin * self.ext_sin).sqrt()
    }

    pub fn exterior_phase(&self) -> f64 {
        (-self.ext_sin).atan2(self.ext_cos)
    }

    /// The singular model field r^eta phi(theta) at a world point.
    pub fn singular_field(&self, frame: &CornerFrame, p: Vec2) -> f64 {
        let (r, th) = frame.polar(p);
        if r == 0.0 {
            return 0.0;
        }
        r.powf(self.eta) * self.phi(th)
    }

    /// World gradient of the singular model field.
    pub fn singular_gradient(&self, frame: &CornerFrame, p: Vec2) -> Vec2 {
        let (r, th) = frame.polar(p);
        let rpow = r.powf(self.eta - 1.0);
        let radial = self.eta * rpow * self.phi(th);
        let angular = rpow * self.phi_deriv(th);
        frame.radial_dir(th) * radial + frame.angular_dir(th) * angular
    }

    /// Residuals of the four matching conditions (continuity at both rays,
    /// flux at both rays).
    pub fn matching_checks(&self) -> [f64; 4] {
        let tp = self.theta_plus;
        let tm = self.theta_minus;
        let int = |t: f64| self.int_cos * (self.eta * t).cos() + self.int_sin * (self.eta * t).sin();
        let int_d = |t: f64| {
            self.eta * (-self.int_cos * (self.eta * t).sin() + self.int_sin * (self.eta * t).cos())
        };
        let ext = |t: f64| self.ext_cos * (self.eta * t).cos() + self.ext_sin * (self.eta * t).sin();
        let ext_d = |t: f64| {
            self.eta * (-self.ext_cos * (self.eta * t).sin() + self.ext_sin * (self.eta * t).cos())
        };
        [
            (int(tp) - ext(tp)).abs(),
            (int(tm) - ext(tm + 2.0 * PI)).abs(),
            (self.gamma * int_d(tp) - ext_d(tp)).abs(),
            (self.gamma * int_d(tm) - ext_d(tm + 2.0 * PI)).abs(),
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Polygon;

    #[test]
    fn matching_conditions_hold() {
        for (gamma, a) in [(3.0, PI / 2.0), (2.0, PI / 3.0), (0.4, 2.0 * PI / 5.0)] {
            let sd = SingularityData::for_corner(gamma, a).unwrap();
            let checks = sd.matching_checks();
            assert!(checks[0] < 1e-12, "continuity+ {:?}", checks);
            assert!(checks[1] < 1e-12, "continuity- {:?}", checks);
            assert!(checks[2] < 1e-10, "flux+ {:?}", checks);
            assert!(checks[3] < 1e-10, "flux- {:?}", checks);
            assert!(sd.matching_residual < 1e-10);
            // unit interior amplitude
            let amp = (sd.int_cos * sd.int_cos + sd.int_sin * sd.int_sin).sqrt();
            assert!((amp - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn asymmetric_edges_match_too() {
        let gamma = 2.5;
        let a = 1.1;
        let eta = singularity_exponent(gamma, a).unwrap();
        let sd = SingularityData::new(gamma, eta, -0.2, -0.2 + a).unwrap();
        let checks = sd.matching_checks();
        assert!(checks.iter().all(|&c| c < 1e-10), "{checks:?}");
    }

    #[test]
    fn wrong_exponent_is_rejected() {
        // an eta that does not solve the exponent equation leaves the
        // matching system nonsingular
        match SingularityData::new(3.0, 0.5, -0.7, 0.7) {
            Err(Error::Domain(_)) => {}
            other => panic!("expected domain error, got {other:?}"),
        }
    }

    #[test]
    fn extended_field_is_harmonic_in_both_sectors() {
        let gamma = 3.0;
        let a = 2.0;
        let sd = SingularityData::for_corner(gamma, a).unwrap();
        // frame with bisector along +x at the origin: build from a wedge
        let wedge = Polygon::new(vec![
            Vec2::new(0.0, 0.0),
            Vec2::new((0.5 * a).cos(), -(0.5 * a).sin()),
            Vec2::new(1.4, 0.0),
            Vec2::new((0.5 * a).cos(), (0.5 * a).sin()),
        ])
        .unwrap();
        let frame = CornerFrame::build(&wedge, &wedge, Vec2::new(0.0, 0.0)).unwrap();
        let h = 1e-4;
        let mut checked = 0;
        let mut state = 17u64;
        let mut rnd = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 33) as f64) / (u32::MAX as f64)
        };
        while checked < 100 {
            let r = 0.2 + 0.6 * rnd();
            let th = -PI + 2.0 * PI * rnd();
            // stay away from the two rays where the field kinks
            let d1 = (th - sd.theta_plus).abs();
            let d2 = (th - sd.theta_minus).abs();
            if d1 < 0.05 || d2 < 0.05 {
                continue;
            }
            let p = frame.from_polar(r, th);
            let f = |q: Vec2| sd.singular_field(&frame, q);
            let lap = (f(p + Vec2::new(h, 0.0))
                + f(p - Vec2::new(h, 0.0))
                + f(p + Vec2::new(0.0, h))
                + f(p - Vec2::new(0.0, h))
                - 4.0 * f(p))
                / (h * h);
            let scale = f(p).abs().max(r.powf(sd.eta - 2.0).abs() * 1e-3).max(1e-12);
            assert!(
                (lap / scale).abs() < 1e-4,
                "laplacian residual {lap:.3e} at r={r}, th={th}"
            );
            checked += 1;
        }
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let sd = SingularityData::for_corner(2.0, 1.2).unwrap();
        let wedge = Polygon::new(vec![
            Vec2::new(0.0, 0.0),
            Vec2::new(0.6f64.cos(), -0.6f64.sin()),
            Vec2::new(1.4, 0.0),
            Vec2::new(0.6f64.cos(), 0.6f64.sin()),
        ])
        .unwrap();
        let frame = CornerFrame::build(&wedge, &wedge, Vec2::new(0.0, 0.0)).unwrap();
        let p = frame.from_polar(0.4, 0.2);
        let h = 1e-6;
        let g = sd.singular_gradient(&frame, p);
        let fd = Vec2::new(
            (sd.singular_field(&frame, p + Vec2::new(h, 0.0))
                - sd.singular_field(&frame, p - Vec2::new(h, 0.0)))
                / (2.0 * h),
            (sd.singular_field(&frame, p + Vec2::new(0.0, h))
                - sd.singular_field(&frame, p - Vec2::new(0.0, h)))
                / (2.0 * h),
        );
        assert!((g - fd).norm() < 1e-7);
    }
}
