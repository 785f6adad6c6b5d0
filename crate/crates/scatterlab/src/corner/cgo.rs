//! Complex-geometrical-optics probe fields: harmonic exponentials
//! exp(rho . (x - x_c)) with rho = tau (-xhat + i yhat), decaying inside
//! the corner cone and bounded on the closing contour.

use crate::geometry::{CornerFrame, Vec2};
use crate::{Error, Result};
use num_complex::Complex64;
use serde::Serialize;

/// Probe-field parameters at a corner frame.
#[derive(Debug, Clone, Serialize)]
pub struct CgoParams {
    pub frame: CornerFrame,
    pub tau: f64,
}

impl CgoParams {
    pub fn new(frame: CornerFrame, tau: f64) -> Result<CgoParams> {
        if !(tau > 0.0) {
            return Err(Error::Parameter(format!("probe scale must be positive, got {tau}")));
        }
        Ok(CgoParams { frame, tau })
    }

    /// World components of rho = tau (-xhat + i yhat); rho . rho = 0 holds
    /// identically by construction.
    pub fn rho(&self) -> [Complex64; 2] {
        let xh = self.frame.x_hat;
        let yh = self.frame.y_hat;
        [
            self.tau * Complex64::new(-xh.x, yh.x),
            self.tau * Complex64::new(-xh.y, yh.y),
        ]
    }

    /// Exponent rho . (p - x_c); in frame coordinates tau (-xi + i upsilon).
    pub fn exponent(&self, p: Vec2) -> Complex64 {
        let f = self.frame.to_frame(p);
        self.tau * Complex64::new(-f.x, f.y)
    }

    /// Field value; errors when the real exponent exceeds 700 (would
    /// overflow f64).
    pub fn field(&self, p: Vec2) -> Result<Complex64> {
        let z = self.exponent(p);
        if z.re > 700.0 {
            return Err(Error::Range(format!(
                "probe field overflows: Re(exponent) = {:.1}",
                z.re
            )));
        }
        Ok(z.exp())
    }

    /// Field value and world gradient (= rho u0).
    pub fn field_and_gradient(&self, p: Vec2) -> Result<(Complex64, [Complex64; 2])> {
        let u = self.field(p)?;
        let rho = self.rho();
        Ok((u, [rho[0] * u, rho[1] * u]))
    }

    /// Normal derivative (rho . n) u0.
    pub fn normal_derivative(&self, p: Vec2, n: Vec2) -> Result<Complex64> {
        let (u, g) = self.field_and_gradient(p)?;
        let _ = u;
        Ok(g[0] * n.x + g[1] * n.y)
    }
}
