//! Far-field patterns on a uniform angular grid and the L2 metric between
//! them.

use super::solve::FieldSolution;
use super::Vec2;
use crate::{Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Complex far-field samples on the uniform grid theta_j = 2 pi j / N.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FarFieldPattern {
    pub k: f64,
    pub values: Vec<Complex64>,
}

impl FarFieldPattern {
    pub fn new(k: f64, values: Vec<Complex64>) -> Result<FarFieldPattern> {
        let n = values.len();
        if n < 64 || n % 2 != 0 {
            return Err(Error::Parameter(format!(
                "far-field grid must be even and at least 64 angles, got {n}"
            )));
        }
        Ok(FarFieldPattern { k, values })
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn theta(&self, j: usize) -> f64 {
        2.0 * PI * j as f64 / self.n() as f64
    }

    /// Trapezoid-rule L2 norm over the unit circle (spectrally accurate on
    /// the periodic grid).
    pub fn l2_norm(&self) -> f64 {
        let w = 2.0 * PI / self.n() as f64;
        (self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * w).sqrt()
    }

    /// Value at an arbitrary angle by trigonometric interpolation.
    pub fn at_angle(&self, theta: f64) -> Complex64 {
        let n = self.n();
        let half = n / 2;
        let coeffs = self.fourier_coefficients();
        let mut acc = Complex64::new(0.0, 0.0);
        for (mi, c) in coeffs.iter().enumerate() {
            let m = mi as isize - half as isize;
            if m == -(half as isize) {
                // Nyquist mode enters as a cosine
                acc += c * (half as f64 * theta).cos();
            } else {
                acc += c * (Complex64::i() * (m as f64) * theta).exp();
            }
        }
        acc
    }

    /// Resample onto a finer (or equal) even grid by trigonometric
    /// interpolation.
    pub fn resample(&self, n_new: usize) -> Result<FarFieldPattern> {
        if n_new == self.n() {
            return Ok(self.clone());
        }
        if n_new < self.n() {
            return Err(Error::Parameter(
                "resample only onto an equal or finer grid".into(),
            ));
        }
        let values = (0..n_new)
            .map(|j| self.at_angle(2.0 * PI * j as f64 / n_new as f64))
            .collect();
        FarFieldPattern::new(self.k, values)
    }

    /// DFT coefficients ordered m = -N/2 .. N/2-1.
    fn fourier_coefficients(&self) -> Vec<Complex64> {
        let n = self.n();
        let half = n / 2;
        let mut out = Vec::with_capacity(n);
        for mi in 0..n {
            let m = mi as isize - half as isize;
            let mut c = Complex64::new(0.0, 0.0);
            for (j, v) in self.values.iter().enumerate() {
                let th = 2.0 * PI * j as f64 / n as f64;
                c += v * (-Complex64::i() * (m as f64) * th).exp();
            }
            out.push(c / n as f64);
        }
        out
    }
}

/// Far-field pattern of a solved problem on `n` angles.
///
/// The scattered field is represented by K_e[w] - S_e[psi]; its far field
/// is c_k * integral of exp(-i k xhat.y) (-i k (xhat.n) w - psi) ds with
/// c_k = exp(i pi/4) / sqrt(8 pi k).
pub fn far_field(sol: &FieldSolution, n: usize) -> Result<FarFieldPattern> {
    if n < 64 || n % 2 != 0 {
        return Err(Error::Parameter(format!(
            "far-field grid must be even and at least 64 angles, got {n}"
        )));
    }
    let k = sol.incident.wavenumber();
    if sol.vacuum {
        return FarFieldPattern::new(k, vec![Complex64::new(0.0, 0.0); n]);
    }
    let ck = Complex64::from_polar(1.0 / (8.0 * PI * k).sqrt(), PI / 4.0);
    let nodes = sol.mesh.nodes();
    let normals = sol.mesh.normals();
    let weights = sol.mesh.weights();
    let mut values = Vec::with_capacity(n);
    for j in 0..n {
        let th = 2.0 * PI * j as f64 / n as f64;
        let xhat = Vec2::new(th.cos(), th.sin());
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..nodes.len() {
            let phase = (-Complex64::i() * k * xhat.dot(&nodes[i])).exp();
            acc += weights[i]
                * phase
                * (-Complex64::i() * k * xhat.dot(&normals[i]) * sol.density_w[i]
                    - sol.density_psi[i]);
        }
        values.push(ck * acc);
    }
    FarFieldPattern::new(k, values)
}

/// L2(S^1) distance between two far fields for the same wavenumber;
/// unequal grids are aligned by trigonometric resampling.
pub fn farfield_l2_distance(p: &FarFieldPattern, q: &FarFieldPattern) -> Result<f64> {
    if (p.k - q.k).abs() > 1e-12 * p.k.abs().max(1.0) {
        return Err(Error::ContractViolation(format!(
            "far-field patterns have different wavenumbers: {} vs {}",
            p.k, q.k
        )));
    }
    let n = p.n().max(q.n());
    let pr = p.resample(n)?;
    let qr = q.resample(n)?;
    let w = 2.0 * PI / n as f64;
    Ok((pr
        .values
        .iter()
        .zip(&qr.values)
        .map(|(a, b)| (a - b).norm_sqr())
        .sum::<f64>()
        * w)
        .sqrt())
}
