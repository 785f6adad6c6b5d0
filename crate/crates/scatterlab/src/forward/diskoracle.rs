//! Separation-of-variables reference solution for a penetrable disk under
//! plane-wave incidence: cylindrical-harmonic matching at the interface.
//! Serves as the accuracy oracle for the boundary-integral solver and for
//! floor calibration.

use super::farfield::FarFieldPattern;
use super::Vec2;
use crate::specfun::{bessel_j_seq, bessel_y_seq, cyl_derivative_from_seq};
use crate::{Error, Result};
use num_complex::Complex64;
use std::f64::consts::PI;

/// Cylindrical-harmonic expansion of the transmission solution for a disk
/// of radius `radius` about the origin with constant contrasts.
#[derive(Debug, Clone)]
pub struct DiskSeries {
    pub radius: f64,
    pub gamma: f64,
    pub q: f64,
    pub k: f64,
    pub dir: Vec2,
    /// Interior coefficients for orders 0..=n_max (symmetric in the order).
    alpha: Vec<Complex64>,
    /// Scattered-field coefficients for orders 0..=n_max.
    beta: Vec<Complex64>,
}

impl DiskSeries {
    pub fn new(radius: f64, gamma: f64, q: f64, k: f64, dir: Vec2) -> Result<DiskSeries> {
        if gamma == 1.0 && q == 1.0 {
            return Err(Error::Parameter(
                "disk series needs a contrast (vacuum handled by the shortcut)".into(),
            ));
        }
        if !(radius > 0.0 && k > 0.0 && gamma > 0.0 && q > 0.0) {
            return Err(Error::Parameter(
                "disk series needs positive radius, wavenumber and coefficients".into(),
            ));
        }
        let dir = dir / dir.norm();
        let ki = k * (q / gamma).sqrt();
        let za = k * radius;
        let zi = ki * radius;
        let n_max = (za + 8.0 * za.cbrt() + 24.0).ceil() as u32;
        let je = bessel_j_seq(n_max + 1, za)?;
        let ye = bessel_y_seq(n_max + 1, za)?;
        let ji = bessel_j_seq(n_max + 1, zi)?;
        let mut alpha = Vec::with_capacity(n_max as usize + 1);
        let mut beta = Vec::with_capacity(n_max as usize + 1);
        for n in 0..=n_max as usize {
            let jn = je[n];
            let djn = cyl_derivative_from_seq(&je, n, za);
            let hn = Complex64::new(je[n], ye[n]);
            let dhn = Complex64::new(
                cyl_derivative_from_seq(&je, n, za),
                cyl_derivative_from_seq(&ye, n, za),
            );
            let jin = ji[n];
            let djin = cyl_derivative_from_seq(&ji, n, zi);
            // match u and sigma du/dr at r = radius:
            //   alpha J_n(ki a) - beta H_n(k a) = i^n J_n(k a)
            //   alpha gamma ki J_n'(ki a) - beta k H_n'(k a) = i^n k J_n'(k a)
            let a11 = Complex64::new(jin, 0.0);
            let a12 = -hn;
            let a21 = Complex64::new(gamma * ki * djin, 0.0);
            let a22 = -k * dhn;
            let inn = Complex64::i().powu(n as u32);
            let b1 = inn * jn;
            let b2 = inn * k * djn;
            let det = a11 * a22 - a12 * a21;
            if det.norm() < 1e-280 {
                return Err(Error::Solver {
                    msg: format!("disk series matching degenerate at order {n}"),
                    cond_estimate: f64::INFINITY,
                    residual: f64::INFINITY,
                });
            }
            alpha.push((b1 * a22 - a12 * b2) / det);
            beta.push((a11 * b2 - b1 * a21) / det);
        }
        Ok(DiskSeries {
            radius,
            gamma,
            q,
            k,
            dir,
            alpha,
            beta,
        })
    }

    fn incident_angle(&self) -> f64 {
        self.dir.y.atan2(self.dir.x)
    }

    /// Total field anywhere (series evaluation).
    pub fn field(&self, p: Vec2) -> Result<Complex64> {
        let r = p.norm();
        let phi = p.y.atan2(p.x) - self.incident_angle();
        let ki = self.k * (self.q / self.gamma).sqrt();
        if r <= self.radius {
            let z = ki * r;
            let ji = bessel_j_seq(self.alpha.len() as u32 - 1, z)?;
            let mut acc = self.alpha[0] * ji[0];
            for n in 1..self.alpha.len() {
                acc += 2.0 * self.alpha[n] * ji[n] * (n as f64 * phi).cos();
            }
            Ok(acc)
        } else {
            // incident part in closed form (the cylindrical expansion would
            // need ~ k r terms at large radii), scattered part as a series
            let z = self.k * r;
            let je = bessel_j_seq(self.beta.len() as u32 - 1, z)?;
            let ye = bessel_y_seq(self.beta.len() as u32 - 1, z)?;
            let mut acc = (Complex64::i() * self.k * self.dir.dot(&p)).exp();
            acc += self.beta[0] * Complex64::new(je[0], ye[0]);
            for n in 1..self.beta.len() {
                let hn = Complex64::new(je[n], ye[n]);
                acc += 2.0 * self.beta[n] * hn * (n as f64 * phi).cos();
            }
            Ok(acc)
        }
    }

    /// Boundary trace of the total field at polar angle `theta` (world).
    pub fn boundary_trace(&self, theta: f64) -> Result<Complex64> {
        let ki = self.k * (self.q / self.gamma).sqrt();
        let phi = theta - self.incident_angle();
        let z = ki * self.radius;
        let ji = bessel_j_seq(self.alpha.len() as u32 - 1, z)?;
        let mut acc = self.alpha[0] * ji[0];
        for n in 1..self.alpha.len() {
            acc += 2.0 * self.alpha[n] * ji[n] * (n as f64 * phi).cos();
        }
        Ok(acc)
    }

    /// Interior normal (radial) derivative of the total field at polar
    /// angle `theta`.
    pub fn boundary_normal_derivative(&self, theta: f64) -> Result<Complex64> {
        let ki = self.k * (self.q / self.gamma).sqrt();
        let phi = theta - self.incident_angle();
        let z = ki * self.radius;
        let ji = bessel_j_seq(self.alpha.len() as u32, z)?;
        let mut acc = self.alpha[0] * ki * cyl_derivative_from_seq(&ji, 0, z);
        for n in 1..self.alpha.len() {
            acc += 2.0
                * self.alpha[n]
                * ki
                * cyl_derivative_from_seq(&ji, n, z)
                * (n as f64 * phi).cos();
        }
        Ok(acc)
    }

    /// Far-field pattern on `n` uniform angles.
    pub fn far_field(&self, n: usize) -> Result<FarFieldPattern> {
        let c = Complex64::from_polar((2.0 / (PI * self.k)).sqrt(), -PI / 4.0);
        let th0 = self.incident_angle();
        let mut values = Vec::with_capacity(n);
        for j in 0..n {
            let phi = 2.0 * PI * j as f64 / n as f64 - th0;
            let mut acc = self.beta[0];
            for m in 1..self.beta.len() {
                let mi = (-Complex64::i()).powu(m as u32);
                acc += 2.0 * self.beta[m] * mi * (m as f64 * phi).cos();
            }
            values.push(c * acc);
        }
        FarFieldPattern::new(self.k, values)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn series_satisfies_transmission_conditions() {
        let s = DiskSeries::new(1.0, 2.0, 1.0, 1.0, Vec2::new(1.0, 0.0)).unwrap();
        // continuity of the trace: compare interior series against the
        // exterior series just outside
        for theta in [0.0, 0.7, 2.2, 4.0] {
            let inner = s.boundary_trace(theta).unwrap();
            let p = Vec2::new(theta.cos(), theta.sin()) * 1.000001;
            let outer = s.field(p).unwrap();
            assert!(
                (inner - outer).norm() < 2e-5,
                "trace mismatch at {theta}: {inner} vs {outer}"
            );
        }
    }

    #[test]
    fn series_flux_condition_by_finite_differences() {
        let gamma = 2.0;
        let s = DiskSeries::new(1.0, gamma, 1.0, 1.0, Vec2::new(1.0, 0.0)).unwrap();
        let h = 1e-5;
        for theta in [0.3f64, 1.9] {
            let nu = Vec2::new(theta.cos(), theta.sin());
            // exterior radial derivative by finite differences
            let up = s.field(nu * (1.0 + 2.0 * h)).unwrap();
            let um = s.field(nu * (1.0 + h)).unwrap();
            let ext = (up - um) / h;
            let int = s.boundary_normal_derivative(theta).unwrap();
            // sigma continuity: gamma * interior derivative = exterior
            assert!(
                (gamma * int - ext).norm() < 2e-3 * ext.norm().max(1.0),
                "flux mismatch at {theta}: {} vs {}",
                gamma * int,
                ext
            );
        }
    }

    #[test]
    fn far_field_consistent_with_large_radius_asymptotics() {
        let s = DiskSeries::new(1.0, 2.0, 1.0, 1.0, Vec2::new(1.0, 0.0)).unwrap();
        let ff = s.far_field(64).unwrap();
        for j in [0usize, 10, 33] {
            let th = ff.theta(j);
            let big_r = 1.0e4;
            let p = Vec2::new(th.cos(), th.sin()) * big_r;
            let total = s.field(p).unwrap();
            let inc = (Complex64::i() * s.k * s.dir.dot(&p)).exp();
            let us = total - inc;
            let extrapolated = us * big_r.sqrt() * (-Complex64::i() * s.k * big_r).exp();
            assert!(
                (extrapolated - ff.values[j]).norm() < 2e-3 * ff.values[j].norm().max(1e-3),
                "angle {th}: {extrapolated} vs {}",
                ff.values[j]
            );
        }
    }

    #[test]
    fn optical_theorem_for_lossless_disk() {
        // 2D optical theorem with this far-field convention:
        // ||u_inf||^2 = -sqrt(8 pi / k) Re[exp(i pi/4) u_inf(dir)]
        for (gamma, q, k) in [(2.0, 1.0, 1.0), (0.5, 1.5, 2.0), (3.0, 2.0, 0.7)] {
            let dir = Vec2::new(0.6, 0.8);
            let s = DiskSeries::new(1.0, gamma, q, k, dir).unwrap();
            let ff = s.far_field(256).unwrap();
            let forward = {
                // value at the incident direction by trig interpolation
                ff.at_angle(dir.y.atan2(dir.x))
            };
            let lhs = ff.l2_norm().powi(2);
            let rhs = -(8.0 * PI / k).sqrt()
                * (Complex64::from_polar(1.0, PI / 4.0) * forward).re;
            assert!(
                (lhs - rhs).abs() < 1e-10 * lhs.max(1e-10),
                "optical theorem: {lhs} vs {rhs} (gamma={gamma}, q={q}, k={k})"
            );
        }
    }
}
