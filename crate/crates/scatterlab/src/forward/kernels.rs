//! Layer-potential kernels for the transmission system, in exactly split
//! form `value = a(r) ln r + b(r)` with entire coefficient functions.
//!
//! The splitting follows from the ascending series of H0/H1: every kernel
//! of the single layer, double layer, adjoint double layer and of the
//! hypersingular *difference* (two wavenumbers on the same curve) has an
//! analytic log coefficient built from J-Bessel factors, a regular part
//! built from the log-regularized Y parts, and at most a geometric pole
//! term `(x-y).n / r^2` that is carried separately because it vanishes
//! identically on straight panels and is constant on circles.

use crate::specfun::{j0, j1, j1_over_x, y0_reg, y1_reg, y1_reg_over_x};
use num_complex::Complex64;
use std::f64::consts::PI;

/// Kernel value split as `a ln r + b`.
#[derive(Debug, Clone, Copy)]
pub struct Split {
    pub a: f64,
    pub b: Complex64,
}

impl Split {
    pub fn value(&self, r: f64) -> Complex64 {
        self.b + self.a * r.ln()
    }
}

/// Relative geometry of a (target, source) pair on the boundary.
///
/// `e = (x - y)/r`; the `..._over_r` fields are `(e . n)/r`, supplied
/// exactly by the mesh (zero on a shared straight edge, +-1/(2R) on a
/// circle) so that no catastrophic cancellation enters near the diagonal.
#[derive(Debug, Clone, Copy)]
pub struct GeomPair {
    pub r: f64,
    pub e_nx: f64,
    pub e_ny: f64,
    pub nn: f64,
    pub e_nx_over_r: f64,
    pub e_ny_over_r: f64,
}

impl GeomPair {
    /// Generic off-diagonal geometry from world data.
    pub fn generic(x: super::Vec2, nx: super::Vec2, y: super::Vec2, ny: super::Vec2) -> GeomPair {
        let d = x - y;
        let r = d.norm();
        let e = d / r;
        GeomPair {
            r,
            e_nx: e.dot(&nx),
            e_ny: e.dot(&ny),
            nn: nx.dot(&ny),
            e_nx_over_r: e.dot(&nx) / r,
            e_ny_over_r: e.dot(&ny) / r,
        }
    }

    /// Both points on one straight panel/edge with common normal.
    pub fn same_line(r: f64) -> GeomPair {
        GeomPair {
            r,
            e_nx: 0.0,
            e_ny: 0.0,
            nn: 1.0,
            e_nx_over_r: 0.0,
            e_ny_over_r: 0.0,
        }
    }

    /// Both points on one circle of radius `radius` with outward normals;
    /// exact identities (x-y).n_y = -r^2/(2R), (x-y).n_x = +r^2/(2R).
    pub fn same_circle(r: f64, radius: f64) -> GeomPair {
        GeomPair {
            r,
            e_nx: r / (2.0 * radius),
            e_ny: -r / (2.0 * radius),
            nn: 1.0 - r * r / (2.0 * radius * radius),
            e_nx_over_r: 0.5 / radius,
            e_ny_over_r: -0.5 / radius,
        }
    }
}

/// radial split of the single-layer kernel (i/4) H0(kappa r)
fn slp_split(kappa: f64, r: f64) -> Split {
    let z = kappa * r;
    let j = j0(z);
    Split {
        a: -j / (2.0 * PI),
        b: Complex64::new(
            -(0.5 * kappa).ln() / (2.0 * PI) * j - 0.25 * y0_reg(z),
            0.25 * j,
        ),
    }
}

/// radial split of (i kappa/4) H1(kappa r) minus its pole 1/(2 pi r)
fn dlp_radial_split(kappa: f64, r: f64) -> Split {
    let z = kappa * r;
    let j = j1(z);
    Split {
        a: -kappa * j / (2.0 * PI),
        b: Complex64::new(
            -kappa * (0.5 * kappa).ln() / (2.0 * PI) * j - 0.25 * kappa * y1_reg(z),
            0.25 * kappa * j,
        ),
    }
}

/// radial split of Phi'(r)/r + 1/(2 pi r^2)
fn p1_split(kappa: f64, r: f64) -> Split {
    let z = kappa * r;
    let k2 = kappa * kappa;
    let jz = j1_over_x(z);
    Split {
        a: k2 * jz / (2.0 * PI),
        b: Complex64::new(
            k2 * (0.5 * kappa).ln() / (2.0 * PI) * jz + 0.25 * k2 * y1_reg_over_x(z),
            -0.25 * k2 * jz,
        ),
    }
}

/// radial split of -(i kappa^2/4) H0(kappa r)
fn h0_quad_split(kappa: f64, r: f64) -> Split {
    let z = kappa * r;
    let k2 = kappa * kappa;
    let j = j0(z);
    Split {
        a: k2 * j / (2.0 * PI),
        b: Complex64::new(
            k2 * (0.5 * kappa).ln() / (2.0 * PI) * j + 0.25 * k2 * y0_reg(z),
            -0.25 * k2 * j,
        ),
    }
}

/// The four kernel blocks of the combined transmission system in the two
/// boundary unknowns (trace f, interior normal derivative g):
///
/// ```text
///   [ I  + (K_i - K_e)          gamma S_e - S_i           ] [f]   [u_inc]
///   [ T_i - T_e                 (gamma+1)/2 I
///                                + gamma K'_e - K'_i      ] [g] = [dn u_inc]
/// ```
#[derive(Debug, Clone, Copy)]
pub struct TransmissionKernels {
    pub k_ext: f64,
    pub k_int: f64,
    pub gamma: f64,
}

impl TransmissionKernels {
    /// K_{int} - K_{ext} applied to the trace (poles cancel).
    pub fn row1_f(&self, g: &GeomPair) -> Split {
        let i = dlp_radial_split(self.k_int, g.r);
        let e = dlp_radial_split(self.k_ext, g.r);
        Split {
            a: (i.a - e.a) * g.e_ny,
            b: (i.b - e.b) * g.e_ny,
        }
    }

    /// gamma S_{ext} - S_{int}.
    pub fn row1_g(&self, g: &GeomPair) -> Split {
        let i = slp_split(self.k_int, g.r);
        let e = slp_split(self.k_ext, g.r);
        Split {
            a: self.gamma * e.a - i.a,
            b: self.gamma * e.b - i.b,
        }
    }

    /// T_{int} - T_{ext} (hypersingular parts cancel, log remains).
    pub fn row2_f(&self, g: &GeomPair) -> Split {
        let p1d = {
            let i = p1_split(self.k_int, g.r);
            let e = p1_split(self.k_ext, g.r);
            Split {
                a: i.a - e.a,
                b: i.b - e.b,
            }
        };
        let h0d = {
            let i = h0_quad_split(self.k_int, g.r);
            let e = h0_quad_split(self.k_ext, g.r);
            Split {
                a: i.a - e.a,
                b: i.b - e.b,
            }
        };
        // B = Phi''-difference = h0d - p1d; A = Phi'/r-difference = p1d
        let crossed = g.e_nx * g.e_ny;
        Split {
            a: -(h0d.a - p1d.a) * crossed - p1d.a * (g.nn - crossed),
            b: -(h0d.b - p1d.b) * crossed - p1d.b * (g.nn - crossed),
        }
    }

    /// gamma K'_{ext} - K'_{int}; carries the residual pole
    /// -(gamma-1)(e.n_x)/(2 pi r).
    pub fn row2_g(&self, g: &GeomPair) -> Split {
        let i = dlp_radial_split(self.k_int, g.r);
        let e = dlp_radial_split(self.k_ext, g.r);
        let a = -(self.gamma * e.a - i.a) * g.e_nx;
        let mut b = -(self.gamma * e.b - i.b) * g.e_nx;
        b -= Complex64::new((self.gamma - 1.0) / (2.0 * PI) * g.e_nx_over_r, 0.0);
        Split { a, b }
    }

    pub fn all_rows(&self, g: &GeomPair) -> [Split; 4] {
        [self.row1_f(g), self.row1_g(g), self.row2_f(g), self.row2_g(g)]
    }
}

// ---------------------------------------------------------------------------
// Off-boundary evaluation kernels (direct form; r is bounded away from 0
// by the caller, near-boundary accuracy is handled by adaptive panel
// integration, not by splitting).
// ---------------------------------------------------------------------------

/// Fundamental solution Phi(r) = (i/4) H0(kappa r).
pub fn fundamental(kappa: f64, r: f64) -> Complex64 {
    let z = kappa * r;
    Complex64::new(-crate::specfun::y0(z), j0(z)) * 0.25
}

/// Radial derivative Phi'(r) = -(i kappa/4) H1(kappa r).
pub fn fundamental_dr(kappa: f64, r: f64) -> Complex64 {
    let z = kappa * r;
    Complex64::new(crate::specfun::y1(z), -j1(z)) * (0.25 * kappa)
}

/// Second radial derivative Phi''(r).
pub fn fundamental_drr(kappa: f64, r: f64) -> Complex64 {
    let z = kappa * r;
    let h0 = Complex64::new(j0(z), crate::specfun::y0(z));
    // Phi'' = -(i kappa^2/4) H0 - Phi'/r
    Complex64::new(0.0, -0.25 * kappa * kappa) * h0 - fundamental_dr(kappa, r) / r
}

/// Double-layer kernel dPhi/dn_y = (i kappa/4) H1(kappa r) (e . n_y).
pub fn dlp_value(kappa: f64, r: f64, e_ny: f64) -> Complex64 {
    let z = kappa * r;
    Complex64::new(-crate::specfun::y1(z), j1(z)) * (0.25 * kappa * e_ny)
}

/// Gradient (w.r.t. x) of the single-layer kernel: Phi'(r) e.
pub fn slp_gradient(kappa: f64, r: f64, e: super::Vec2) -> [Complex64; 2] {
    let d = fundamental_dr(kappa, r);
    [d * e.x, d * e.y]
}

/// Gradient (w.r.t. x) of the double-layer kernel:
/// -[Phi''(r)(e.n_y) e + Phi'(r)(n_y - (e.n_y) e)/r].
pub fn dlp_gradient(kappa: f64, r: f64, e: super::Vec2, ny: super::Vec2) -> [Complex64; 2] {
    let d1 = fundamental_dr(kappa, r);
    let d2 = fundamental_drr(kappa, r);
    let eny = e.dot(&ny);
    [
        -(d2 * (eny * e.x) + d1 * ((ny.x - eny * e.x) / r)),
        -(d2 * (eny * e.y) + d1 * ((ny.y - eny * e.y) / r)),
    ]
}
