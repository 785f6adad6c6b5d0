//! Herglotz wave synthesis and density recovery, disk transmission
//! eigenvalues, and the Hoelder-quotient probe at corners.

use crate::geometry::{CornerFrame, Polygon, Vec2};
use crate::specfun::{bessel_j_seq, cyl_derivative_from_seq};
use crate::{Error, Result};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// A kernel density on the unit circle, sampled at M uniform directions
/// d_j = (cos(2 pi j / M), sin(2 pi j / M)).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HerglotzDensity {
    values: Vec<Complex64>,
}

impl HerglotzDensity {
    pub fn new(values: Vec<Complex64>) -> Result<HerglotzDensity> {
        let m = values.len();
        if m < 32 || m % 2 != 0 {
            return Err(Error::Parameter(format!(
                "density needs an even direction count of at least 32, got {m}"
            )));
        }
        Ok(HerglotzDensity { values })
    }

    pub fn zero(m: usize) -> Result<HerglotzDensity> {
        HerglotzDensity::new(vec![Complex64::new(0.0, 0.0); m])
    }

    /// Sample a closed-form density g(theta) at M uniform directions.
    pub fn from_fn(m: usize, g: impl Fn(f64) -> Complex64) -> Result<HerglotzDensity> {
        HerglotzDensity::new(
            (0..m)
                .map(|j| g(2.0 * PI * j as f64 / m as f64))
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn direction(&self, j: usize) -> Vec2 {
        let th = 2.0 * PI * j as f64 / self.len() as f64;
        Vec2::new(th.cos(), th.sin())
    }

    /// Trapezoid-rule L2 norm on the circle.
    pub fn l2_norm(&self) -> f64 {
        let w = 2.0 * PI / self.len() as f64;
        (self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * w).sqrt()
    }

    /// Superposition of plane waves: trapezoid rule over the circle
    /// (spectrally accurate in the direction count).
    pub fn wave_at(&self, k: f64, p: Vec2) -> Complex64 {
        let w = 2.0 * PI / self.len() as f64;
        let mut acc = Complex64::new(0.0, 0.0);
        for (j, g) in self.values.iter().enumerate() {
            let d = self.direction(j);
            acc += g * (Complex64::i() * k * d.dot(&p)).exp();
        }
        acc * w
    }

    pub fn wave_gradient(&self, k: f64, p: Vec2) -> [Complex64; 2] {
        let w = 2.0 * PI / self.len() as f64;
        let mut gx = Complex64::new(0.0, 0.0);
        let mut gy = Complex64::new(0.0, 0.0);
        for (j, g) in self.values.iter().enumerate() {
            let d = self.direction(j);
            let v = g * (Complex64::i() * k * d.dot(&p)).exp() * Complex64::i() * k;
            gx += v * d.x;
            gy += v * d.y;
        }
        [gx * w, gy * w]
    }

    /// CSV serialization: header `theta,re,im`, one row per direction.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("theta,re,im\n");
        for (j, v) in self.values.iter().enumerate() {
            let th = 2.0 * PI * j as f64 / self.len() as f64;
            s.push_str(&format!("{th:.17e},{:.17e},{:.17e}\n", v.re, v.im));
        }
        s
    }

    /// Parse the CSV density format; the theta column must be the uniform
    /// grid in order.
    pub fn from_csv(text: &str) -> Result<HerglotzDensity> {
        let mut values = Vec::new();
        let mut rows = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || (i == 0 && line.starts_with("theta")) {
                continue;
            }
            let cols: Vec<&str> = line.split(',').collect();
            if cols.len() != 3 {
                return Err(Error::Parameter(format!(
                    "density csv line {}: expected theta,re,im",
                    i + 1
                )));
            }
            let th: f64 = cols[0]
                .parse()
                .map_err(|_| Error::Parameter(format!("density csv line {}: bad theta", i + 1)))?;
            let re: f64 = cols[1]
                .parse()
                .map_err(|_| Error::Parameter(format!("density csv line {}: bad re", i + 1)))?;
            let im: f64 = cols[2]
                .parse()
                .map_err(|_| Error::Parameter(format!("density csv line {}: bad im", i + 1)))?;
            rows.push(th);
            values.push(Complex64::new(re, im));
        }
        let m = values.len();
        for (j, &th) in rows.iter().enumerate() {
            let want = 2.0 * PI * j as f64 / m as f64;
            if (th - want).abs() > 1e-9 {
                return Err(Error::Parameter(format!(
                    "density csv theta grid is not uniform at row {j}: {th} vs {want}"
                )));
            }
        }
        HerglotzDensity::new(values)
    }

    pub fn relative_l2_error(&self, other: &HerglotzDensity) -> f64 {
        let w = 2.0 * PI / self.len() as f64;
        let num: f64 = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            * w;
        num.sqrt() / other.l2_norm().max(1e-300)
    }
}

/// Regular grid clipped to a polygon, carrying the point list and the
/// forward-difference pairs of the discrete Sobolev-1 surrogate.
#[derive(Debug, Clone)]
pub struct H1Grid {
    pub points: Vec<Vec2>,
    pub step: f64,
    /// (from, to) index pairs of forward differences (x and y neighbors).
    pub pairs: Vec<(usize, usize)>,
}

impl H1Grid {
    /// Grid with roughly `n_across` cells across the polygon's bounding
    /// box, keeping only points inside the polygon.
    pub fn new(domain: &Polygon, n_across: usize) -> Result<H1Grid> {
        let vs = domain.vertices();
        let (mut xmin, mut xmax, mut ymin, mut ymax) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
        for v in vs {
            xmin = xmin.min(v.x);
            xmax = xmax.max(v.x);
            ymin = ymin.min(v.y);
            ymax = ymax.max(v.y);
        }
        let step = ((xmax - xmin).max(ymax - ymin)) / n_across as f64;
        let nx = ((xmax - xmin) / step).ceil() as usize + 1;
        let ny = ((ymax - ymin) / step).ceil() as usize + 1;
        let mut index = vec![vec![None; ny]; nx];
        let mut points = Vec::new();
        for i in 0..nx {
            for j in 0..ny {
                let p = Vec2::new(xmin + i as f64 * step, ymin + j as f64 * step);
                if domain.contains(p) {
                    index[i][j] = Some(points.len());
                    points.push(p);
                }
            }
        }
        if points.len() < 16 {
            return Err(Error::Parameter(format!(
                "target grid too coarse: only {} interior points",
                points.len()
            )));
        }
        let mut pairs = Vec::new();
        for i in 0..nx {
            for j in 0..ny {
                if let Some(a) = index[i][j] {
                    if i + 1 < nx {
                        if let Some(b) = index[i + 1][j] {
                            pairs.push((a, b));
                        }
                    }
                    if j + 1 < ny {
                        if let Some(b) = index[i][j + 1] {
                            pairs.push((a, b));
                        }
                    }
                }
            }
        }
        Ok(H1Grid { points, step, pairs })
    }

    /// Discrete Sobolev-1 norm of samples on this grid.
    pub fn h1_norm(&self, values: &[Complex64]) -> f64 {
        let mut acc: f64 = values.iter().map(|v| v.norm_sqr()).sum();
        for &(a, b) in &self.pairs {
            acc += ((values[b] - values[a]) / self.step).norm_sqr();
        }
        (acc * self.step * self.step).sqrt()
    }
}

/// Result of one regularized density fit.
#[derive(Debug, Clone)]
pub struct HerglotzFit {
    pub density: HerglotzDensity,
    /// Achieved discrete Sobolev-1 misfit.
    pub misfit: f64,
    pub density_norm: f64,
    /// False when a requested misfit was not reached (expected behavior on
    /// non-extendable targets, not an error).
    pub achieved: bool,
}

/// Precomputed least-squares factorization for Herglotz density recovery
/// over a fixed grid and wavenumber; solves many regularization weights
/// cheaply.
pub struct HerglotzFitter {
    m: usize,
    grid: H1Grid,
    svd_vt: DMatrix<Complex64>,
    singular: Vec<f64>,
    rhs_rot: DVector<Complex64>,
    /// Squared norm of the target component orthogonal to the range of the
    /// design matrix (enters every misfit).
    rhs_perp_sqr: f64,
    target_h1: f64,
    /// sqrt of the trapezoid weight, used to rescale between the sampled
    /// density and the L2-normalized unknown.
    scale: f64,
}

impl HerglotzFitter {
    /// Build the design matrix for `m` directions from the target samples
    /// on `grid`.
    pub fn new(grid: H1Grid, k: f64, m: usize, target: &[Complex64]) -> Result<HerglotzFitter> {
        if m < 32 || m % 2 != 0 {
            return Err(Error::Parameter(format!(
                "direction count must be even and at least 32, got {m}"
            )));
        }
        if target.len() != grid.points.len() {
            return Err(Error::Parameter(
                "target sample count does not match the grid".into(),
            ));
        }
        let n_rows = grid.points.len() + grid.pairs.len();
        let w = 2.0 * PI / m as f64;
        let scale = w.sqrt();
        let cell = grid.step;
        let mut a = DMatrix::from_element(n_rows, m, Complex64::new(0.0, 0.0));
        let mut b = DVector::from_element(n_rows, Complex64::new(0.0, 0.0));
        // value rows: sqrt(area) * v(x)
        for (row, &p) in grid.points.iter().enumerate() {
            for j in 0..m {
                let th = 2.0 * PI * j as f64 / m as f64;
                let d = Vec2::new(th.cos(), th.sin());
                // column scaling folds the trapezoid weight into the
                // unknown, making the penalty the plain euclidean norm
                a[(row, j)] = (Complex64::i() * k * d.dot(&p)).exp() * scale * cell;
            }
            b[row] = target[row] * cell;
        }
        // difference rows: sqrt(area) * (v(b) - v(a)) / step
        for (rowi, &(ia, ib)) in grid.pairs.iter().enumerate() {
            let row = grid.points.len() + rowi;
            let (pa, pb) = (grid.points[ia], grid.points[ib]);
            for j in 0..m {
                let th = 2.0 * PI * j as f64 / m as f64;
                let d = Vec2::new(th.cos(), th.sin());
                let va = (Complex64::i() * k * d.dot(&pa)).exp();
                let vb = (Complex64::i() * k * d.dot(&pb)).exp();
                a[(row, j)] = (vb - va) * scale;
            }
            b[row] = target[ib] - target[ia];
        }
        let target_h1 = grid.h1_norm(target);
        let svd = a.svd(true, true);
        let u = svd.u.ok_or_else(|| Error::Parameter("svd failed".into()))?;
        let vt = svd.v_t.ok_or_else(|| Error::Parameter("svd failed".into()))?;
        let singular: Vec<f64> = svd.singular_values.iter().copied().collect();
        let rhs_rot = u.ad_mul(&b);
        let rhs_perp_sqr = (b.norm_squared() - rhs_rot.norm_squared()).max(0.0);
        Ok(HerglotzFitter {
            m,
            grid,
            svd_vt: vt,
            singular,
            rhs_rot,
            rhs_perp_sqr,
            target_h1,
            scale,
        })
    }

    pub fn grid(&self) -> &H1Grid {
        &self.grid
    }

    pub fn target_h1(&self) -> f64 {
        self.target_h1
    }

    /// Solve the regularized least squares for one penalty weight.
    /// `requested_misfit`, when given, only controls the `achieved` flag.
    pub fn solve(&self, lambda: f64, requested_misfit: Option<f64>) -> Result<HerglotzFit> {
        if !(lambda > 0.0) {
            return Err(Error::Parameter(format!(
                "regularization weight must be positive, got {lambda}"
            )));
        }
        let r = self.singular.len();
        let mut coeff = DVector::from_element(r, Complex64::new(0.0, 0.0));
        for i in 0..r {
            let s = self.singular[i];
            coeff[i] = self.rhs_rot[i] * (s / (s * s + lambda));
        }
        let gtilde = self.svd_vt.ad_mul(&coeff);
        // ||A g - b||^2 = sum over modes of |lambda/(s^2+lambda) rhs_i|^2
        // plus the squared component of b orthogonal to the range of A
        let mut misfit_sq = self.rhs_perp_sqr;
        for i in 0..r {
            let s = self.singular[i];
            let res = self.rhs_rot[i] * (lambda / (s * s + lambda));
            misfit_sq += res.norm_sqr();
        }
        let misfit = misfit_sq.sqrt();
        let values: Vec<Complex64> = (0..self.m).map(|j| gtilde[j] / self.scale).collect();
        let density = HerglotzDensity::new(values)?;
        let density_norm = density.l2_norm();
        let achieved = requested_misfit.map(|eps| misfit <= eps).unwrap_or(true);
        Ok(HerglotzFit {
            density,
            misfit,
            density_norm,
            achieved,
        })
    }
}

/// Fit a Herglotz density to target samples on a grid: Tikhonov-regularized
/// least squares in the discrete Sobolev-1 misfit.
pub fn herglotz_density_fit(
    grid: &H1Grid,
    k: f64,
    m: usize,
    target: &[Complex64],
    lambda: f64,
    requested_misfit: Option<f64>,
) -> Result<HerglotzFit> {
    HerglotzFitter::new(grid.clone(), k, m, target)?.solve(lambda, requested_misfit)
}

/// One interior transmission eigenvalue of the disk: wavenumber, angular
/// mode, and the determinant diagnostics at the root.
#[derive(Debug, Clone, Serialize)]
pub struct EigenPair {
    pub k_star: f64,
    pub mode: u32,
    pub radius: f64,
    pub gamma: f64,
    pub q: f64,
    pub det_at_root: f64,
    pub det_scale: f64,
}

/// Matching determinant of the disk interior transmission problem for
/// angular mode n at wavenumber k.
pub fn disk_itp_determinant(radius: f64, gamma: f64, q: f64, n: u32, k: f64) -> Result<f64> {
    let ki = k * (q / gamma).sqrt();
    let za = k * radius;
    let zi = ki * radius;
    let je = bessel_j_seq(n + 1, za)?;
    let ji = bessel_j_seq(n + 1, zi)?;
    let djn = cyl_derivative_from_seq(&je, n as usize, za);
    let djin = cyl_derivative_from_seq(&ji, n as usize, zi);
    // nontrivial (u, v) with u = a J_n(ki r), v = b J_n(k r):
    //   a J_n(ki a) = b J_n(k a),  a gamma ki J_n'(ki a) = b k J_n'(k a)
    Ok(ji[n as usize] * k * djn - gamma * ki * djin * je[n as usize])
}

/// Locate interior transmission eigenvalues of a disk by scanning the
/// matching determinant for sign changes and bisecting. Wavenumbers below
/// 0.1 are excluded (small-argument asymptotics dominate there and produce
/// no genuine roots).
pub fn disk_transmission_eigenvalues(
    radius: f64,
    gamma: f64,
    q: f64,
    k_interval: (f64, f64),
    modes: std::ops::RangeInclusive<u32>,
    scan_points: usize,
) -> Result<Vec<EigenPair>> {
    if gamma == 1.0 && q == 1.0 {
        return Err(Error::Parameter(
            "transmission eigenvalues need a contrast in gamma or q".into(),
        ));
    }
    let (lo, hi) = k_interval;
    if !(hi > lo && lo >= 0.0) {
        return Err(Error::Parameter(format!(
            "invalid wavenumber interval ({lo}, {hi})"
        )));
    }
    let lo = lo.max(0.1);
    let mut out = Vec::new();
    for n in modes {
        let det = |k: f64| disk_itp_determinant(radius, gamma, q, n, k);
        let mut prev_k = lo;
        let mut prev_v = det(prev_k)?;
        let mut scale: f64 = prev_v.abs();
        for i in 1..=scan_points {
            let k = lo + (hi - lo) * i as f64 / scan_points as f64;
            let v = det(k)?;
            scale = scale.max(v.abs());
            if prev_v == 0.0 || v == 0.0 || prev_v.signum() != v.signum() {
                // bisect
                let (mut a, mut b) = (prev_k, k);
                let (mut fa, _fb) = (prev_v, v);
                for _ in 0..80 {
                    let mid = 0.5 * (a + b);
                    let fm = det(mid)?;
                    if fa.signum() == fm.signum() {
                        a = mid;
                        fa = fm;
                    } else {
                        b = mid;
                    }
                }
                let k_star = 0.5 * (a + b);
                let det_at_root = det(k_star)?.abs();
                out.push(EigenPair {
                    k_star,
                    mode: n,
                    radius,
                    gamma,
                    q,
                    det_at_root,
                    det_scale: scale,
                });
            }
            prev_k = k;
            prev_v = v;
        }
    }
    out.sort_by(|a, b| a.k_star.partial_cmp(&b.k_star).unwrap());
    Ok(out)
}

/// One row of the Hoelder-quotient table.
#[derive(Debug, Clone, Serialize)]
pub struct HolderRecord {
    pub scale: f64,
    pub max_quotient: f64,
    pub any_warn: bool,
}

/// Probe sup |u(x) - u(x')| / |x - x'|^eta over point pairs approaching
/// the corner along a geometric schedule of scales. The evaluator returns
/// (value, accuracy warning).
pub fn holder_quotient_probe(
    eval: &dyn Fn(Vec2) -> (Complex64, bool),
    frame: &CornerFrame,
    eta: f64,
    theta_range: (f64, f64),
    scales: &[f64],
    samples_per_scale: usize,
) -> (Vec<HolderRecord>, f64) {
    let mut records = Vec::with_capacity(scales.len());
    for &s in scales {
        let mut pts = Vec::new();
        let margin = 0.08 * (theta_range.1 - theta_range.0);
        let radii = [0.45 * s, 0.7 * s, 1.0 * s];
        for &r in &radii {
            for i in 0..samples_per_scale {
                let th = theta_range.0
                    + margin
                    + (theta_range.1 - theta_range.0 - 2.0 * margin) * i as f64
                        / (samples_per_scale.max(2) - 1) as f64;
                pts.push(frame.from_polar(r, th));
            }
        }
        let vals: Vec<(Complex64, bool)> = pts.iter().map(|&p| eval(p)).collect();
        let mut best: f64 = 0.0;
        let mut any_warn = false;
        for i in 0..pts.len() {
            for j in (i + 1)..pts.len() {
                let d = (pts[i] - pts[j]).norm();
                if d < 0.02 * s {
                    continue;
                }
                let q = (vals[i].0 - vals[j].0).norm() / d.powf(eta);
                if q > best {
                    best = q;
                }
                any_warn |= vals[i].1 || vals[j].1;
            }
        }
        records.push(HolderRecord {
            scale: s,
            max_quotient: best,
            any_warn,
        });
    }
    // trend slope of log(quotient) vs log(scale)
    let pts: Vec<(f64, f64)> = records
        .iter()
        .filter(|r| r.max_quotient > 0.0)
        .map(|r| (r.scale.ln(), r.max_quotient.ln()))
        .collect();
    let slope = if pts.len() >= 2 {
        let n = pts.len() as f64;
        let sx: f64 = pts.iter().map(|p| p.0).sum();
        let sy: f64 = pts.iter().map(|p| p.1).sum();
        let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
        let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
        (n * sxy - sx * sy) / (n * sxx - sx * sx)
    } else {
        0.0
    };
    (records, slope)
}
