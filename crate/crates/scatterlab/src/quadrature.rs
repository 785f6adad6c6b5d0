//! One-dimensional quadrature building blocks.
//!
//! Gauss-Legendre rules are generated at runtime by Newton iteration on the
//! Legendre recurrence, so any order is available without coefficient tables.
//! The adaptive driver pairs a 15-point rule with an embedded 7-point
//! estimate and bisects until the requested tolerance is met; it is used for
//! panel-local singular corrections where the integrand carries an endpoint
//! logarithm.

use num_complex::Complex64;
use std::cell::RefCell;
use std::collections::HashMap;

/// Nodes and weights of an n-point Gauss-Legendre rule on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussRule {
    /// Build the n-point rule. Nodes are the roots of P_n found by Newton
    /// iteration from the Chebyshev initial guess; weights follow from the
    /// derivative formula w = 2 / ((1 - x^2) P_n'(x)^2).
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            for _ in 0..100 {
                let (p, dp) = legendre_with_derivative(n, x);
                let dx = p / dp;
                x -= dx;
                if dx.abs() < 1e-15 {
                    break;
                }
            }
            let (_, dp) = legendre_with_derivative(n, x);
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x.abs();
            nodes[n - 1 - i] = x.abs();
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        GaussRule { nodes, weights }
    }

    /// Integrate a scalar function over [a, b].
    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut acc = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc += w * f(mid + half * x);
        }
        acc * half
    }
}

thread_local! {
    static RULE_CACHE: RefCell<HashMap<usize, std::rc::Rc<GaussRule>>> = RefCell::new(HashMap::new());
}

/// Cached Gauss rule lookup (rules are immutable once built).
pub fn gauss_rule(n: usize) -> std::rc::Rc<GaussRule> {
    RULE_CACHE.with(|c| {
        c.borrow_mut()
            .entry(n)
            .or_insert_with(|| std::rc::Rc::new(GaussRule::new(n)))
            .clone()
    })
}

/// P_n(x) and P_n'(x) by the three-term recurrence.
pub fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    if n == 0 {
        return (1.0, 0.0);
    }
    let mut p_prev = 1.0;
    let mut p = x;
    for m in 1..n {
        let m = m as f64;
        let p_next = ((2.0 * m + 1.0) * x * p - m * p_prev) / (m + 1.0);
        p_prev = p;
        p = p_next;
    }
    let dp = n as f64 * (x * p - p_prev) / (x * x - 1.0);
    (p, dp)
}

/// Values of P_0..P_{deg} at x.
pub fn legendre_values(deg: usize, x: f64, out: &mut [f64]) {
    out[0] = 1.0;
    if deg == 0 {
        return;
    }
    out[1] = x;
    for m in 1..deg {
        let mf = m as f64;
        out[m + 1] = ((2.0 * mf + 1.0) * x * out[m] - mf * out[m - 1]) / (mf + 1.0);
    }
}

/// Breakpoints of an algebraically graded subdivision of [0, len]:
/// x_j = len * (j/m)^p, j = 0..m. Spacing shrinks toward 0.
pub fn graded_breakpoints(len: f64, m: usize, p: f64) -> Vec<f64> {
    (0..=m)
        .map(|j| len * ((j as f64) / (m as f64)).powf(p))
        .collect()
}

/// Breakpoints on [0, len] graded toward both ends with exponent p:
/// each half receives m graded panels.
pub fn doubly_graded_breakpoints(len: f64, m: usize, p: f64) -> Vec<f64> {
    let half = graded_breakpoints(0.5 * len, m, p);
    let mut pts: Vec<f64> = half.clone();
    for &x in half.iter().rev().skip(1) {
        pts.push(len - x);
    }
    pts
}

/// Adaptive vector-valued quadrature on [a, b].
///
/// The integrand writes `dim` complex components per abscissa. Bisection
/// proceeds until the embedded G7-vs-G15 discrepancy (max over components)
/// drops below `tol` per interval share, or `max_depth` is reached.
/// Integrable endpoint singularities (log, r^(eta-1) after grading) are
/// handled by the geometric pile-up of subintervals.
pub fn adaptive_vector<F>(a: f64, b: f64, dim: usize, tol: f64, max_depth: usize, f: &mut F) -> Vec<Complex64>
where
    F: FnMut(f64, &mut [Complex64]),
{
    let g7 = gauss_rule(7);
    let g15 = gauss_rule(15);
    let mut out = vec![Complex64::new(0.0, 0.0); dim];
    let mut buf = vec![Complex64::new(0.0, 0.0); dim];
    let mut coarse = vec![Complex64::new(0.0, 0.0); dim];
    let mut fine = vec![Complex64::new(0.0, 0.0); dim];
    // Explicit stack of (a, b, depth).
    let mut stack = vec![(a, b, 0usize)];
    while let Some((lo, hi, depth)) = stack.pop() {
        let half = 0.5 * (hi - lo);
        let mid = 0.5 * (lo + hi);
        for v in coarse.iter_mut() {
            *v = Complex64::new(0.0, 0.0);
        }
        for (x, w) in g7.nodes.iter().zip(&g7.weights) {
            f(mid + half * x, &mut buf);
            for (c, v) in coarse.iter_mut().zip(&buf) {
                *c += *w * v;
            }
        }
        for v in fine.iter_mut() {
            *v = Complex64::new(0.0, 0.0);
        }
        for (x, w) in g15.nodes.iter().zip(&g15.weights) {
            f(mid + half * x, &mut buf);
            for (c, v) in fine.iter_mut().zip(&buf) {
                *c += *w * v;
            }
        }
        let mut err: f64 = 0.0;
        for (c, v) in coarse.iter().zip(&fine) {
            err = err.max((c - v).norm());
        }
        err *= half.abs();
        if err < tol || depth >= max_depth {
            for (o, v) in out.iter_mut().zip(&fine) {
                *o += half * v;
            }
        } else {
            stack.push((lo, mid, depth + 1));
            stack.push((mid, hi, depth + 1));
        }
    }
    out
}
