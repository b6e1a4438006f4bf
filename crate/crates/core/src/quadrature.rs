//! Orthonormal Hermite functions and the Gauss rules built on them.
//!
//! Everything here runs three-term recurrences on *normalized* functions with a
//! running power-of-ten rescale, so values stay representable for orders in the
//! thousands and at arguments far into the Gaussian tail.

use std::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};

const RESCALE: f64 = 1e100;

/// Fills `out[n] = phi_n(y)` for `n < out.len()`, where
/// `phi_n(y) = (2^n n! sqrt(pi))^{-1/2} H_n(y) e^{-y^2/2}`.
pub fn hermite_functions(y: f64, out: &mut [f64]) {
    if out.is_empty() {
        return;
    }
    // p_n = phi_n * exp(-log_scale)
    let mut log_scale = -0.25 * PI.ln() - 0.5 * y * y;
    let mut prev = 0.0;
    let mut cur = 1.0;
    out[0] = log_scale.exp();
    for n in 0..out.len() - 1 {
        let nf = n as f64;
        let next = (2.0 / (nf + 1.0)).sqrt() * y * cur - (nf / (nf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
        if cur.abs() > RESCALE {
            cur /= RESCALE;
            prev /= RESCALE;
            log_scale += RESCALE.ln();
        }
        out[n + 1] = cur * log_scale.exp();
    }
}

/// The `n`-th L2-normalized Hermite function at `y` (intended for `n <= 2000`).
pub fn hermite_function(n: usize, y: f64) -> f64 {
    let mut buf = vec![0.0; n + 1];
    hermite_functions(y, &mut buf);
    buf[n]
}

/// `phi_n(y)` and `ln sum_{j<n} phi_j(y)^2`, both from one rescaled recurrence.
fn hermite_top_and_log_christoffel(n: usize, y: f64) -> (f64, f64, f64) {
    let mut log_scale = -0.25 * PI.ln() - 0.5 * y * y;
    let mut prev = 0.0;
    let mut cur = 1.0;
    let mut sum_sq = 0.0;
    for j in 0..n {
        sum_sq += cur * cur;
        let jf = j as f64;
        let next = (2.0 / (jf + 1.0)).sqrt() * y * cur - (jf / (jf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
        if cur.abs() > RESCALE {
            cur /= RESCALE;
            prev /= RESCALE;
            sum_sq /= RESCALE * RESCALE;
            log_scale += RESCALE.ln();
        }
    }
    let scale = log_scale.exp();
    (cur * scale, prev * scale, sum_sq.ln() + 2.0 * log_scale)
}

/// Eigenvalues of a symmetric tridiagonal Jacobi matrix, ascending.
fn jacobi_eigenvalues(diag: &[f64], off: &[f64]) -> Vec<f64> {
    let n = diag.len();
    let mut m = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        m[(i, i)] = diag[i];
        if i + 1 < n {
            m[(i, i + 1)] = off[i];
            m[(i + 1, i)] = off[i];
        }
    }
    let mut ev: Vec<f64> = SymmetricEigen::new(m).eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Gauss–Hermite rule of a given order.
///
/// `weights` integrate against `e^{-x^2}`; `direct_weights = weights * e^{x^2}`
/// integrate plain functions that already carry their Gaussian decay, and are
/// computed from the Christoffel function so they stay accurate at the outer
/// nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussHermite {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub direct_weights: Vec<f64>,
}

impl GaussHermite {
    pub fn new(order: usize) -> Self {
        assert!(order >= 1, "Gauss-Hermite order must be positive");
        let diag = vec![0.0; order];
        let off: Vec<f64> = (1..order).map(|j| (j as f64 / 2.0).sqrt()).collect();
        let mut nodes = jacobi_eigenvalues(&diag, &off);
        for x in nodes.iter_mut() {
            for _ in 0..3 {
                let (top, below, _) = hermite_top_and_log_christoffel(order, *x);
                let deriv = (2.0 * order as f64).sqrt() * below - *x * top;
                if deriv != 0.0 {
                    *x -= top / deriv;
                }
            }
        }
        // exact symmetry about the origin
        for i in 0..order / 2 {
            let a = 0.5 * (nodes[order - 1 - i] - nodes[i]);
            nodes[i] = -a;
            nodes[order - 1 - i] = a;
        }
        if order % 2 == 1 {
            nodes[order / 2] = 0.0;
        }
        let mut direct_weights = Vec::with_capacity(order);
        let mut weights = Vec::with_capacity(order);
        for &x in &nodes {
            let (_, _, log_sum) = hermite_top_and_log_christoffel(order, x);
            direct_weights.push((-log_sum).exp());
            weights.push((-log_sum - x * x).exp());
        }
        GaussHermite { nodes, weights, direct_weights }
    }

    /// `int e^{-x^2} g(x) dx`.
    pub fn integrate(&self, g: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * g(x)).sum()
    }
}

/// Gauss–Laguerre rule (weight `e^{-t}` on `[0, inf)`), with direct weights as above.
///
/// Direct weights grow like `e^t` and overflow for high orders, so their
/// logarithms are kept as well.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussLaguerre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub direct_weights: Vec<f64>,
    pub log_direct_weights: Vec<f64>,
}

/// `L_n(t) e^{-t/2}`, `L_{n-1}(t) e^{-t/2}` and `ln sum_{j<n} (L_j e^{-t/2})^2`.
fn laguerre_top_and_log_christoffel(n: usize, t: f64) -> (f64, f64, f64) {
    let mut log_scale = -0.5 * t;
    let mut prev = 0.0;
    let mut cur = 1.0;
    let mut sum_sq = 0.0;
    for j in 0..n {
        sum_sq += cur * cur;
        let jf = j as f64;
        let next = ((2.0 * jf + 1.0 - t) * cur - jf * prev) / (jf + 1.0);
        prev = cur;
        cur = next;
        if cur.abs() > RESCALE {
            cur /= RESCALE;
            prev /= RESCALE;
            sum_sq /= RESCALE * RESCALE;
            log_scale += RESCALE.ln();
        }
    }
    let scale = log_scale.exp();
    (cur * scale, prev * scale, sum_sq.ln() + 2.0 * log_scale)
}

impl GaussLaguerre {
    pub fn new(order: usize) -> Self {
        assert!(order >= 1, "Gauss-Laguerre order must be positive");
        let diag: Vec<f64> = (0..order).map(|j| 2.0 * j as f64 + 1.0).collect();
        let off: Vec<f64> = (1..order).map(|j| j as f64).collect();
        let mut nodes = jacobi_eigenvalues(&diag, &off);
        for t in nodes.iter_mut() {
            for _ in 0..3 {
                let (top, below, _) = laguerre_top_and_log_christoffel(order, *t);
                // d/dt of L_n e^{-t/2} at a root of L_n is L_n'(t) e^{-t/2}
                let deriv = order as f64 * (top - below) / *t;
                if deriv != 0.0 && deriv.is_finite() {
                    *t -= top / deriv;
                }
            }
        }
        let mut direct_weights = Vec::with_capacity(order);
        let mut log_direct_weights = Vec::with_capacity(order);
        let mut weights = Vec::with_capacity(order);
        for &t in &nodes {
            let (_, _, log_sum) = laguerre_top_and_log_christoffel(order, t);
            direct_weights.push((-log_sum).exp());
            log_direct_weights.push(-log_sum);
            weights.push((-log_sum - t).exp());
        }
        GaussLaguerre { nodes, weights, direct_weights, log_direct_weights }
    }

    /// `int_0^inf e^{-t} g(t) dt`.
    pub fn integrate(&self, g: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&t, &w)| w * g(t)).sum()
    }
}
