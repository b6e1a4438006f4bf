//! Slow brute-force reference computations.
//!
//! Each routine evaluates a quantity straight from its integral definition on a
//! plain composite grid, sharing no code path with the fast methods beyond
//! symbol evaluation and the Hermite functions themselves. They exist to
//! cross-check the fast paths in tests and from the command line.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::Result;
use crate::quadrature::hermite_functions;
use crate::symbol::SymbolExpr;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Uniform grid `-reach, -reach + h, ..., reach`.
fn grid(reach: f64, h: f64) -> impl Iterator<Item = f64> {
    let steps = (2.0 * reach / h).round() as i64;
    (0..=steps).map(move |i| -reach + i as f64 * h)
}

fn phi_table(levels: usize, y: f64) -> Vec<f64> {
    let mut v = vec![0.0; levels];
    hermite_functions(y, &mut v);
    v
}

fn reach_for(level: usize) -> f64 {
    (2.0 * level as f64 + 1.0).sqrt() + 12.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ladder {
    Position,
    Momentum,
}

/// `<phi_m, Q phi_n>` or `<phi_m, -i phi_n'>` by trapezoidal quadrature, with the
/// derivative taken by a fourth-order central difference.
pub fn ladder_entry(kind: Ladder, m: usize, n: usize) -> Complex64 {
    let levels = m.max(n) + 1;
    let h = 1e-3;
    let fd = 1e-3;
    let mut acc = Complex64::new(0.0, 0.0);
    for y in grid(reach_for(levels), h) {
        let pm = phi_table(levels, y)[m];
        let value = match kind {
            Ladder::Position => Complex64::new(y * phi_table(levels, y)[n], 0.0),
            Ladder::Momentum => {
                let f = |t: f64| phi_table(levels, t)[n];
                let deriv = (8.0 * (f(y + fd) - f(y - fd)) - (f(y + 2.0 * fd) - f(y - 2.0 * fd))) / (12.0 * fd);
                -I * deriv
            }
        };
        acc += value * pm * h;
    }
    acc
}

/// The Weyl operator through its explicit action on functions,
/// `(W f)(y) = e^{-i y xi + (i/2) x xi} f(y - x)`.
pub fn displayed_weyl_action(x: f64, xi: f64, y: f64, f: impl Fn(f64) -> Complex64) -> Complex64 {
    (I * (-y * xi + 0.5 * x * xi)).exp() * f(y - x)
}

/// `<phi_m, W phi_n>` where `W` is the displayed action at `(x_shift, xi)`.
pub fn weyl_overlap(x_shift: f64, xi: f64, m: usize, n: usize) -> Complex64 {
    let levels = m.max(n) + 1;
    let h = 2e-3;
    let reach = reach_for(levels) + x_shift.abs();
    let mut acc = Complex64::new(0.0, 0.0);
    for y in grid(reach, h) {
        let pm = phi_table(levels, y)[m];
        let w = displayed_weyl_action(x_shift, xi, y, |t| Complex64::new(phi_table(levels, t)[n], 0.0));
        acc += w * pm * h;
    }
    acc
}

/// Ground-state coherent wave packet centred at `(x, xi)`:
/// `pi^{-1/4} e^{i xi y - i x xi / 2} e^{-(y - x)^2 / 2}`.
pub fn coherent_wavefunction(x: f64, xi: f64, y: f64) -> Complex64 {
    displayed_weyl_action(x, -xi, y, |t| Complex64::new(PI.powf(-0.25) * (-0.5 * t * t).exp(), 0.0))
}

/// `<coherent(z), coherent(w)>` by trapezoidal quadrature in position space.
pub fn coherent_overlap(z: (f64, f64), w: (f64, f64)) -> Complex64 {
    let h = 2e-3;
    let reach = 14.0 + z.0.abs().max(w.0.abs());
    let mut acc = Complex64::new(0.0, 0.0);
    for y in grid(reach, h) {
        acc += coherent_wavefunction(z.0, z.1, y).conj() * coherent_wavefunction(w.0, w.1, y) * h;
    }
    acc
}

/// `A_f(phi_m, phi_n) = (2 pi)^{-1} int int int phi_m(x) e^{i (x - y) xi}
/// f((x + y)/2, xi) phi_n(y) dx dy dxi` for a one-mode symbol, integrating the
/// oscillatory factor first at every phase-space node (no partial Fourier
/// factorization) on a fine uniform grid.
pub fn kernel_element(f: &SymbolExpr, m: usize, n: usize) -> Result<Complex64> {
    let levels = m.max(n) + 1;
    let h = 0.05;
    let reach = (2.0 * levels as f64 + 1.0).sqrt() + 7.0;
    let steps = (reach / h).ceil() as i64;
    // position samples on the half-step lattice y_j = j h / 2, |y| <= 2 reach
    let table: Vec<(f64, f64)> = (-4 * steps..=4 * steps)
        .map(|j| {
            let t = phi_table(levels, j as f64 * h / 2.0);
            (t[m], t[n])
        })
        .collect();
    let at = |j: i64| table[(j + 4 * steps) as usize];
    let mut total = Complex64::new(0.0, 0.0);
    let mut g = Vec::new();
    for a in -steps..=steps {
        let s = a as f64 * h;
        // g(u_b) = phi_m(s + u_b/2) phi_n(s - u_b/2), u_b = b h, |s +- u_b/2| <= 2 reach
        let b_max = 4 * steps - 2 * a.abs();
        g.clear();
        g.extend((-b_max..=b_max).map(|b| at(2 * a + b).0 * at(2 * a - b).1));
        for c in -steps..=steps {
            let xi = c as f64 * h;
            let rot = Complex64::from_polar(1.0, h * xi);
            let mut phase = Complex64::from_polar(1.0, -(b_max as f64) * h * xi);
            let mut wig = Complex64::new(0.0, 0.0);
            for &v in &g {
                wig += phase * v;
                phase *= rot;
            }
            let fv = f.eval_slice(&[s, xi])?;
            total += fv * wig;
        }
    }
    Ok(total * (h * h * h / (2.0 * PI)))
}

/// `<e_m, T_f e_n> = (2 pi)^{-1} int f(z) c_m(z) conj(c_n(z)) dz` with
/// `c_n(z) = e^{-|a|^2/2} a^n / sqrt(n!)`, `a = (x + i xi)/sqrt 2`, on a uniform
/// Cartesian grid.
pub fn toeplitz_entry(f: &SymbolExpr, m: usize, n: usize) -> Result<Complex64> {
    let h = 0.02;
    let reach = (2.0 * (m.max(n) as f64) + 1.0).sqrt() * 1.5 + 9.0;
    let lnfact = |k: usize| -> f64 { (1..=k).map(|j| (j as f64).ln()).sum() };
    let norm = -0.5 * (lnfact(m) + lnfact(n));
    let mut acc = Complex64::new(0.0, 0.0);
    for x in grid(reach, h) {
        for xi in grid(reach, h) {
            let alpha = Complex64::new(x, xi) / 2f64.sqrt();
            let r2 = alpha.norm_sqr();
            let (rho, theta) = alpha.to_polar();
            if rho == 0.0 && (m > 0 || n > 0) {
                continue;
            }
            let log_rho = if m + n == 0 { 0.0 } else { (m + n) as f64 * rho.ln() };
            let mag = (-r2 + log_rho + norm).exp();
            let weight = Complex64::from_polar(mag, (m as f64 - n as f64) * theta);
            acc += f.eval_slice(&[x, xi])? * weight;
        }
    }
    Ok(acc * (h * h / (2.0 * PI)))
}

/// `int g(x - u) k(u) du` for the Gaussian `k` of variance `variance` per
/// coordinate, evaluated for a one-mode symbol at `(x, xi)` by a tensor
/// trapezoidal rule.
pub fn heat_value(f: &SymbolExpr, variance: f64, x: f64, xi: f64) -> Result<Complex64> {
    let sd = variance.sqrt();
    let h = sd / 40.0;
    let reach = 12.0 * sd;
    let mut acc = Complex64::new(0.0, 0.0);
    for u in grid(reach, h) {
        for v in grid(reach, h) {
            let k = (-(u * u + v * v) / (2.0 * variance)).exp() / (2.0 * PI * variance);
            acc += f.eval_slice(&[x - u, xi - v])? * k;
        }
    }
    Ok(acc * h * h)
}
