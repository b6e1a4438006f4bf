//! Coherent states, Toeplitz (anti-Wick) quantization and the heat transform.
//!
//! Each mode's phase plane is identified with `C` through `a = (x + i xi)/sqrt 2`.
//! The coherent state at `z` has Fock components `e^{-|a|^2/2} a^n / sqrt(n!)`,
//! and `T_f = (2 pi)^{-d} int f(z) |z><z| dz`. Toeplitz quantization of `f`
//! coincides with Weyl quantization of the heat transform of `f` at
//! [`CALIBRATED_TIME`].

mod heat;
mod sampled;

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{
    basis_size, max_abs, place_block, quantize, quantize_kernel_fn, spectral_norm, weyl_operator, FockMatrix, Method,
    QuadratureConfig, QuantMethod,
};
use crate::quadrature::GaussLaguerre;
use crate::symbol::{PhasePoint, Symbol, SymbolExpr};

pub use heat::{
    heat_closed_form, heat_polynomial, heat_transform, heat_transform_sampled, heat_variance, HeatGrid, HeatPointwise,
    HeatTransform, CALIBRATED_TIME,
};
pub use sampled::{SampledSidecar, SampledSymbol};

/// Largest `|z|` accepted by [`coherent_state`], as a fraction of `sqrt(2N)`.
pub const TAIL_GUARD_FRACTION: f64 = 0.8;

fn tail_guard(z: &PhasePoint, n: usize) -> Result<()> {
    let limit = TAIL_GUARD_FRACTION * (2.0 * n as f64).sqrt();
    if z.norm() > limit {
        return Err(Error::TailGuard { norm: z.norm(), limit });
    }
    Ok(())
}

/// Coherent state centred at `z`: the vacuum displaced by the truncated Weyl
/// operator `W_{-z}` (conjugation by `W_{-z}` moves phase-space expectations by `+z`).
pub fn coherent_state(z: &PhasePoint, n: usize) -> Result<DVector<Complex64>> {
    tail_guard(z, n)?;
    let w = weyl_operator(&z.negated(), n, z.dims())?;
    Ok(w.entries().column(0).into_owned())
}

/// Analytic Fock components `prod_j e^{-|a_j|^2/2} a_j^{n_j} / sqrt(n_j!)` of the
/// coherent state at `z`, on `N` levels per mode.
pub fn coherent_amplitudes(z: &PhasePoint, n: usize) -> Result<DVector<Complex64>> {
    let d = z.dims();
    let side = basis_size(n, d, 1)?;
    let mut out = DVector::from_element(1, Complex64::new(1.0, 0.0));
    for j in 0..d {
        let a = Complex64::new(z.x()[j], z.xi()[j]) / 2f64.sqrt();
        let mut mode = DVector::zeros(n);
        let mut c = Complex64::new((-0.5 * a.norm_sqr()).exp(), 0.0);
        for m in 0..n {
            mode[m] = c;
            c *= a / ((m + 1) as f64).sqrt();
        }
        out = out.kronecker(&mode);
    }
    debug_assert_eq!(out.len(), side);
    Ok(out)
}

/// Polar quadrature for Toeplitz matrix elements: Gauss–Laguerre in `t = |a|^2`,
/// uniform in the angle.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolarConfig {
    /// Radial order; default `N + 32`.
    pub radial_order: Option<usize>,
    /// Angular points (power of two); default the next power of two above `2N + 64`.
    pub angular_points: Option<usize>,
    /// Skip the grid-doubling convergence check.
    #[serde(default)]
    pub skip_convergence_check: bool,
    /// Tolerance of the doubling check, relative to `max(1, max |T_mn|)`; default `1e-8`.
    pub tolerance: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResolvedPolar {
    pub radial_order: usize,
    pub angular_points: usize,
}

impl PolarConfig {
    pub fn resolve(&self, n: usize) -> ResolvedPolar {
        ResolvedPolar {
            radial_order: self.radial_order.unwrap_or(n + 32),
            angular_points: self.angular_points.unwrap_or((2 * n + 64).next_power_of_two()),
        }
    }
}

fn ln_factorial(n: usize) -> f64 {
    (1..=n).map(|j| (j as f64).ln()).sum()
}

/// `<e_m, T_f e_n> = (2 pi)^{-1} int_0^inf dt int_0^{2 pi} d theta
/// f e^{-t} t^{(m+n)/2} e^{i (m - n) theta} / sqrt(m! n!)`.
fn toeplitz_elements(f: &SymbolExpr, n: usize, polar: ResolvedPolar) -> Result<DMatrix<Complex64>> {
    let gl = GaussLaguerre::new(polar.radial_order);
    let a_pts = polar.angular_points;
    let fft = FftPlanner::<f64>::new().plan_fft_forward(a_pts);
    let ln_fact: Vec<f64> = (0..n).map(ln_factorial).collect();
    let rows: Vec<Result<DMatrix<Complex64>>> = (0..gl.nodes.len())
        .into_par_iter()
        .map(|i| {
            let t = gl.nodes[i];
            let rho = (2.0 * t).sqrt();
            let mut buf: Vec<Complex64> = Vec::with_capacity(a_pts);
            for j in 0..a_pts {
                let theta = 2.0 * PI * j as f64 / a_pts as f64;
                buf.push(f.eval_slice(&[rho * theta.cos(), rho * theta.sin()])?);
            }
            fft.process(&mut buf);
            // sqrt(direct weight) times the Poisson amplitude, in logs
            let amp: Vec<f64> = (0..n)
                .map(|m| (0.5 * gl.log_direct_weights[i] - 0.5 * t + 0.5 * m as f64 * t.ln() - 0.5 * ln_fact[m]).exp())
                .collect();
            let scale = 1.0 / a_pts as f64;
            Ok(DMatrix::from_fn(n, n, |m, k| {
                let idx = (k as i64 - m as i64).rem_euclid(a_pts as i64) as usize;
                buf[idx] * (amp[m] * amp[k] * scale)
            }))
        })
        .collect();
    let mut acc = DMatrix::<Complex64>::zeros(n, n);
    for r in rows {
        acc += r?;
    }
    Ok(acc)
}

/// Toeplitz quantization `T_f` on the truncated one-mode basis.
pub fn toeplitz_matrix(f: &Symbol, n: usize, cfg: &PolarConfig) -> Result<FockMatrix> {
    if f.dims() != 1 {
        return Err(Error::CostGuard("Toeplitz quadrature is implemented for one mode".into()));
    }
    let polar = cfg.resolve(n);
    if polar.radial_order == 0 || polar.angular_points < 2 * n || !polar.angular_points.is_power_of_two() {
        return Err(Error::InvalidInput(
            "polar grid needs a positive radial order and a power-of-two angular count >= 2N".into(),
        ));
    }
    let k = f.k();
    let side = basis_size(n, 1, k)?;
    let mut acc = DMatrix::zeros(side, side);
    let tol = cfg.tolerance.unwrap_or(1e-8);
    let check = n / 2;
    for (idx, e) in f.entries().iter().enumerate() {
        let block = toeplitz_elements(e, n, polar)?;
        if !cfg.skip_convergence_check {
            let fine = ResolvedPolar { radial_order: 2 * polar.radial_order, angular_points: 2 * polar.angular_points };
            let refined = toeplitz_elements(e, n, fine)?;
            let lead = |m: &DMatrix<Complex64>| m.view((0, 0), (check.max(1), check.max(1))).into_owned();
            let diff = max_abs(&(lead(&refined) - lead(&block)));
            let scale = max_abs(&lead(&refined)).max(1.0);
            if diff > tol * scale {
                return Err(Error::QuadratureUnconverged(format!(
                    "doubling the polar grid changed a leading element by {diff:.3e}"
                )));
            }
        }
        place_block(&mut acc, &block, k, idx / k, idx % k);
    }
    FockMatrix::new(n, 1, k, Method::Toeplitz, acc)
}

/// `op(heat f)` by kernel quadrature: closed-form heat transform for polynomial
/// entries, pointwise Gauss–Hermite smoothing otherwise.
pub fn quantize_heat(f: &Symbol, t: f64, n: usize, quad: &QuadratureConfig) -> Result<FockMatrix> {
    if let Some(closed) = heat_closed_form(f, t)? {
        return quantize(&closed, n, QuantMethod::Kernel, quad);
    }
    if f.dims() != 1 {
        return Err(Error::CostGuard("kernel quadrature is implemented for one mode".into()));
    }
    let smoother = HeatPointwise::new(1, t, 24)?;
    let k = f.k();
    let side = basis_size(n, 1, k)?;
    let mut acc = DMatrix::zeros(side, side);
    for (idx, e) in f.entries().iter().enumerate() {
        let eval = |z: &[f64]| smoother.eval(e, z);
        let block = quantize_kernel_fn(&eval, false, n, quad)?;
        place_block(&mut acc, block.entries(), k, idx / k, idx % k);
    }
    FockMatrix::new(n, 1, k, Method::KernelQuadrature, acc)
}

/// `|| P_M (T_f - op(heat_{t*} f)) P_M ||` at the calibrated time.
pub fn heat_toeplitz_residual(
    f: &Symbol,
    n: usize,
    m: usize,
    polar: &PolarConfig,
    quad: &QuadratureConfig,
) -> Result<f64> {
    if m == 0 || 2 * m > n {
        return Err(Error::InvalidInput(format!("trusted block M = {m} must satisfy 1 <= M <= N/2")));
    }
    let t = toeplitz_matrix(f, n, polar)?;
    let w = quantize_heat(f, CALIBRATED_TIME, n, quad)?;
    Ok(spectral_norm(&(t.restrict(m) - w.restrict(m))))
}
