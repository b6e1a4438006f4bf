use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use super::{FockMatrix, Method};
use crate::error::{Error, Result};
use crate::quadrature::{hermite_functions, GaussHermite};
use crate::symbol::SymbolExpr;

/// User-facing quadrature settings; unset fields take basis-dependent defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureConfig {
    /// Position half-width `R_x`; default `max(8, 2 sqrt(2N))`.
    pub x_half_width: Option<f64>,
    /// Momentum half-width `R_xi`; default `max(8, 2 sqrt(2N))`.
    pub xi_half_width: Option<f64>,
    /// Points of the partial Fourier grid in `xi` (power of two, at least 64).
    pub xi_points: Option<usize>,
    /// Gauss–Hermite order for the centre coordinate; default `2N`.
    pub gh_order: Option<usize>,
    /// Recompute on a doubled grid and fail with `GridTooCoarse` on disagreement.
    #[serde(default)]
    pub check_grid: bool,
    /// Tolerance of the grid-doubling check; default `1e-8`.
    pub grid_tolerance: Option<f64>,
}

/// Concrete settings after defaults are applied.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResolvedQuadrature {
    pub x_half_width: f64,
    pub xi_half_width: f64,
    pub xi_points: usize,
    pub gh_order: usize,
}

impl QuadratureConfig {
    pub fn resolve(&self, n: usize) -> ResolvedQuadrature {
        let default_width = (2.0 * (2.0 * n as f64).sqrt()).max(8.0);
        let x_half_width = self.x_half_width.unwrap_or(default_width);
        let xi_half_width = self.xi_half_width.unwrap_or(default_width);
        // 1024 points unless the dual u-grid would not reach across the position box
        let xi_points = self.xi_points.unwrap_or_else(|| {
            let mut m = 1024usize;
            while (m as f64) * PI / (2.0 * xi_half_width) < 2.0 * x_half_width {
                m *= 2;
            }
            m
        });
        let gh_order = self.gh_order.unwrap_or(2 * n);
        ResolvedQuadrature { x_half_width, xi_half_width, xi_points, gh_order }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, w) in [("x_half_width", self.x_half_width), ("xi_half_width", self.xi_half_width)] {
            if let Some(w) = w {
                if !(w.is_finite() && w > 0.0) {
                    return Err(Error::InvalidInput(format!("{name} must be positive")));
                }
            }
        }
        if let Some(m) = self.xi_points {
            if m < 64 || !m.is_power_of_two() {
                return Err(Error::InvalidInput("xi_points must be a power of two >= 64".into()));
            }
        }
        if self.gh_order == Some(0) {
            return Err(Error::InvalidInput("gh_order must be positive".into()));
        }
        Ok(())
    }
}

const CHUNK: usize = 8;

/// Kernel-quadrature Weyl quantization of a scalar one-mode symbol.
///
/// In centre/difference coordinates `s = (x+y)/2`, `u = x - y` the matrix element is
/// `int ds int du phi_m(s + u/2) phi_n(s - u/2) F(s, u)` where
/// `F(s, u) = (2 pi)^{-1} int e^{i u xi} f(s, xi) d xi` is the partial Fourier
/// transform. `F` is taken by one FFT per Gauss–Hermite node in `s`; the dual grid
/// in `u` has spacing `pi / R_xi`.
pub fn quantize_kernel(f: &SymbolExpr, n: usize, cfg: &QuadratureConfig) -> Result<FockMatrix> {
    if f.dims() != 1 {
        return Err(Error::CostGuard(
            "kernel quadrature is implemented for one mode; use a polynomial symbol when d > 1".into(),
        ));
    }
    quantize_kernel_fn(&|z: &[f64]| f.eval_slice(z), !f.depends_on(1), n, cfg)
}

/// Kernel quadrature for a one-mode symbol given as a callable on `[x, xi]`.
/// `xi_free` promises that the symbol does not depend on `xi`.
pub fn quantize_kernel_fn(
    eval: &(dyn Fn(&[f64]) -> Result<Complex64> + Sync),
    xi_free: bool,
    n: usize,
    cfg: &QuadratureConfig,
) -> Result<FockMatrix> {
    cfg.validate()?;
    let q = cfg.resolve(n);
    let m = kernel_elements(eval, xi_free, n, &q)?;
    if cfg.check_grid {
        let fine = ResolvedQuadrature { xi_half_width: 2.0 * q.xi_half_width, xi_points: 2 * q.xi_points, ..q };
        let m2 = kernel_elements(eval, xi_free, n, &fine)?;
        let diff = super::max_abs(&(&m2 - &m));
        let tol = cfg.grid_tolerance.unwrap_or(1e-8);
        if diff > tol {
            return Err(Error::GridTooCoarse(format!(
                "doubling the xi grid changed an element by {diff:.3e} (tolerance {tol:.1e})"
            )));
        }
    }
    Ok(FockMatrix::new(n, 1, 1, Method::KernelQuadrature, m)?.with_quadrature(q))
}

fn kernel_elements(
    eval: &(dyn Fn(&[f64]) -> Result<Complex64> + Sync),
    xi_free: bool,
    n: usize,
    q: &ResolvedQuadrature,
) -> Result<DMatrix<Complex64>> {
    let gh = GaussHermite::new(q.gh_order);
    let points = q.xi_points;
    let r = q.xi_half_width;
    let dxi = 2.0 * r / points as f64;
    let du = PI / r;
    let fft: Arc<dyn Fft<f64>> = FftPlanner::new().plan_fft_inverse(points);

    let nodes = gh.nodes.len();
    let partials: Vec<Result<(DMatrix<f64>, DMatrix<f64>)>> = (0..nodes.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| {
            let mut re = DMatrix::<f64>::zeros(n, n);
            let mut im = DMatrix::<f64>::zeros(n, n);
            let mut buf = vec![Complex64::new(0.0, 0.0); points];
            let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
            let mut herm = vec![0.0; n];
            for i in c * CHUNK..((c + 1) * CHUNK).min(nodes) {
                let s = gh.nodes[i];
                let w = gh.direct_weights[i];
                if w == 0.0 {
                    continue;
                }
                let reach = 2.0 * (q.x_half_width - s.abs());
                if reach < 0.0 {
                    continue;
                }
                let lmax = ((reach / du).floor() as usize).min(points / 2 - 1);
                // F at u_l for l in -lmax..=lmax, including the du factor
                let mut fl = Vec::with_capacity(2 * lmax + 1);
                if xi_free {
                    let v = eval(&[s, 0.0])?;
                    for l in 0..2 * lmax + 1 {
                        fl.push(if l == lmax { v } else { Complex64::new(0.0, 0.0) });
                    }
                } else {
                    for (k, slot) in buf.iter_mut().enumerate() {
                        *slot = eval(&[s, -r + k as f64 * dxi])?;
                    }
                    fft.process_with_scratch(&mut buf, &mut scratch);
                    let scale = dxi / (2.0 * PI) * du;
                    for l in -(lmax as i64)..=lmax as i64 {
                        let j = l.rem_euclid(points as i64) as usize;
                        let sign = if l % 2 == 0 { 1.0 } else { -1.0 };
                        fl.push(buf[j] * (sign * scale));
                    }
                }
                let cols = 2 * lmax + 1;
                let mut a = DMatrix::<f64>::zeros(n, cols);
                for col in 0..cols {
                    let u = (col as f64 - lmax as f64) * du;
                    hermite_functions(s + 0.5 * u, &mut herm);
                    for mm in 0..n {
                        a[(mm, col)] = herm[mm];
                    }
                }
                // phi_n(s - u_l/2) is column -l of `a`
                let mut b_t = DMatrix::<f64>::zeros(cols, n);
                let mut a_re = DMatrix::<f64>::zeros(n, cols);
                let mut a_im = DMatrix::<f64>::zeros(n, cols);
                for col in 0..cols {
                    let mirror = cols - 1 - col;
                    for nn in 0..n {
                        b_t[(col, nn)] = a[(nn, mirror)];
                    }
                    let g = fl[col] * w;
                    for mm in 0..n {
                        a_re[(mm, col)] = a[(mm, col)] * g.re;
                        a_im[(mm, col)] = a[(mm, col)] * g.im;
                    }
                }
                re.gemm(1.0, &a_re, &b_t, 1.0);
                im.gemm(1.0, &a_im, &b_t, 1.0);
            }
            Ok((re, im))
        })
        .collect();

    let mut re = DMatrix::<f64>::zeros(n, n);
    let mut im = DMatrix::<f64>::zeros(n, n);
    for p in partials {
        let (pr, pi) = p?;
        re += pr;
        im += pi;
    }
    Ok(DMatrix::from_fn(n, n, |i, j| Complex64::new(re[(i, j)], im[(i, j)])))
}
