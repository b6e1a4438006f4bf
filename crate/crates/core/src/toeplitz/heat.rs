use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::sampled::SampledSymbol;
use crate::error::{Error, Result};
use crate::quadrature::GaussHermite;
use crate::symbol::{MatrixSymbol, Polynomial, Symbol, SymbolExpr};

/// Heat time `t` for which `op(heat_t f)` equals the Toeplitz operator `T_f`.
/// The kernel `(4 pi t)^{-d} e^{-|z|^2 / 4t}` then becomes `pi^{-d} e^{-|z|^2}`,
/// of variance 1/2 per phase-space coordinate.
pub const CALIBRATED_TIME: f64 = 0.25;

/// Per-coordinate variance `2t` of the heat kernel at time `t`.
pub fn heat_variance(t: f64) -> f64 {
    2.0 * t
}

fn check_time(t: f64) -> Result<()> {
    if !(t.is_finite() && t > 0.0) {
        return Err(Error::InvalidInput(format!("heat time must be positive, got {t}")));
    }
    Ok(())
}

fn double_factorial_odd(j: u32) -> f64 {
    (1..=j).map(|i| (2 * i - 1) as f64).product()
}

/// Closed form via Gaussian moments, `E[U^{2j}] = v^j (2j - 1)!!`.
pub fn heat_polynomial(p: &Polynomial, t: f64) -> Polynomial {
    let v = heat_variance(t);
    let vars = p.vars();
    let mut out = Polynomial::zero(vars);
    for (e, c) in p.terms() {
        let mut term = Polynomial::constant(vars, c);
        for (var, &power) in e.iter().enumerate() {
            // E[(y - U)^power] as a polynomial in y
            let mut factor = Polynomial::zero(vars);
            let mut binom = 1.0;
            for k in 0..=power {
                if k > 0 {
                    binom = binom * (power - k + 1) as f64 / k as f64;
                }
                if k % 2 == 0 {
                    let moment = v.powi((k / 2) as i32) * double_factorial_odd(k / 2);
                    let mut exps = vec![0; vars];
                    exps[var] = power - k;
                    factor.add_term(exps, Complex64::new(binom * moment, 0.0));
                }
            }
            term = term.mul(&factor);
        }
        out = out.add(&term);
    }
    out
}

/// The heat-transformed symbol in closed form, when every entry is polynomial.
pub fn heat_closed_form(f: &Symbol, t: f64) -> Result<Option<Symbol>> {
    check_time(t)?;
    let d = f.dims();
    let mut entries = Vec::new();
    for e in f.entries() {
        match Polynomial::from_expr(e) {
            Some(p) => entries.push(heat_polynomial(&p, t).to_expr(d)),
            None => return Ok(None),
        }
    }
    Ok(Some(match f {
        Symbol::Scalar(_) => Symbol::Scalar(entries.pop().expect("one entry")),
        Symbol::Matrix(m) => Symbol::Matrix(MatrixSymbol::new(m.k(), entries)?),
    }))
}

/// Pointwise heat transform by a product Gauss–Hermite rule.
#[derive(Debug, Clone)]
pub struct HeatPointwise {
    offsets: Vec<f64>,
    weights: Vec<f64>,
    axes: usize,
}

impl HeatPointwise {
    pub fn new(dims: usize, t: f64, order: usize) -> Result<Self> {
        check_time(t)?;
        let gh = GaussHermite::new(order);
        let scale = (2.0 * heat_variance(t)).sqrt();
        let norm = std::f64::consts::PI.sqrt().recip();
        Ok(HeatPointwise {
            offsets: gh.nodes.iter().map(|&y| scale * y).collect(),
            weights: gh.weights.iter().map(|&w| w * norm).collect(),
            axes: 2 * dims,
        })
    }

    pub fn eval(&self, f: &SymbolExpr, z: &[f64]) -> Result<Complex64> {
        let order = self.offsets.len();
        let total = order.pow(self.axes as u32);
        let mut p = vec![0.0; self.axes];
        let mut acc = Complex64::new(0.0, 0.0);
        for flat in 0..total {
            let mut r = flat;
            let mut w = 1.0;
            for a in (0..self.axes).rev() {
                let i = r % order;
                r /= order;
                p[a] = z[a] - self.offsets[i];
                w *= self.weights[i];
            }
            acc += f.eval_slice(&p)? * w;
        }
        Ok(acc)
    }
}

/// Grid for sampled heat transforms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HeatGrid {
    pub half_width: f64,
    pub points_per_axis: usize,
    /// Relative tolerance of the box-enlargement check.
    pub tolerance: f64,
}

impl HeatGrid {
    pub fn default_for(dims: usize) -> HeatGrid {
        HeatGrid { half_width: 8.0, points_per_axis: if dims == 1 { 256 } else { 32 }, tolerance: 1e-8 }
    }
}

/// Sampled result plus the closed form when the input is polynomial.
#[derive(Debug, Clone)]
pub struct HeatTransform {
    pub sampled: SampledSymbol,
    pub closed_form: Option<Symbol>,
}

fn discrete_kernel(variance: f64, h: f64, pad: usize) -> Vec<f64> {
    let raw: Vec<f64> =
        (-(pad as i64)..=pad as i64).map(|j| (-(j as f64 * h).powi(2) / (2.0 * variance)).exp()).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|g| g / total).collect()
}

fn convolve_axis(
    data: &[Complex64],
    shape: &[usize],
    comps: usize,
    axis: usize,
    g: &[f64],
) -> (Vec<Complex64>, Vec<usize>) {
    let pad = (g.len() - 1) / 2;
    let mut out_shape = shape.to_vec();
    out_shape[axis] -= 2 * pad;
    let outer: usize = shape[..axis].iter().product();
    let inner: usize = shape[axis + 1..].iter().product::<usize>() * comps;
    let (n_in, n_out) = (shape[axis], out_shape[axis]);
    let mut out = vec![Complex64::new(0.0, 0.0); outer * n_out * inner];
    out.par_chunks_mut(n_out * inner).enumerate().for_each(|(o, block)| {
        for i in 0..n_out {
            let dst = &mut block[i * inner..(i + 1) * inner];
            for (j, &gj) in g.iter().enumerate() {
                let src = (o * n_in + i + j) * inner;
                for (c, slot) in dst.iter_mut().enumerate() {
                    *slot += data[src + c] * gj;
                }
            }
        }
    });
    (out, out_shape)
}

/// Convolves a padded block of samples (`points + 2 pad` per axis) down to the grid.
fn convolve_padded(mut data: Vec<Complex64>, axes: usize, comps: usize, ext: usize, g: &[f64]) -> Vec<Complex64> {
    let mut shape = vec![ext; axes];
    for axis in 0..axes {
        let (next, next_shape) = convolve_axis(&data, &shape, comps, axis, g);
        data = next;
        shape = next_shape;
    }
    data
}

fn sample_padded(f: &Symbol, grid: &HeatGrid, pad: usize) -> Result<Vec<Complex64>> {
    let axes = 2 * f.dims();
    let h = 2.0 * grid.half_width / grid.points_per_axis as f64;
    let ext = grid.points_per_axis + 2 * pad;
    let nodes = ext
        .checked_pow(axes as u32)
        .filter(|&n| n <= 1 << 25)
        .ok_or_else(|| Error::CostGuard("padded heat grid is too large".into()))?;
    let entries = f.entries();
    let comps = entries.len();
    let start = -grid.half_width - pad as f64 * h;
    let chunks: Vec<Result<Vec<Complex64>>> = (0..nodes.div_ceil(4096))
        .into_par_iter()
        .map(|c| {
            let mut z = vec![0.0; axes];
            let mut out = Vec::with_capacity(4096 * comps);
            for idx in c * 4096..((c + 1) * 4096).min(nodes) {
                let mut r = idx;
                for a in (0..axes).rev() {
                    z[a] = start + (r % ext) as f64 * h;
                    r /= ext;
                }
                for e in &entries {
                    out.push(e.eval_slice(&z)?);
                }
            }
            Ok(out)
        })
        .collect();
    let mut data = Vec::with_capacity(nodes * comps);
    for c in chunks {
        data.extend(c?);
    }
    Ok(data)
}

fn check_grid(grid: &HeatGrid) -> Result<()> {
    if !(grid.half_width.is_finite() && grid.half_width > 0.0) {
        return Err(Error::InvalidInput("heat grid half-width must be positive".into()));
    }
    if grid.points_per_axis < 2 || !grid.points_per_axis.is_power_of_two() {
        return Err(Error::InvalidInput("heat grid points per axis must be a power of two".into()));
    }
    Ok(())
}

/// Heat transform at time `t`, sampled on `grid`, with the closed form attached
/// for polynomial input.
///
/// The symbol is evaluated on a padded box reaching 8 kernel standard deviations
/// past the grid; the result is recomputed with 12 and `BoxTooSmall` is raised if
/// any value moves by more than the relative tolerance.
pub fn heat_transform(f: &Symbol, t: f64, grid: &HeatGrid) -> Result<HeatTransform> {
    check_time(t)?;
    check_grid(grid)?;
    let axes = 2 * f.dims();
    let comps = f.entries().len();
    let h = 2.0 * grid.half_width / grid.points_per_axis as f64;
    let sd = heat_variance(t).sqrt();
    let run = |margin: f64| -> Result<Vec<Complex64>> {
        let pad = (margin * sd / h).ceil() as usize;
        let g = discrete_kernel(heat_variance(t), h, pad);
        let data = sample_padded(f, grid, pad)?;
        Ok(convolve_padded(data, axes, comps, grid.points_per_axis + 2 * pad, &g))
    };
    let values = run(8.0)?;
    let wider = run(12.0)?;
    for (i, (a, b)) in values.iter().zip(&wider).enumerate() {
        let agrees = (a - b).norm() <= grid.tolerance * b.norm().max(1.0);
        if !agrees {
            let node = i / comps;
            return Err(Error::BoxTooSmall(format!(
                "heat transform at {:?} changes by {:.3e} when the evaluation box is enlarged",
                SampledSymbol::node_coords(f.dims(), grid.half_width, grid.points_per_axis, node),
                (a - b).norm()
            )));
        }
    }
    let sampled = SampledSymbol::new(f.dims(), f.k(), grid.half_width, grid.points_per_axis, values)?;
    Ok(HeatTransform { sampled, closed_form: heat_closed_form(f, t)? })
}

/// Heat transform of sampled data; the symbol is taken to vanish outside its box.
pub fn heat_transform_sampled(s: &SampledSymbol, t: f64) -> Result<SampledSymbol> {
    check_time(t)?;
    let axes = 2 * s.dims();
    let comps = s.k() * s.k();
    let p = s.points_per_axis();
    let h = s.spacing();
    let pad = (8.0 * heat_variance(t).sqrt() / h).ceil() as usize;
    let ext = p + 2 * pad;
    let nodes = ext
        .checked_pow(axes as u32)
        .filter(|&n| n <= 1 << 25)
        .ok_or_else(|| Error::CostGuard("padded heat grid is too large".into()))?;
    let mut data = vec![Complex64::new(0.0, 0.0); nodes * comps];
    let mut idx_axes = vec![0usize; axes];
    for node in 0..s.node_count() {
        let mut r = node;
        for a in (0..axes).rev() {
            idx_axes[a] = r % p + pad;
            r /= p;
        }
        let dst = idx_axes.iter().fold(0, |acc, &i| acc * ext + i);
        data[dst * comps..(dst + 1) * comps].copy_from_slice(s.at(node));
    }
    let g = discrete_kernel(heat_variance(t), h, pad);
    let values = convolve_padded(data, axes, comps, ext, &g);
    SampledSymbol::new(s.dims(), s.k(), s.half_width(), p, values)
}
