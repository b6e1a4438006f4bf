use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::symbol::{MultiIndex, Symbol};
use crate::toeplitz::SampledSymbol;
use crate::verdict::Verdict;

/// Grid for the windowed Fourier estimate of the `M^{inf,1}` norm (one mode).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MnormConfig {
    /// Gaussian window `exp(-|u|^2 / (2 w^2))`.
    pub window_width: f64,
    /// Translation nodes cover `[-R, R)^2`.
    pub half_width: f64,
    /// Sample points per axis on `[-R, R)`.
    pub points_per_axis: usize,
    /// Translation nodes use every `stride`-th sample.
    pub stride: usize,
    /// Relative change under box doubling accepted as converged.
    pub tolerance: f64,
}

impl Default for MnormConfig {
    fn default() -> Self {
        MnormConfig { window_width: 1.0, half_width: 8.0, points_per_axis: 64, stride: 2, tolerance: 0.05 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MnormEstimate {
    pub value: f64,
    /// Estimate on the doubled box, when the check ran.
    pub refined_value: Option<f64>,
    pub relative_change: Option<f64>,
    pub converged: bool,
}

/// Half-width of the window patch in window widths.
const PATCH_REACH: f64 = 6.0;

/// Samples on a square lattice of spacing `h`; index `(a, b)` maps to
/// `values[((a + offset) * ext + b + offset) * comps ..]`.
struct Lattice {
    spacing: f64,
    ext: usize,
    offset: i64,
    comps: usize,
    values: Vec<Complex64>,
}

fn patch_points(w: f64, h: f64) -> usize {
    ((2.0 * PATCH_REACH * w / h).ceil() as usize).max(8).next_power_of_two()
}

/// `(2 pi)^{-2} int sup_z |V_phi g(z, zeta)| d zeta` with `phi(0) = 1`, so that
/// `||1|| = 1`, `||e^{-a|u|^2}|| = 1` and `||g||_inf <= ||g||`.
///
/// `V_phi g(z, zeta) = int g(u) phi(u - z) e^{-i u.zeta} du` is evaluated by an FFT
/// over a patch of `+-6 w` around each translation node; translation nodes run over
/// the lattice indices `0..nodes` with the given stride. Matrix values use the
/// Frobenius norm.
fn estimate(lat: &Lattice, nodes: i64, stride: i64, w: f64) -> f64 {
    let h = lat.spacing;
    let p = patch_points(w, h);
    let phalf = (p / 2) as i64;
    let comps = lat.comps;
    let fft = FftPlanner::<f64>::new().plan_fft_forward(p);
    let window: Vec<f64> = (0..p as i64)
        .map(|i| {
            let u = (i - phalf) as f64 * h;
            (-(u * u) / (2.0 * w * w)).exp()
        })
        .collect();
    let centres: Vec<(i64, i64)> = (0..nodes)
        .step_by(stride as usize)
        .flat_map(|a| (0..nodes).step_by(stride as usize).map(move |b| (a, b)))
        .collect();
    let chunk_max: Vec<Vec<f64>> = centres
        .par_chunks(16)
        .map(|chunk| {
            let mut best = vec![0.0f64; p * p];
            let mut buf = vec![Complex64::new(0.0, 0.0); p * p];
            let mut col = vec![Complex64::new(0.0, 0.0); p];
            let mut mag = vec![0.0f64; p * p];
            for &(a, b) in chunk {
                mag.iter_mut().for_each(|m| *m = 0.0);
                for c in 0..comps {
                    for i in 0..p {
                        let row = (a + i as i64 - phalf + lat.offset) as usize;
                        let col0 = (b - phalf + lat.offset) as usize;
                        for j in 0..p {
                            let v = lat.values[(row * lat.ext + col0 + j) * comps + c];
                            buf[i * p + j] = v * (window[i] * window[j]);
                        }
                    }
                    for row in buf.chunks_mut(p) {
                        fft.process(row);
                    }
                    for j in 0..p {
                        for i in 0..p {
                            col[i] = buf[i * p + j];
                        }
                        fft.process(&mut col);
                        for i in 0..p {
                            buf[i * p + j] = col[i];
                        }
                    }
                    for (m, v) in mag.iter_mut().zip(&buf) {
                        *m += v.norm_sqr();
                    }
                }
                for (bst, m) in best.iter_mut().zip(&mag) {
                    *bst = bst.max(m.sqrt());
                }
            }
            best
        })
        .collect();
    let mut best = vec![0.0f64; p * p];
    for c in chunk_max {
        for (b, v) in best.iter_mut().zip(c) {
            *b = b.max(v);
        }
    }
    // |V| = h^2 |FFT| and d zeta = (2 pi / (p h))^2 against the (2 pi)^{-2} prefactor
    best.iter().sum::<f64>() / (p * p) as f64
}

fn check(cfg: &MnormConfig) -> Result<()> {
    if !(cfg.window_width > 0.0 && cfg.half_width > 0.0 && cfg.tolerance > 0.0) {
        return Err(Error::InvalidInput("window width, half-width and tolerance must be positive".into()));
    }
    if cfg.points_per_axis < 8 || cfg.stride == 0 {
        return Err(Error::InvalidInput("need at least 8 points per axis and a positive stride".into()));
    }
    if cfg.half_width < 2.0 * cfg.window_width {
        return Err(Error::BoxTooSmall(format!(
            "translation box half-width {} is below two window widths",
            cfg.half_width
        )));
    }
    Ok(())
}

fn symbol_estimate(f: &Symbol, cfg: &MnormConfig, half_width: f64, points: usize) -> Result<f64> {
    let h = 2.0 * half_width / points as f64;
    let w = cfg.window_width;
    let offset = (patch_points(w, h) / 2) as i64;
    let ext = points + 2 * offset as usize;
    let entries = f.entries();
    let rows: Vec<Result<Vec<Complex64>>> = (0..ext)
        .into_par_iter()
        .map(|r| {
            let x = -half_width + (r as i64 - offset) as f64 * h;
            let mut out = Vec::with_capacity(ext * entries.len());
            for c in 0..ext {
                let xi = -half_width + (c as i64 - offset) as f64 * h;
                for e in &entries {
                    out.push(e.eval_slice(&[x, xi])?);
                }
            }
            Ok(out)
        })
        .collect();
    let mut values = Vec::with_capacity(ext * ext * entries.len());
    for r in rows {
        values.extend(r?);
    }
    let lat = Lattice { spacing: h, ext, offset, comps: entries.len(), values };
    Ok(estimate(&lat, points as i64, cfg.stride as i64, w))
}

/// `M^{inf,1}` norm estimate of a closed-form one-mode symbol, with convergence
/// judged by doubling the translation box at fixed spacing.
pub fn m_infty_one_norm(f: &Symbol, cfg: &MnormConfig) -> Result<MnormEstimate> {
    check(cfg)?;
    if f.dims() != 1 {
        return Err(Error::CostGuard("the windowed Fourier estimate is implemented for one mode".into()));
    }
    let value = symbol_estimate(f, cfg, cfg.half_width, cfg.points_per_axis)?;
    let refined = symbol_estimate(f, cfg, 2.0 * cfg.half_width, 2 * cfg.points_per_axis)?;
    Ok(judge(value, refined, cfg.tolerance))
}

/// Same estimate for sampled data, taken to vanish outside its box; convergence is
/// judged against the estimate on every other sample.
pub fn m_infty_one_norm_sampled(s: &SampledSymbol, cfg: &MnormConfig) -> Result<MnormEstimate> {
    check(&MnormConfig { half_width: s.half_width(), ..*cfg })?;
    if s.dims() != 1 {
        return Err(Error::CostGuard("the windowed Fourier estimate is implemented for one mode".into()));
    }
    let p = s.points_per_axis();
    let comps = s.k() * s.k();
    let run = |step: usize| -> f64 {
        let h = s.spacing() * step as f64;
        let nodes = p / step;
        let offset = patch_points(cfg.window_width, h) / 2;
        let ext = nodes + 2 * offset;
        let mut values = vec![Complex64::new(0.0, 0.0); ext * ext * comps];
        for a in 0..nodes {
            for b in 0..nodes {
                let dst = ((a + offset) * ext + b + offset) * comps;
                values[dst..dst + comps].copy_from_slice(s.at(a * step * p + b * step));
            }
        }
        let lat = Lattice { spacing: h, ext, offset: offset as i64, comps, values };
        estimate(&lat, nodes as i64, (cfg.stride / step).max(1) as i64, cfg.window_width)
    };
    let value = run(1);
    let coarse = run(2);
    Ok(judge(value, coarse, cfg.tolerance))
}

fn judge(value: f64, refined: f64, tol: f64) -> MnormEstimate {
    let scale = value.max(refined);
    let change = if scale > 0.0 { (refined - value).abs() / scale } else { 0.0 };
    MnormEstimate { value, refined_value: Some(refined), relative_change: Some(change), converged: change <= tol }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MnormRow {
    pub alpha: MultiIndex,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub estimate: Option<MnormEstimate>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MInftyOneReport {
    pub verdict: Verdict,
    pub config: MnormConfig,
    pub rows: Vec<MnormRow>,
}

/// Estimates every second derivative; PASS when all converge, FAIL when one is
/// unconverged, INCONCLUSIVE on errors.
pub fn check_m_infty_one(f: &Symbol, cfg: &MnormConfig) -> MInftyOneReport {
    let rows: Vec<MnormRow> = MultiIndex::of_order(2 * f.dims(), 2)
        .into_iter()
        .map(|alpha| match f.differentiate(&alpha).and_then(|g| m_infty_one_norm(&g, cfg)) {
            Ok(e) => MnormRow { alpha, estimate: Some(e), error: None },
            Err(e) => MnormRow { alpha, estimate: None, error: Some(e.to_string()) },
        })
        .collect();
    let verdict = if rows.iter().any(|r| r.estimate.as_ref().is_some_and(|e| !e.converged)) {
        Verdict::Fail
    } else if rows.iter().all(|r| r.estimate.is_some()) {
        Verdict::Pass
    } else {
        Verdict::Inconclusive
    };
    MInftyOneReport { verdict, config: *cfg, rows }
}
