use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::symbol::Symbol;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum GrowthVerdict {
    Bounded,
    Growing,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SupScanConfig {
    pub points_per_axis: usize,
    pub max_total_points: usize,
    pub growth_threshold: f64,
}

impl Default for SupScanConfig {
    fn default() -> Self {
        SupScanConfig { points_per_axis: 201, max_total_points: 10_000_000, growth_threshold: 1.5 }
    }
}

impl SupScanConfig {
    /// Points per axis after the total-point clamp, forced odd so the origin is sampled.
    pub fn effective_points(&self, axes: usize) -> usize {
        let mut p = self.points_per_axis.max(2);
        while p > 2 && (p as f64).powi(axes as i32) > self.max_total_points as f64 {
            p -= 1;
        }
        if p.is_multiple_of(2) {
            p -= 1;
        }
        p.max(1)
    }
}

/// Per-box sup estimates over `[-L, L]^{2d}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupEstimate {
    pub half_widths: Vec<f64>,
    pub sups: Vec<f64>,
    pub points_per_axis: usize,
    pub last_ratio: Option<f64>,
    pub verdict: GrowthVerdict,
}

/// Magnitude used for sup estimates: `|v|` for scalars, the spectral norm for matrices.
pub(crate) fn magnitude(m: &DMatrix<Complex64>) -> f64 {
    if m.nrows() == 1 {
        return m[(0, 0)].norm();
    }
    m.clone().singular_values().max()
}

/// Regular grid of `points^axes` nodes on `[-half_width, half_width]^axes`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleGrid {
    pub half_width: f64,
    pub points_per_axis: usize,
}

impl SampleGrid {
    pub fn node(&self, axes: usize, mut flat: usize, out: &mut [f64]) {
        let p = self.points_per_axis;
        let step = if p > 1 { 2.0 * self.half_width / (p - 1) as f64 } else { 0.0 };
        for a in (0..axes).rev() {
            let i = flat % p;
            flat /= p;
            out[a] = if p > 1 { -self.half_width + step * i as f64 } else { 0.0 };
        }
    }

    pub fn total(&self, axes: usize) -> usize {
        self.points_per_axis.pow(axes as u32)
    }
}

const CHUNK: usize = 4096;

/// Runs `f` over every grid node and returns the maximum, or the error at the
/// lowest failing node index (independent of thread count).
fn grid_max<F>(grid: SampleGrid, axes: usize, f: F) -> Result<f64>
where
    F: Fn(&[f64]) -> Result<f64> + Sync,
{
    let total = grid.total(axes);
    let chunks: Vec<Result<f64>> = (0..total.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| {
            let mut z = vec![0.0; axes];
            let mut best = 0.0f64;
            for flat in c * CHUNK..((c + 1) * CHUNK).min(total) {
                grid.node(axes, flat, &mut z);
                best = best.max(f(&z)?);
            }
            Ok(best)
        })
        .collect();
    let mut best = 0.0f64;
    for c in chunks {
        best = best.max(c?);
    }
    Ok(best)
}

fn evaluate_raw(f: &Symbol, z: &[f64]) -> Result<DMatrix<Complex64>> {
    let k = f.k();
    let mut m = DMatrix::zeros(k, k);
    for i in 0..k {
        for j in 0..k {
            m[(i, j)] = f.entry(i, j).eval_slice(z)?;
        }
    }
    Ok(m)
}

/// Estimates `sup |f|` on nested boxes `[-L, L]^{2d}` for each `L` in the schedule.
///
/// Boxes are nested, so each reported sup is the running maximum over all boxes
/// so far. The verdict is GROWING when the last ratio of consecutive sups exceeds
/// the growth threshold.
pub fn sup_scan(f: &Symbol, schedule: &[f64], cfg: &SupScanConfig) -> Result<SupEstimate> {
    if schedule.is_empty() {
        return Err(Error::InvalidInput("L schedule must be non-empty".into()));
    }
    if schedule.windows(2).any(|w| w[1] <= w[0]) || schedule[0] <= 0.0 {
        return Err(Error::InvalidInput("L schedule must be positive and increasing".into()));
    }
    let axes = 2 * f.dims();
    let points = cfg.effective_points(axes);
    let mut sups: Vec<f64> = Vec::with_capacity(schedule.len());
    for &l in schedule {
        let grid = SampleGrid { half_width: l, points_per_axis: points };
        let here = grid_max(grid, axes, |z| Ok(magnitude(&evaluate_raw(f, z)?)))?;
        let running = sups.last().copied().unwrap_or(0.0).max(here);
        sups.push(running);
    }
    let last_ratio = if sups.len() >= 2 {
        let (a, b) = (sups[sups.len() - 2], sups[sups.len() - 1]);
        Some(if a > 0.0 {
            b / a
        } else if b > 0.0 {
            f64::INFINITY
        } else {
            1.0
        })
    } else {
        None
    };
    let verdict = match last_ratio {
        None => GrowthVerdict::Inconclusive,
        Some(r) if r > cfg.growth_threshold => GrowthVerdict::Growing,
        Some(_) => GrowthVerdict::Bounded,
    };
    Ok(SupEstimate { half_widths: schedule.to_vec(), sups, points_per_axis: points, last_ratio, verdict })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HermitianCheck {
    pub pass: bool,
    pub max_deviation: f64,
    pub tolerance: f64,
}

/// Checks `max_z ||F(z) - F(z)^dagger|| / 2` over a sample grid; for scalars this
/// is `max |Im f|`.
pub fn is_hermitian(f: &Symbol, grid: SampleGrid, tolerance: f64) -> Result<HermitianCheck> {
    let axes = 2 * f.dims();
    let dev = grid_max(grid, axes, |z| {
        let m = evaluate_raw(f, z)?;
        let diff = &m - m.adjoint();
        Ok(0.5 * magnitude(&diff))
    })?;
    Ok(HermitianCheck { pass: dev <= tolerance, max_deviation: dev, tolerance })
}
