use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::symbol::SymbolExpr;
use crate::verdict::Verdict;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum BoundaryCondition {
    Dirichlet,
    Neumann,
}

impl BoundaryCondition {
    pub fn as_str(self) -> &'static str {
        match self {
            BoundaryCondition::Dirichlet => "DIRICHLET",
            BoundaryCondition::Neumann => "NEUMANN",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BcConfig {
    pub half_widths: Vec<f64>,
    /// Number of grid cells on `[-L, L]`.
    pub grid: usize,
    pub levels: usize,
    /// Allowed eigenvalue change under grid doubling, relative to `max(1, |lambda|)`.
    pub grid_tolerance: f64,
    /// Levels compared when judging boundary-condition dependence.
    pub compared_levels: usize,
    /// Discrepancy above this at every `L` counts as persistent.
    pub persistence_threshold: f64,
    /// Discrepancy at the largest `L` below this counts as converged.
    pub agreement_threshold: f64,
}

impl Default for BcConfig {
    fn default() -> Self {
        BcConfig {
            half_widths: vec![8.0, 10.0, 12.0],
            grid: 4000,
            levels: 5,
            grid_tolerance: 1e-2,
            compared_levels: 3,
            persistence_threshold: 0.1,
            agreement_threshold: 1e-3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumRow {
    #[serde(rename = "L")]
    pub half_width: f64,
    pub bc: BoundaryCondition,
    /// 1-based level.
    pub level: usize,
    pub eigenvalue: f64,
}

/// Lowest eigenvalues of `-d^2/dx^2 + V` on `[-L, L]` per `(L, BC)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BcSpectrumTable {
    pub potential: String,
    pub half_widths: Vec<f64>,
    pub grid: usize,
    pub levels: usize,
    pub rows: Vec<SpectrumRow>,
    /// `|lambda_D - lambda_N|` per level, one row per `L`.
    pub discrepancy: Vec<Vec<f64>>,
    /// Largest relative eigenvalue change under grid doubling.
    pub grid_change: f64,
    pub verdict: Verdict,
    pub interpretation: String,
}

impl BcSpectrumTable {
    pub fn eigenvalues(&self, half_width: f64, bc: BoundaryCondition) -> Vec<f64> {
        self.rows.iter().filter(|r| r.half_width == half_width && r.bc == bc).map(|r| r.eigenvalue).collect()
    }

    /// Per-level discrepancy at the largest `L`.
    pub fn final_discrepancy(&self) -> &[f64] {
        self.discrepancy.last().map(Vec::as_slice).unwrap_or(&[])
    }

    /// Rows as CSV text with columns `L,bc,level,eigenvalue`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("L,bc,level,eigenvalue\n");
        for r in &self.rows {
            out.push_str(&format!("{:?},{},{},{:?}\n", r.half_width, r.bc.as_str(), r.level, r.eigenvalue));
        }
        out
    }
}

/// Symmetric tridiagonal matrix with diagonal `a` and off-diagonal `b` (length `n - 1`).
struct Tridiagonal {
    a: Vec<f64>,
    b2: Vec<f64>,
    bound: (f64, f64),
}

impl Tridiagonal {
    fn new(a: Vec<f64>, b: Vec<f64>) -> Self {
        let n = a.len();
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for i in 0..n {
            let r = if i > 0 { b[i - 1].abs() } else { 0.0 } + if i + 1 < n { b[i].abs() } else { 0.0 };
            lo = lo.min(a[i] - r);
            hi = hi.max(a[i] + r);
        }
        Tridiagonal { a, b2: b.iter().map(|x| x * x).collect(), bound: (lo, hi) }
    }

    /// Number of eigenvalues strictly below `x` (Sturm sequence).
    fn count_below(&self, x: f64) -> usize {
        let mut count = 0;
        let mut q = self.a[0] - x;
        if q < 0.0 {
            count += 1;
        }
        for i in 1..self.a.len() {
            let prev = if q == 0.0 { f64::EPSILON * (self.b2[i - 1].sqrt() + f64::MIN_POSITIVE) } else { q };
            q = self.a[i] - x - self.b2[i - 1] / prev;
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// The `k`-th smallest eigenvalue (0-based) by bisection.
    fn eigenvalue(&self, k: usize) -> f64 {
        let (mut lo, mut hi) = self.bound;
        let span = (hi - lo).abs().max(1.0);
        while hi - lo > 4.0 * f64::EPSILON * span.max(lo.abs().max(hi.abs())) {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.count_below(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }
}

fn potential_values(v: &SymbolExpr, xs: &[f64]) -> Result<Vec<f64>> {
    xs.iter()
        .map(|&x| {
            let val = v.eval_slice(&[x, 0.0])?;
            if val.im.abs() > 1e-12 * val.re.abs().max(1.0) {
                return Err(Error::InvalidInput(format!("potential is not real at x = {x}")));
            }
            Ok(val.re)
        })
        .collect()
}

/// Second-order finite differences: Dirichlet on the vertices `-L + i h`,
/// Neumann on the cell centres `-L + (i + 1/2) h` with mirrored ghost cells.
fn fd_operator(v: &SymbolExpr, half_width: f64, cells: usize, bc: BoundaryCondition) -> Result<Tridiagonal> {
    let h = 2.0 * half_width / cells as f64;
    let inv = 1.0 / (h * h);
    let (xs, mut diag): (Vec<f64>, Vec<f64>) = match bc {
        BoundaryCondition::Dirichlet => {
            let xs: Vec<f64> = (1..cells).map(|i| -half_width + i as f64 * h).collect();
            let n = xs.len();
            (xs, vec![2.0 * inv; n])
        }
        BoundaryCondition::Neumann => {
            let xs: Vec<f64> = (0..cells).map(|i| -half_width + (i as f64 + 0.5) * h).collect();
            let mut d = vec![2.0 * inv; cells];
            d[0] = inv;
            d[cells - 1] = inv;
            (xs, d)
        }
    };
    let pot = potential_values(v, &xs)?;
    for (d, p) in diag.iter_mut().zip(&pot) {
        *d += p;
    }
    let off = vec![-inv; xs.len() - 1];
    Ok(Tridiagonal::new(diag, off))
}

/// Lowest `levels` eigenvalues, ascending.
pub fn fd_eigenvalues(
    v: &SymbolExpr,
    half_width: f64,
    cells: usize,
    bc: BoundaryCondition,
    levels: usize,
) -> Result<Vec<f64>> {
    if v.depends_on(1) || v.dims() != 1 {
        return Err(Error::InvalidInput("the potential must be a function of x alone".into()));
    }
    if !(half_width.is_finite() && half_width > 0.0) {
        return Err(Error::InvalidInput("interval half-width must be positive".into()));
    }
    if cells < 500 {
        return Err(Error::InvalidInput("finite-difference grid needs at least 500 cells".into()));
    }
    let t = fd_operator(v, half_width, cells, bc)?;
    if levels > t.a.len() {
        return Err(Error::InvalidInput("more levels requested than grid points".into()));
    }
    Ok((0..levels).map(|k| t.eigenvalue(k)).collect())
}

/// Spectral evidence for `-d^2/dx^2 + V` through boundary-condition dependence.
///
/// Persistent Dirichlet/Neumann discrepancies as `L` grows point to a limit-circle
/// end (evidence against essential self-adjointness); discrepancies that vanish or
/// decay point the other way.
pub fn bc_sensitivity(v: &SymbolExpr, cfg: &BcConfig) -> Result<BcSpectrumTable> {
    if cfg.half_widths.is_empty() || cfg.half_widths.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidInput("L schedule must be non-empty and increasing".into()));
    }
    if cfg.levels == 0 || cfg.compared_levels == 0 {
        return Err(Error::InvalidInput("at least one level is required".into()));
    }
    let bcs = [BoundaryCondition::Dirichlet, BoundaryCondition::Neumann];
    let jobs: Vec<(f64, BoundaryCondition, usize)> = cfg
        .half_widths
        .iter()
        .flat_map(|&l| bcs.iter().flat_map(move |&bc| [(l, bc, 1usize), (l, bc, 2usize)]))
        .collect();
    let spectra: Vec<Result<Vec<f64>>> =
        jobs.par_iter().map(|&(l, bc, refine)| fd_eigenvalues(v, l, cfg.grid * refine, bc, cfg.levels)).collect();
    let spectra: Vec<Vec<f64>> = spectra.into_iter().collect::<Result<_>>()?;

    let mut rows = Vec::new();
    let mut grid_change = 0.0f64;
    let mut discrepancy = Vec::new();
    for (li, &l) in cfg.half_widths.iter().enumerate() {
        let base = li * 4;
        let (dir, dir2, neu, neu2) = (&spectra[base], &spectra[base + 1], &spectra[base + 2], &spectra[base + 3]);
        for (coarse, fine) in [(dir, dir2), (neu, neu2)] {
            for (a, b) in coarse.iter().zip(fine) {
                grid_change = grid_change.max((a - b).abs() / b.abs().max(1.0));
            }
        }
        for (bc, values) in [(BoundaryCondition::Dirichlet, dir), (BoundaryCondition::Neumann, neu)] {
            for (k, &e) in values.iter().enumerate() {
                rows.push(SpectrumRow { half_width: l, bc, level: k + 1, eigenvalue: e });
            }
        }
        discrepancy.push(dir.iter().zip(neu).map(|(a, b)| (a - b).abs()).collect::<Vec<f64>>());
    }
    if grid_change > cfg.grid_tolerance {
        return Err(Error::GridTooCoarse(format!(
            "eigenvalues change by {grid_change:.3e} (relative) when the grid is doubled"
        )));
    }
    let (verdict, interpretation) = judge(&discrepancy, &cfg.half_widths, cfg);
    Ok(BcSpectrumTable {
        potential: v.to_string(),
        half_widths: cfg.half_widths.clone(),
        grid: cfg.grid,
        levels: cfg.levels,
        rows,
        discrepancy,
        grid_change,
        verdict,
        interpretation,
    })
}

fn judge(discrepancy: &[Vec<f64>], half_widths: &[f64], cfg: &BcConfig) -> (Verdict, String) {
    let worst: Vec<f64> =
        discrepancy.iter().map(|row| row.iter().take(cfg.compared_levels).copied().fold(0.0, f64::max)).collect();
    let last = *worst.last().expect("non-empty schedule");
    let first = worst[0];
    let persistent = worst.iter().all(|&w| w > cfg.persistence_threshold);
    // decay exponent p in worst ~ L^{-p}
    let decay = if worst.len() >= 2 && first > 0.0 && last > 0.0 {
        Some(-(last / first).ln() / (half_widths[half_widths.len() - 1] / half_widths[0]).ln())
    } else {
        None
    };
    if last <= cfg.agreement_threshold {
        (Verdict::Pass, format!("spectra agree across boundary conditions to {last:.2e} at the largest L"))
    } else if persistent && decay.is_none_or(|p| p < 0.5) {
        (
            Verdict::Fail,
            format!(
                "boundary-condition discrepancy stays above {} for every L ({first:.3e} .. {last:.3e}); \
                 evidence against essential self-adjointness",
                cfg.persistence_threshold
            ),
        )
    } else if decay.is_some_and(|p| p >= 1.0) && worst.windows(2).all(|w| w[1] < w[0]) {
        (Verdict::Pass, format!("boundary-condition discrepancy decays with L (exponent {:.2})", decay.unwrap_or(0.0)))
    } else {
        (
            Verdict::Inconclusive,
            format!("boundary-condition discrepancy {first:.3e} .. {last:.3e} shows no clear trend"),
        )
    }
}
