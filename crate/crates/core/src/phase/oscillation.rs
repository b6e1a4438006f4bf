use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{quantize, spectral_norm, QuadratureConfig, QuantMethod};
use crate::symbol::{MultiIndex, PhasePoint, Symbol};
use crate::verdict::Verdict;

/// Sampled norms `n_j(z) = || P_M op(partial_j f - partial_j f(. + z)) P_M ||`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OscillationProfile {
    /// Direction `j` in `1..=2d` (positions first, then momenta).
    pub direction: usize,
    pub shifts: Vec<PhasePoint>,
    pub norms: Vec<f64>,
    pub basis_size: usize,
    pub restriction_size: usize,
    /// The same norms recomputed with doubled basis and block, if requested.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub refined_norms: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvidenceRow {
    pub z: PhasePoint,
    pub norm: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionVerdict {
    pub verdict: Verdict,
    /// `max_z n(z) / (1 + |z|)`.
    pub c_estimate: f64,
    /// Largest growth factor of the per-octave maximal ratio between consecutive octaves.
    pub max_ratio: f64,
    /// Per-octave growth factors, in increasing `|z|`.
    pub octave_growth: Vec<f64>,
    /// Largest relative norm increase under refinement, when refinement ran.
    pub refinement_increase: Option<f64>,
    pub evidence: Vec<EvidenceRow>,
    pub caveats: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CriterionConfig {
    /// Per-octave growth above this over the last two octaves means FAIL.
    pub growth_threshold: f64,
    /// Final-octave growth at most this is stable.
    pub stability_threshold: f64,
    /// Relative increase under refinement above this blocks PASS.
    pub refinement_tolerance: f64,
}

impl Default for CriterionConfig {
    fn default() -> Self {
        CriterionConfig { growth_threshold: 1.5, stability_threshold: 1.2, refinement_tolerance: 0.05 }
    }
}

/// `s e_k` for every axis `k` and `s` in `{1, 2, 4, 8}`.
pub fn default_shifts(d: usize) -> Vec<PhasePoint> {
    let mut out = Vec::new();
    for axis in 0..2 * d {
        for s in [1.0, 2.0, 4.0, 8.0] {
            out.push(PhasePoint::along(d, axis, s));
        }
    }
    out
}

fn profile_norms(
    f: &Symbol,
    j: usize,
    shifts: &[PhasePoint],
    n: usize,
    m: usize,
    quad: &QuadratureConfig,
) -> Result<Vec<f64>> {
    let d = f.dims();
    let deriv = f.differentiate(&MultiIndex::unit(2 * d, j - 1))?;
    let results: Vec<Result<f64>> = shifts
        .par_iter()
        .map(|z| {
            if z.dims() != d {
                return Err(Error::DimensionMismatch("shift dimension differs from the symbol".into()));
            }
            let diff = deriv.sub(&deriv.shift(z)?)?;
            let op = quantize(&diff, n, QuantMethod::Auto, quad)?;
            Ok(spectral_norm(&op.restrict(m)))
        })
        .collect();
    results.into_iter().collect()
}

/// Samples `n_j(z)` on the given shifts; `j` is 1-based.
///
/// Truncated norms are lower bounds of the norms of the full operators.
pub fn oscillation_profile(
    f: &Symbol,
    j: usize,
    shifts: &[PhasePoint],
    n: usize,
    m: usize,
    quad: &QuadratureConfig,
) -> Result<OscillationProfile> {
    let d = f.dims();
    if j == 0 || j > 2 * d {
        return Err(Error::InvalidInput(format!("direction must be in 1..={}", 2 * d)));
    }
    if m == 0 || 2 * m > n {
        return Err(Error::InvalidInput(format!("trusted block M = {m} must satisfy 1 <= M <= N/2")));
    }
    let norms = profile_norms(f, j, shifts, n, m, quad)?;
    Ok(OscillationProfile {
        direction: j,
        shifts: shifts.to_vec(),
        norms,
        basis_size: n,
        restriction_size: m,
        refined_norms: None,
    })
}

/// Recomputes the profile with `2N` and `2M`.
pub fn refine_profile(profile: OscillationProfile, f: &Symbol, quad: &QuadratureConfig) -> Result<OscillationProfile> {
    let refined = profile_norms(
        f,
        profile.direction,
        &profile.shifts,
        2 * profile.basis_size,
        2 * profile.restriction_size,
        quad,
    )?;
    Ok(OscillationProfile { refined_norms: Some(refined), ..profile })
}

pub fn criterion_fit(profile: &OscillationProfile) -> Result<CriterionVerdict> {
    criterion_fit_with(profile, &CriterionConfig::default())
}

fn growth(from: f64, to: f64) -> f64 {
    if from > 0.0 {
        to / from
    } else if to > 0.0 {
        f64::INFINITY
    } else {
        1.0
    }
}

/// Fits `n(z) <= c (1 + |z|)`: groups samples by `|z|` into octaves and compares
/// the per-octave maximal ratio between consecutive octaves.
pub fn criterion_fit_with(profile: &OscillationProfile, cfg: &CriterionConfig) -> Result<CriterionVerdict> {
    let evidence: Vec<EvidenceRow> = profile
        .shifts
        .iter()
        .zip(&profile.norms)
        .map(|(z, &norm)| EvidenceRow { z: z.clone(), norm, ratio: norm / (1.0 + z.norm()) })
        .collect();

    let mut radii: Vec<f64> = profile.shifts.iter().map(|z| z.norm()).filter(|&r| r > 0.0).collect();
    radii.sort_by(f64::total_cmp);
    radii.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * b.abs());
    if radii.len() < 3 {
        return Err(Error::InsufficientSamples(format!("need at least 3 distinct |z| octaves, found {}", radii.len())));
    }
    let octave_max: Vec<f64> = radii
        .iter()
        .map(|&r| evidence.iter().filter(|e| (e.z.norm() - r).abs() <= 1e-12 * r).map(|e| e.ratio).fold(0.0, f64::max))
        .collect();
    let octave_growth: Vec<f64> = octave_max.windows(2).map(|w| growth(w[0], w[1])).collect();
    let c_estimate = evidence.iter().map(|e| e.ratio).fold(0.0, f64::max);
    let max_ratio = octave_growth.iter().copied().fold(0.0, f64::max);

    let refinement_increase = profile.refined_norms.as_ref().map(|refined| {
        refined
            .iter()
            .zip(&profile.norms)
            .map(|(&r, &n)| {
                if n > 1e-12 {
                    (r - n) / n
                } else if r > 1e-12 {
                    f64::INFINITY
                } else {
                    0.0
                }
            })
            .fold(0.0, f64::max)
    });
    let unconverged = refinement_increase.is_some_and(|inc| inc > cfg.refinement_tolerance);

    let g = octave_growth.len();
    let last = octave_growth[g - 1];
    let last_two = &octave_growth[g - 2..];
    let verdict = if last_two.iter().all(|&q| q > cfg.growth_threshold)
        || (unconverged && last_two.iter().all(|&q| q > cfg.stability_threshold))
    {
        Verdict::Fail
    } else if last <= cfg.stability_threshold && !unconverged {
        Verdict::Pass
    } else {
        Verdict::Inconclusive
    };

    let mut caveats = vec![
        "norms are computed on a truncated basis and are lower bounds of the true operator norms".to_string(),
        "a finite sample of shifts is evidence, not a proof of the bound for all z".to_string(),
    ];
    if refinement_increase.is_none() {
        caveats.push("no basis refinement was run; unbounded growth with N is not excluded".to_string());
    }
    if unconverged {
        caveats.push(format!(
            "norms still grow by more than {:.0}% when N and M are doubled",
            cfg.refinement_tolerance * 100.0
        ));
    }
    Ok(CriterionVerdict { verdict, c_estimate, max_ratio, octave_growth, refinement_increase, evidence, caveats })
}
