use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::fock::QuadratureConfig;
use crate::phase::{
    criterion_fit_with, default_shifts, oscillation_profile, refine_profile, CriterionConfig, CriterionVerdict,
    OscillationProfile,
};
use crate::symbol::Symbol;
use crate::verdict::Verdict;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OscillationConfig {
    /// Basis size `N`; default 32 for one mode and 16 beyond.
    pub basis_size: Option<usize>,
    /// Trusted block `M`; default `N / 2`.
    pub block: Option<usize>,
    /// Recompute every profile at `(2N, 2M)`.
    pub refine: bool,
    pub criterion: CriterionConfig,
}

impl Default for OscillationConfig {
    fn default() -> Self {
        OscillationConfig { basis_size: None, block: None, refine: true, criterion: CriterionConfig::default() }
    }
}

impl OscillationConfig {
    pub fn resolve(&self, d: usize) -> (usize, usize) {
        let n = self.basis_size.unwrap_or(if d == 1 { 32 } else { 16 });
        (n, self.block.unwrap_or(n / 2))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirectionResult {
    pub direction: usize,
    pub verdict: Verdict,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub profile: Option<OscillationProfile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fit: Option<CriterionVerdict>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OscillationReport {
    pub verdict: Verdict,
    pub basis_size: usize,
    pub block: usize,
    pub directions: Vec<DirectionResult>,
}

fn direction(
    f: &Symbol,
    j: usize,
    n: usize,
    m: usize,
    cfg: &OscillationConfig,
    quad: &QuadratureConfig,
) -> DirectionResult {
    let run = || -> crate::Result<(OscillationProfile, CriterionVerdict)> {
        let mut profile = oscillation_profile(f, j, &default_shifts(f.dims()), n, m, quad)?;
        if cfg.refine {
            profile = refine_profile(profile, f, quad)?;
        }
        let fit = criterion_fit_with(&profile, &cfg.criterion)?;
        Ok((profile, fit))
    };
    match run() {
        Ok((profile, fit)) => {
            DirectionResult { direction: j, verdict: fit.verdict, profile: Some(profile), fit: Some(fit), error: None }
        }
        Err(e) => DirectionResult {
            direction: j,
            verdict: Verdict::Inconclusive,
            profile: None,
            fit: None,
            error: Some(e.to_string()),
        },
    }
}

/// Linear-growth fit of the oscillation profiles in every direction `j = 1..=2d`.
pub fn check_oscillation_criterion(f: &Symbol, cfg: &OscillationConfig, quad: &QuadratureConfig) -> OscillationReport {
    let (n, m) = cfg.resolve(f.dims());
    let directions: Vec<DirectionResult> =
        (1..=2 * f.dims()).into_par_iter().map(|j| direction(f, j, n, m, cfg, quad)).collect();
    let verdict = Verdict::combine(directions.iter().map(|r| r.verdict));
    OscillationReport { verdict, basis_size: n, block: m, directions }
}
