use serde::{Deserialize, Serialize};

use super::simple::{scan_derivatives, DerivativeScan};
use crate::fock::{operator_norm, quantize, QuadratureConfig, QuantMethod};
use crate::symbol::{GrowthVerdict, SupScanConfig, Symbol};
use crate::verdict::Verdict;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CvConfig {
    /// Basis sizes; default `[16, 32, 64]` for one mode and `[8, 16, 32]` beyond.
    pub schedule: Option<Vec<usize>>,
    /// Relative norm increase over the final doubling accepted as a plateau.
    pub plateau_tolerance: f64,
    /// Relative increase above this is growth.
    pub growth_threshold: f64,
}

impl Default for CvConfig {
    fn default() -> Self {
        CvConfig { schedule: None, plateau_tolerance: 0.02, growth_threshold: 0.2 }
    }
}

impl CvConfig {
    pub fn resolve(&self, d: usize) -> Vec<usize> {
        self.schedule.clone().unwrap_or_else(|| if d == 1 { vec![16, 32, 64] } else { vec![8, 16, 32] })
    }
}

/// Truncated operator norms across a basis schedule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvBound {
    pub schedule: Vec<usize>,
    pub norms: Vec<f64>,
    /// `max_{|gamma| <= 2d+1} sup |d^gamma f|` on the largest scan box, when known.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub derivative_sup: Option<f64>,
    /// Norms divided by `derivative_sup`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ratios: Option<Vec<f64>>,
    /// Relative norm increase over the final doubling.
    pub last_increase: f64,
    pub verdict: Verdict,
}

/// `||op_N(f)||` for each `N`; PASS on a plateau, FAIL on clear growth.
pub fn cv_bound_check(f: &Symbol, cfg: &CvConfig, quad: &QuadratureConfig) -> crate::Result<CvBound> {
    let schedule = cfg.resolve(f.dims());
    if schedule.len() < 2 || schedule.windows(2).any(|w| w[1] <= w[0]) {
        return Err(crate::Error::InvalidInput("cv schedule needs at least two increasing basis sizes".into()));
    }
    let norms = schedule
        .iter()
        .map(|&n| Ok(operator_norm(&quantize(f, n, QuantMethod::Auto, quad)?)))
        .collect::<crate::Result<Vec<f64>>>()?;
    let (a, b) = (norms[norms.len() - 2], norms[norms.len() - 1]);
    let last_increase = if a > 0.0 {
        (b - a) / a
    } else if b > 0.0 {
        f64::INFINITY
    } else {
        0.0
    };
    let verdict = if last_increase <= cfg.plateau_tolerance {
        Verdict::Pass
    } else if last_increase > cfg.growth_threshold {
        Verdict::Fail
    } else {
        Verdict::Inconclusive
    };
    Ok(CvBound { schedule, norms, derivative_sup: None, ratios: None, last_increase, verdict })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvReport {
    /// The check applies when every derivative of order at most `2d+1` is bounded.
    pub applicable: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    pub scans: Vec<DerivativeScan>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bound: Option<CvBound>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    /// `None` when the check does not apply.
    pub verdict: Option<Verdict>,
}

/// Scans orders `0..=2d+1` one order at a time, stopping at the first order that
/// is not bounded, then runs [`cv_bound_check`] when all are bounded.
pub fn cv_report(
    f: &Symbol,
    cfg: &CvConfig,
    scan_schedule: &[f64],
    scan: &SupScanConfig,
    quad: &QuadratureConfig,
) -> CvReport {
    let max_order = 2 * f.dims() as u32 + 1;
    let mut scans = Vec::new();
    for order in 0..=max_order {
        let here = scan_derivatives(f, order..=order, scan_schedule, scan);
        let blocker = here.iter().find(|s| s.growth() != Some(GrowthVerdict::Bounded)).map(|s| s.gamma.clone());
        scans.extend(here);
        if let Some(gamma) = blocker {
            return CvReport {
                applicable: false,
                reason: Some(format!("derivative {:?} is not bounded on the scan boxes", gamma.as_slice())),
                scans,
                bound: None,
                error: None,
                verdict: None,
            };
        }
    }
    let derivative_sup = scans.iter().filter_map(DerivativeScan::sup).fold(0.0, f64::max);
    match cv_bound_check(f, cfg, quad) {
        Ok(mut bound) => {
            if derivative_sup > 0.0 {
                bound.ratios = Some(bound.norms.iter().map(|n| n / derivative_sup).collect());
            }
            bound.derivative_sup = Some(derivative_sup);
            let verdict = Some(bound.verdict);
            CvReport { applicable: true, reason: None, scans, bound: Some(bound), error: None, verdict }
        }
        Err(e) => CvReport {
            applicable: true,
            reason: None,
            scans,
            bound: None,
            error: Some(e.to_string()),
            verdict: Some(Verdict::Inconclusive),
        },
    }
}
