use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::symbol::{sup_scan, GrowthVerdict, MultiIndex, SupEstimate, SupScanConfig, Symbol};
use crate::verdict::Verdict;

/// Default nested boxes of the derivative scans.
pub const DEFAULT_SCAN_SCHEDULE: [f64; 4] = [1.0, 10.0, 100.0, 1000.0];

/// Default sup-scan grid: 201 points per axis in one mode, about `2e5` nodes in total beyond.
pub fn default_scan_config(d: usize) -> SupScanConfig {
    if d == 1 {
        SupScanConfig::default()
    } else {
        SupScanConfig { max_total_points: 200_000, ..SupScanConfig::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DerivativeScan {
    pub gamma: MultiIndex,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub estimate: Option<SupEstimate>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl DerivativeScan {
    pub fn growth(&self) -> Option<GrowthVerdict> {
        self.estimate.as_ref().map(|e| e.verdict)
    }

    /// Largest sampled magnitude, if the scan ran.
    pub fn sup(&self) -> Option<f64> {
        self.estimate.as_ref().and_then(|e| e.sups.last().copied())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimpleCriterionReport {
    pub verdict: Verdict,
    pub min_order: u32,
    pub max_order: u32,
    pub schedule: Vec<f64>,
    pub scans: Vec<DerivativeScan>,
    /// First growing derivative in scan order.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<MultiIndex>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

impl SimpleCriterionReport {
    /// True when at least one scan hit an evaluation error.
    pub fn has_errors(&self) -> bool {
        self.scans.iter().any(|s| s.error.is_some())
    }
}

/// Sup scans of `d^gamma f` for every `gamma` with order in `orders`, ordered by
/// order and then descending lexicographically.
pub fn scan_derivatives(
    f: &Symbol,
    orders: std::ops::RangeInclusive<u32>,
    schedule: &[f64],
    cfg: &SupScanConfig,
) -> Vec<DerivativeScan> {
    let vars = 2 * f.dims();
    let gammas: Vec<MultiIndex> = orders.flat_map(|o| MultiIndex::of_order(vars, o)).collect();
    gammas
        .into_par_iter()
        .map(|gamma| {
            let result = f.differentiate(&gamma).and_then(|g| sup_scan(&g, schedule, cfg));
            match result {
                Ok(estimate) => DerivativeScan { gamma, estimate: Some(estimate), error: None },
                Err(e) => DerivativeScan { gamma, estimate: None, error: Some(e.to_string()) },
            }
        })
        .collect()
}

/// Bounded derivatives of orders `2..=2d+3`, checked by sup scans on nested boxes.
pub fn check_simple_criterion(f: &Symbol, schedule: &[f64], cfg: &SupScanConfig) -> SimpleCriterionReport {
    let max_order = 2 * f.dims() as u32 + 3;
    let scans = scan_derivatives(f, 2..=max_order, schedule, cfg);
    let witness = scans.iter().find(|s| s.growth() == Some(GrowthVerdict::Growing)).map(|s| s.gamma.clone());
    let first_error = scans.iter().find_map(|s| s.error.as_ref().map(|e| (s.gamma.clone(), e.clone())));
    let all_bounded = scans.iter().all(|s| s.growth() == Some(GrowthVerdict::Bounded));
    let (verdict, reason) = if let Some(w) = &witness {
        (Verdict::Fail, Some(format!("derivative {:?} grows across the box schedule", w.as_slice())))
    } else if let Some((gamma, e)) = first_error {
        (Verdict::Inconclusive, Some(format!("evaluation of derivative {:?} failed: {e}", gamma.as_slice())))
    } else if all_bounded {
        (Verdict::Pass, None)
    } else {
        (Verdict::Inconclusive, Some("some derivative scans were inconclusive".into()))
    };
    SimpleCriterionReport { verdict, min_order: 2, max_order, schedule: schedule.to_vec(), scans, witness, reason }
}
