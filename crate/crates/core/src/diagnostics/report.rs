use serde::{Deserialize, Serialize};

use super::bc::{bc_sensitivity, BcConfig, BcSpectrumTable};
use super::cv::{cv_report, CvConfig, CvReport};
use super::mnorm::{check_m_infty_one, MInftyOneReport, MnormConfig};
use super::oscillation::{check_oscillation_criterion, OscillationConfig, OscillationReport};
use super::simple::{check_simple_criterion, default_scan_config, SimpleCriterionReport, DEFAULT_SCAN_SCHEDULE};
use crate::fock::QuadratureConfig;
use crate::symbol::{SupScanConfig, Symbol, SymbolExpr};
use crate::verdict::Verdict;

pub const REPORT_SCHEMA: &str = "weyl-lab-report/1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DiagnosticsConfig {
    pub scan_schedule: Vec<f64>,
    /// Default depends on `d`, see [`default_scan_config`].
    pub scan: Option<SupScanConfig>,
    pub oscillation: OscillationConfig,
    pub quadrature: QuadratureConfig,
    pub mnorm: MnormConfig,
    pub cv: CvConfig,
    pub bc: BcConfig,
}

impl Default for DiagnosticsConfig {
    fn default() -> Self {
        DiagnosticsConfig {
            scan_schedule: DEFAULT_SCAN_SCHEDULE.to_vec(),
            scan: None,
            oscillation: OscillationConfig::default(),
            quadrature: QuadratureConfig::default(),
            mnorm: MnormConfig::default(),
            cv: CvConfig::default(),
            bc: BcConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BcReport {
    pub potential: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table: Option<BcSpectrumTable>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkippedCriterion {
    pub verdict: Verdict,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Outcome<T> {
    Ran(T),
    Skipped(SkippedCriterion),
}

impl<T> Outcome<T> {
    pub fn ran(&self) -> Option<&T> {
        match self {
            Outcome::Ran(t) => Some(t),
            Outcome::Skipped(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsReport {
    pub schema: String,
    pub symbol: String,
    pub d: usize,
    pub k: usize,
    pub config: DiagnosticsConfig,
    pub simple_criterion: SimpleCriterionReport,
    pub oscillation_criterion: Outcome<OscillationReport>,
    pub m_infty_one: Outcome<MInftyOneReport>,
    pub cv_bound: CvReport,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bc_sensitivity: Option<BcReport>,
    pub verdict: Verdict,
    pub caveats: Vec<String>,
}

impl DiagnosticsReport {
    pub fn oscillation_verdict(&self) -> Verdict {
        match &self.oscillation_criterion {
            Outcome::Ran(r) => r.verdict,
            Outcome::Skipped(s) => s.verdict,
        }
    }

    pub fn m_infty_one_verdict(&self) -> Verdict {
        match &self.m_infty_one {
            Outcome::Ran(r) => r.verdict,
            Outcome::Skipped(s) => s.verdict,
        }
    }

    /// Pretty JSON; identical inputs give identical bytes.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Sample nodes for the pattern test of [`schrodinger_potential`].
const PATTERN_NODES: [f64; 7] = [-3.0, -2.0, -0.5, 0.0, 0.7, 1.5, 2.5];

/// `V` when a one-mode scalar `f` has the form `xi^2 + V(x)`: `d^2_xi f = 2`,
/// `d_x d_xi f = 0` and `d_xi f(x, 0) = 0`, checked exactly where the tree folds
/// to a constant and on sample nodes otherwise.
pub fn schrodinger_potential(f: &Symbol) -> Option<SymbolExpr> {
    let e = f.as_scalar()?;
    if e.dims() != 1 {
        return None;
    }
    let d_xi = e.partial(1);
    let checks = [(d_xi.partial(1), 2.0), (d_xi.partial(0), 0.0)];
    for (g, target) in &checks {
        if let Some(c) = g.as_const() {
            if c.re != *target || c.im != 0.0 {
                return None;
            }
            continue;
        }
        for &x in &PATTERN_NODES {
            for &xi in &PATTERN_NODES {
                match g.eval_slice(&[x, xi]) {
                    Ok(v) if (v.re - target).abs() <= 1e-12 && v.im.abs() <= 1e-12 => {}
                    _ => return None,
                }
            }
        }
    }
    let at_zero = d_xi.substitute(1, 0.0);
    if at_zero.as_const().is_none_or(|c| c.norm() != 0.0) {
        for &x in &PATTERN_NODES {
            match at_zero.eval_slice(&[x, 0.0]) {
                Ok(v) if v.norm() <= 1e-12 => {}
                _ => return None,
            }
        }
    }
    Some(e.substitute(1, 0.0))
}

fn bc_report(v: SymbolExpr, cfg: &BcConfig) -> BcReport {
    let potential = v.to_string();
    match bc_sensitivity(&v, cfg) {
        Ok(table) => BcReport { potential, verdict: table.verdict, table: Some(table), error: None },
        Err(e) => BcReport { potential, table: None, error: Some(e.to_string()), verdict: Verdict::Inconclusive },
    }
}

/// Runs every applicable sub-criterion and aggregates the verdicts.
///
/// Hypothesis checks (simple, oscillation, `M^{inf,1}`) must all pass for an
/// overall PASS. The cv bound and BC sensitivity are evidence experiments: a FAIL
/// from either forces an overall FAIL, an INCONCLUSIVE one only adds a caveat.
/// Any FAIL wins.
pub fn build_report(f: &Symbol, cfg: &DiagnosticsConfig) -> DiagnosticsReport {
    let d = f.dims();
    let scan = cfg.scan.unwrap_or_else(|| default_scan_config(d));
    let simple = check_simple_criterion(f, &cfg.scan_schedule, &scan);
    let skip_reason = simple.has_errors().then(|| {
        format!(
            "skipped: symbol evaluation failed in the derivative scan ({})",
            simple.reason.clone().unwrap_or_default()
        )
    });
    let skipped = |reason: &String| SkippedCriterion { verdict: Verdict::Inconclusive, reason: reason.clone() };

    let ((oscillation, m_infty_one), (cv_bound, bc)) = rayon::join(
        || match &skip_reason {
            Some(r) => (Outcome::Skipped(skipped(r)), Outcome::Skipped(skipped(r))),
            None => rayon::join(
                || Outcome::Ran(check_oscillation_criterion(f, &cfg.oscillation, &cfg.quadrature)),
                || Outcome::Ran(check_m_infty_one(f, &cfg.mnorm)),
            ),
        },
        || {
            rayon::join(
                || cv_report(f, &cfg.cv, &cfg.scan_schedule, &scan, &cfg.quadrature),
                || schrodinger_potential(f).map(|v| bc_report(v, &cfg.bc)),
            )
        },
    );

    let mut report = DiagnosticsReport {
        schema: REPORT_SCHEMA.to_string(),
        symbol: f.to_string(),
        d,
        k: f.k(),
        config: cfg.clone(),
        simple_criterion: simple,
        oscillation_criterion: oscillation,
        m_infty_one,
        cv_bound,
        bc_sensitivity: bc,
        verdict: Verdict::Inconclusive,
        caveats: Vec::new(),
    };
    aggregate(&mut report);
    report
}

fn aggregate(r: &mut DiagnosticsReport) {
    let hypotheses = [
        ("simple_criterion", r.simple_criterion.verdict),
        ("oscillation_criterion", r.oscillation_verdict()),
        ("m_infty_one", r.m_infty_one_verdict()),
    ];
    let mut evidence = Vec::new();
    if let Some(v) = r.cv_bound.verdict {
        evidence.push(("cv_bound", v));
    }
    if let Some(b) = &r.bc_sensitivity {
        evidence.push(("bc_sensitivity", b.verdict));
    }
    let any_fail = hypotheses.iter().chain(&evidence).any(|(_, v)| *v == Verdict::Fail);
    r.verdict = if any_fail {
        Verdict::Fail
    } else if hypotheses.iter().all(|(_, v)| *v == Verdict::Pass) {
        Verdict::Pass
    } else {
        Verdict::Inconclusive
    };

    let mut caveats =
        vec!["verdicts are numerical evidence on finite grids and truncated bases, not proofs".to_string()];
    for (name, v) in hypotheses.iter().chain(&evidence) {
        if *v != Verdict::Pass {
            caveats.push(format!("{name}: {v}"));
        }
    }
    if r.verdict == Verdict::Fail {
        caveats.push(
            "a FAIL means a sufficient hypothesis is violated or spectral evidence points against essential self-adjointness; it does not prove the operator fails to be essentially self-adjoint"
                .to_string(),
        );
    }
    if !r.cv_bound.applicable {
        caveats.push("cv_bound: not applicable, excluded from aggregation".to_string());
    }
    if r.bc_sensitivity.is_none() {
        caveats.push("bc_sensitivity: symbol is not of the form xi^2 + V(x) in one mode, not run".to_string());
    }
    r.caveats = caveats;
}
