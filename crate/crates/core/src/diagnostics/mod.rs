//! Runnable verdicts for the essential self-adjointness criteria.
//!
//! Three hypothesis checks ([`check_simple_criterion`], [`check_oscillation_criterion`],
//! [`check_m_infty_one`]) test sufficient conditions. Two evidence experiments
//! ([`cv_report`], [`bc_sensitivity`]) look at spectra and norms directly.
//! [`build_report`] runs them all and aggregates one verdict.

mod bc;
mod cv;
mod mnorm;
mod oscillation;
mod report;
mod simple;

pub use bc::{bc_sensitivity, fd_eigenvalues, BcConfig, BcSpectrumTable, BoundaryCondition, SpectrumRow};
pub use cv::{cv_bound_check, cv_report, CvBound, CvConfig, CvReport};
pub use mnorm::{
    check_m_infty_one, m_infty_one_norm, m_infty_one_norm_sampled, MInftyOneReport, MnormConfig, MnormEstimate,
    MnormRow,
};
pub use oscillation::{check_oscillation_criterion, DirectionResult, OscillationConfig, OscillationReport};
pub use report::{
    build_report, schrodinger_potential, BcReport, DiagnosticsConfig, DiagnosticsReport, Outcome, SkippedCriterion,
    REPORT_SCHEMA,
};
pub use simple::{
    check_simple_criterion, default_scan_config, scan_derivatives, DerivativeScan, SimpleCriterionReport,
    DEFAULT_SCAN_SCHEDULE,
};

#[cfg(test)]
mod tests;
