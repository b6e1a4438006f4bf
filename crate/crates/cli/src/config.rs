use std::path::Path;

use serde::{Deserialize, Serialize};
use weyl_lab::diagnostics::{BcConfig, DiagnosticsConfig, MnormConfig};
use weyl_lab::fock::{QuadratureConfig, QuantMethod};
use weyl_lab::toeplitz::PolarConfig;

use crate::Failure;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Binary,
}

/// Settings shared by all commands. Every field is optional: flags override the
/// config file, which overrides built-in defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(rename = "N", skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(rename = "M", skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub method: Option<QuantMethod>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub levels: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub quadrature: Option<QuadratureConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub polar: Option<PolarConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diagnostics: Option<DiagnosticsConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bc: Option<BcConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mnorm: Option<MnormConfig>,
    /// Worker threads; never embedded in artifacts.
    #[serde(skip_serializing)]
    pub workers: Option<usize>,
}

impl RunConfig {
    pub fn load(path: Option<&Path>) -> Result<RunConfig, Failure> {
        let Some(path) = path else { return Ok(RunConfig::default()) };
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::usage(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| Failure::usage(format!("invalid config {}: {e}", path.display())))
    }

    pub fn d(&self) -> usize {
        self.d.unwrap_or(1)
    }

    pub fn quadrature(&self) -> QuadratureConfig {
        self.quadrature.clone().unwrap_or_default()
    }

    pub fn polar(&self) -> PolarConfig {
        self.polar.clone().unwrap_or_default()
    }

    pub fn method(&self) -> QuantMethod {
        self.method.unwrap_or(QuantMethod::Auto)
    }

    pub fn format(&self) -> Format {
        self.format.unwrap_or(Format::Json)
    }

    /// Checks the shared fields before any command runs.
    pub fn validate(&self) -> Result<(), Failure> {
        let positive = [("d", self.d), ("k", self.k), ("N", self.n), ("M", self.m), ("levels", self.levels)];
        for (name, v) in positive {
            if v == Some(0) {
                return Err(Failure::usage(format!("{name} must be positive")));
            }
        }
        if let (Some(n), Some(m)) = (self.n, self.m) {
            if 2 * m > n {
                return Err(Failure::usage(format!("M = {m} must satisfy 2M <= N = {n}")));
            }
        }
        if let Some(t) = self.tolerance {
            if !(t.is_finite() && t > 0.0) {
                return Err(Failure::usage("tolerance must be positive".into()));
            }
        }
        if self.workers == Some(0) {
            return Err(Failure::usage("workers must be positive".into()));
        }
        if let Some(q) = &self.quadrature {
            q.validate().map_err(Failure::from)?;
        }
        Ok(())
    }
}
