//! Quantitative checks of the long-time behaviour: power-law rate fits,
//! structural property checks and convergence traces in self-similar variables.

pub mod checks;
pub mod convergence;
pub mod fit;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::grid::GridError;
use crate::profile::ProfileError;
use crate::solver::SolverError;
use crate::support::SupportError;

pub use checks::{
    barrier_check, energy_check, partial_monotonicity_check, positivity_floor_check, ssni_check,
    travelling_wave_offset, BarrierReport, EnergyReport, PartialMonotonicityReport,
    PositivityReport, SsniReport,
};
pub use convergence::{
    asymptotics, convergence_to_profile, support_convergence, ConvergenceOptions,
    ConvergenceReport, ConvergenceTrace, SupportConvergenceReport,
};
pub use fit::{
    fit_power_law, record_run, smoothing_fit, support_growth_fit, FitError, RateFit, RunRecord,
};

#[derive(Debug, Error)]
pub enum DiagnosticsError {
    #[error("initial mass {data} differs from the profile mass {profile}")]
    MassMismatch { data: f64, profile: f64 },
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error(transparent)]
    Fit(#[from] FitError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Profile(#[from] ProfileError),
    #[error(transparent)]
    Support(#[from] SupportError),
}

/// Per-experiment summary persisted as JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub name: String,
    pub params: SummaryParams,
    pub fits: SummaryFits,
    pub pass: std::collections::BTreeMap<String, bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryParams {
    #[serde(rename = "N")]
    pub n: usize,
    pub m: Vec<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SummaryFits {
    pub alpha_hat: Option<f64>,
    pub a_hat: Vec<f64>,
}

impl Summary {
    pub fn new(name: impl Into<String>, m: &[f64]) -> Self {
        Self {
            name: name.into(),
            params: SummaryParams {
                n: m.len(),
                m: m.to_vec(),
            },
            fits: SummaryFits::default(),
            pass: Default::default(),
        }
    }

    pub fn record(&mut self, check: impl Into<String>, passed: bool) {
        self.pass.insert(check.into(), passed);
    }

    pub fn all_passed(&self) -> bool {
        self.pass.values().all(|&p| p)
    }
}
