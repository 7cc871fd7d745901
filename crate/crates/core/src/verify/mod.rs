//! Executable versions of the qualitative theorems: each check turns a
//! solver output into a [`CheckReport`] comparing a measured quantity with
//! its theoretical bound.

mod checks;
mod random;
mod study;
mod suite;

use serde::{Deserialize, Serialize};

pub use checks::{
    check_boundary_complementarity, check_contraction, check_jump_diffusion, check_lower_bound,
    check_max_principle, check_neumann_mass, check_oracle_match, contraction_report, default_match_tol,
    jump_diffusion_report, jump_report, locate_edge, max_increment, oracle_error, oracle_match_report, support_edge, ComplementarityTol,
};
pub use random::{random_contraction_pair, random_neumann_spec, random_piecewise_source, random_state};
pub use study::{check_uniqueness, convergence_study, jacobian_mismatch, ConvergenceRow, ConvergenceTable};
pub use suite::{all_fail_or_inert, inject_fault, run_suite, suite_cases, Suite, SuiteCase, SuiteOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckStatus {
    Pass,
    Fail,
    /// A precondition of the bound does not hold for this run.
    Skipped,
    NotApplicable,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub name: String,
    pub status: CheckStatus,
    pub measured: f64,
    pub bound: f64,
    pub tolerance: f64,
    /// Where the bound comes from, in words.
    pub provenance: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl CheckReport {
    /// Passes when `measured <= bound + tolerance`.
    pub fn at_most(name: &str, measured: f64, bound: f64, tolerance: f64, provenance: &str) -> Self {
        let ok = measured <= bound + tolerance;
        Self::with_status(name, ok, measured, bound, tolerance, provenance)
    }

    /// Passes when `measured >= bound - tolerance`.
    pub fn at_least(name: &str, measured: f64, bound: f64, tolerance: f64, provenance: &str) -> Self {
        let ok = measured >= bound - tolerance;
        Self::with_status(name, ok, measured, bound, tolerance, provenance)
    }

    fn with_status(name: &str, ok: bool, measured: f64, bound: f64, tolerance: f64, provenance: &str) -> Self {
        Self {
            name: name.to_string(),
            // NaN never passes
            status: if ok { CheckStatus::Pass } else { CheckStatus::Fail },
            measured,
            bound,
            tolerance,
            provenance: provenance.to_string(),
            note: None,
        }
    }

    pub fn skipped(name: &str, reason: impl Into<String>, provenance: &str) -> Self {
        Self::inert(name, CheckStatus::Skipped, reason.into(), provenance)
    }

    pub fn not_applicable(name: &str, reason: impl Into<String>, provenance: &str) -> Self {
        Self::inert(name, CheckStatus::NotApplicable, reason.into(), provenance)
    }

    /// A check that could not produce its measurement.
    pub fn errored(name: &str, err: &crate::Error, provenance: &str) -> Self {
        Self::inert(name, CheckStatus::Fail, err.to_string(), provenance)
    }

    fn inert(name: &str, status: CheckStatus, note: String, provenance: &str) -> Self {
        Self {
            name: name.to_string(),
            status,
            measured: f64::NAN,
            bound: f64::NAN,
            tolerance: f64::NAN,
            provenance: provenance.to_string(),
            note: Some(note),
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    pub fn renamed(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn passed(&self) -> bool {
        self.status == CheckStatus::Pass
    }

    pub fn failed(&self) -> bool {
        self.status == CheckStatus::Fail
    }
}
