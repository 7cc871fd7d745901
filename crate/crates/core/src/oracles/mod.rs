//! Exact radial solutions and a priori bounds used as ground truth.
//!
//! Every constructor checks the hypothesis under which its formula solves
//! the continuum problem and records it in a [`Certificate`]; parameters
//! outside the hypothesis are a validity error rather than a silently
//! wrong profile.

mod bounds;
mod explicit;
mod large_g;
pub mod ode;
mod profiles;

use serde::{Deserialize, Serialize};

pub use bounds::{eps_lower_bound, LowerBound};
pub use explicit::{
    compact_support, constant_solution, constant_solution_oracle, jump_constant_example, jump_m1_example,
    m1_profile, superlinear_constant,
};
pub use large_g::{large_g_classify, GRegime, GSample, GSource, LargeGReport};
pub use profiles::{barrier_profile, hn_trace, sublinear_profile};

use ode::ProfileTable;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OracleKind {
    Constant,
    SublinearProfile,
    M1Profile,
    SuperlinearConst,
    CompactSupport,
    Barrier,
    JumpConst,
    JumpM1,
}

/// The hypothesis under which an oracle is an exact solution, as an
/// inequality `lhs <op> rhs`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub hypothesis: String,
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

impl Certificate {
    pub fn new(hypothesis: impl Into<String>, lhs: f64, rhs: f64, holds: bool) -> Self {
        Self { hypothesis: hypothesis.into(), lhs, rhs, holds }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct OracleParams {
    pub m: f64,
    /// Constant source value (sup of the source for barriers).
    pub f: f64,
    pub dim: u32,
    pub radius: f64,
    pub g: Option<f64>,
    /// Flat-core radius, support edge or jump radius, depending on the kind.
    pub interface: Option<f64>,
    /// Value on the flat core.
    pub plateau: Option<f64>,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    /// Normal flux `[z, nu]` at `rho = R`, when the construction fixes it.
    pub boundary_flux: Option<f64>,
}

#[derive(Debug, Clone)]
enum Profile {
    Constant(f64),
    /// `y(r)` on `[0, r)`, `map(y(rho))` on `[r, R]`.
    Tabulated { interface: f64, plateau: f64, table: ProfileTable, exponent: Option<f64> },
    M1 { dim: u32, radius: f64, g: f64 },
    Compact { m: f64, radius: f64, g: f64 },
    JumpM1 { plateau: f64, beta: f64, r: f64 },
}

/// A closed-form or ODE-defined exact solution on `[0, R]`.
#[derive(Debug, Clone)]
pub struct OracleSolution {
    pub kind: OracleKind,
    pub params: OracleParams,
    pub certificate: Certificate,
    profile: Profile,
}

impl OracleSolution {
    fn new(kind: OracleKind, params: OracleParams, certificate: Certificate, profile: Profile) -> Self {
        debug_assert!(certificate.holds);
        Self { kind, params, certificate, profile }
    }

    pub fn eval(&self, rho: f64) -> f64 {
        let rho = rho.clamp(0.0, self.params.radius);
        match &self.profile {
            Profile::Constant(c) => *c,
            Profile::Tabulated { interface, plateau, table, exponent } => {
                if rho < *interface {
                    *plateau
                } else {
                    let y = table.eval(rho);
                    match exponent {
                        Some(p) => y.max(0.0).powf(*p),
                        None => y,
                    }
                }
            }
            Profile::M1 { dim, radius, g } => {
                let n = *dim as f64;
                let x = rho.max(n);
                g * (radius / x).powf(n - 1.0) * (x - radius).exp()
            }
            Profile::Compact { m, radius, g } => {
                let base = g.powf(m - 1.0) + (1.0 - m) / m * (radius - rho);
                base.max(0.0).powf(1.0 / (m - 1.0))
            }
            Profile::JumpM1 { plateau, beta, r } => {
                if rho <= *r {
                    *plateau
                } else {
                    beta + (plateau - beta) * (r - rho).exp()
                }
            }
        }
    }

    /// Samples at the given radii.
    pub fn sample(&self, rhos: &[f64]) -> Vec<f64> {
        rhos.iter().map(|&r| self.eval(r)).collect()
    }

    /// Backing ODE table for tabulated profiles.
    pub fn table(&self) -> Option<&ProfileTable> {
        match &self.profile {
            Profile::Tabulated { table, .. } => Some(table),
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests;
