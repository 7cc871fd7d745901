use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::ProblemSpec;
use crate::solver::flux::FaceMobility;

/// Continuation schedule and nonlinear-solver tolerances.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    pub eps_init: f64,
    /// Ratio between successive `eps` levels, in `(0, 1)`.
    pub eps_factor: f64,
    pub eps_final: f64,
    /// Truncation level; `None` means `1 / (2 max(||f||, ||g||, 1))`.
    pub delta: Option<f64>,
    /// Bound on `max_i |r_i| / V_i` at convergence.
    pub newton_tol: f64,
    /// Budget of Newton plus pseudo-transient steps per `eps` level.
    pub newton_max_iter: usize,
    pub armijo_c: f64,
    pub lambda_min: f64,
    /// Initial pseudo-time step; `None` means `h^2`.
    pub ptc_tau_init: Option<f64>,
    pub ptc_growth: f64,
    pub ptc_shrink: f64,
    /// `None` means `1e-4 max(||f||, ||g||, 1)`.
    pub cauchy_tol: Option<f64>,
    pub face_mobility: FaceMobility,
    /// How many times a failed `eps` step may be split geometrically.
    pub max_step_splits: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            eps_init: 0.1,
            eps_factor: 0.5,
            eps_final: 1e-4,
            delta: None,
            newton_tol: 1e-9,
            newton_max_iter: 400,
            armijo_c: 1e-4,
            lambda_min: 2f64.powi(-20),
            ptc_tau_init: None,
            ptc_growth: 2.0,
            ptc_shrink: 4.0,
            cauchy_tol: None,
            face_mobility: FaceMobility::Max,
            max_step_splits: 8,
        }
    }
}

impl SolverConfig {
    pub fn with_eps_final(mut self, eps_final: f64) -> Self {
        self.eps_final = eps_final;
        if self.eps_init < eps_final {
            self.eps_init = eps_final;
        }
        self
    }

    pub fn delta_for(&self, spec: &ProblemSpec) -> f64 {
        self.delta.unwrap_or_else(|| 0.5 / spec.scale())
    }

    pub fn cauchy_tol_for(&self, spec: &ProblemSpec) -> f64 {
        self.cauchy_tol.unwrap_or_else(|| 1e-4 * spec.scale())
    }

    pub fn validate(&self, spec: &ProblemSpec) -> Result<()> {
        if !(self.eps_final > 0.0 && self.eps_final <= self.eps_init) {
            return Err(Error::Config(format!(
                "need 0 < eps_final <= eps_init, got eps_final = {}, eps_init = {}",
                self.eps_final, self.eps_init
            )));
        }
        if !(self.eps_factor > 0.0 && self.eps_factor < 1.0) {
            return Err(Error::Config(format!("eps_factor must lie in (0, 1), got {}", self.eps_factor)));
        }
        let delta = self.delta_for(spec);
        if !(delta > 0.0) || delta * spec.data_sup() >= 1.0 {
            return Err(Error::Config(format!(
                "truncation must stay inactive: need delta * max(||f||, ||g||) < 1, got delta = {delta}"
            )));
        }
        if !(self.newton_tol > 0.0) || self.newton_max_iter == 0 {
            return Err(Error::Config("newton_tol and newton_max_iter must be positive".into()));
        }
        if !(self.armijo_c > 0.0 && self.armijo_c < 0.5) {
            return Err(Error::Config(format!("armijo_c must lie in (0, 1/2), got {}", self.armijo_c)));
        }
        if !(self.lambda_min > 0.0 && self.lambda_min < 1.0) {
            return Err(Error::Config(format!("lambda_min must lie in (0, 1), got {}", self.lambda_min)));
        }
        if !(self.ptc_growth > 1.0 && self.ptc_shrink > 1.0) {
            return Err(Error::Config("pseudo-time growth and shrink factors must exceed 1".into()));
        }
        Ok(())
    }

    /// `eps_init * eps_factor^k`, clipped so the last entry is exactly `eps_final`.
    pub fn eps_schedule(&self) -> Vec<f64> {
        let mut out = Vec::new();
        let mut eps = self.eps_init;
        while eps > self.eps_final * (1.0 + 1e-12) {
            out.push(eps);
            eps *= self.eps_factor;
        }
        out.push(self.eps_final);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schedule_ends_at_final() {
        let c = SolverConfig { eps_init: 0.1, eps_factor: 0.1, eps_final: 1e-4, ..Default::default() };
        let s = c.eps_schedule();
        assert_eq!(s.len(), 4);
        assert_eq!(*s.last().unwrap(), 1e-4);
        assert!(s.windows(2).all(|w| w[0] > w[1]));
        let c = SolverConfig { eps_init: 1e-3, eps_final: 1e-3, ..Default::default() };
        assert_eq!(c.eps_schedule(), vec![1e-3]);
    }
}
