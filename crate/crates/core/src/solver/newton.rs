//! Damped Newton with a pseudo-transient fallback for one `eps` level.

use crate::error::{Error, Result};
use crate::solver::assembly::Discretization;
use crate::solver::config::SolverConfig;
use crate::tridiag::Tridiagonal;

/// Pseudo-time beyond which the `V/tau` shift is negligible and plain
/// Newton takes over again.
const TAU_RELEASE: f64 = 1e4;
const TAU_FLOOR: f64 = 1e-300;
/// Multiple of the rounding noise of the residual accepted as converged.
const NOISE_FACTOR: f64 = 16.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepMode {
    Newton,
    /// Pseudo-transient continuation with time step `tau`.
    PseudoTransient { tau: f64 },
}

/// Iterate bookkeeping between steps.
#[derive(Debug, Clone)]
pub struct NewtonState {
    pub u: Vec<f64>,
    pub residual: Vec<f64>,
    /// Scaled residual norm of `residual`.
    pub norm: f64,
    /// Damping of the last accepted Newton step.
    pub lambda: f64,
    pub mode: StepMode,
}

#[derive(Debug, Clone)]
pub struct NewtonOutcome {
    pub u: Vec<f64>,
    pub residual_norm: f64,
    pub iterations: usize,
    pub ptc_steps: usize,
}

/// Rounding noise of each residual entry at `u`: the change caused by
/// perturbing every `u_j` by one ulp, plus the rounding of the terms.
pub fn residual_noise(disc: &Discretization<'_>, u: &[f64], jac: &Tridiagonal) -> Vec<f64> {
    let n = u.len();
    let f = disc.source.values();
    (0..n)
        .map(|i| {
            let mut acc = (jac.diag[i] * u[i]).abs() + (disc.grid.volumes[i] * f[i]).abs();
            if i > 0 {
                acc += (jac.lower[i - 1] * u[i - 1]).abs();
            }
            if i + 1 < n {
                acc += (jac.upper[i] * u[i + 1]).abs();
            }
            f64::EPSILON * acc
        })
        .collect()
}

/// Per-cell acceptance scale `max(tol V_i, k noise_i)`.
fn cell_scales(disc: &Discretization<'_>, u: &[f64], jac: &Tridiagonal, tol: f64) -> Vec<f64> {
    residual_noise(disc, u, jac)
        .iter()
        .zip(&disc.grid.volumes)
        .map(|(ni, v)| (tol * v).max(NOISE_FACTOR * ni))
        .collect()
}

/// Weighted merit `sum (r_i / scale_i)^2`; below one per cell means converged.
fn merit(r: &[f64], scales: &[f64]) -> f64 {
    r.iter().zip(scales).map(|(ri, si)| (ri / si).powi(2)).sum()
}

fn converged(r: &[f64], scales: &[f64]) -> bool {
    r.iter().zip(scales).all(|(ri, si)| ri.abs() <= *si)
}

fn trial(disc: &Discretization<'_>, u: &[f64], dir: &[f64], lambda: f64) -> Option<(Vec<f64>, Vec<f64>)> {
    let cand: Vec<f64> = u.iter().zip(dir).map(|(a, d)| a + lambda * d).collect();
    match disc.residual(&cand) {
        Ok(r) => Some((cand, r)),
        Err(_) => None,
    }
}

/// Solves the discrete regularized problem from `init`.
pub fn newton_solve(disc: &Discretization<'_>, config: &SolverConfig, init: &[f64]) -> Result<NewtonOutcome> {
    let r0 = disc.residual(init)?;
    let mut state = NewtonState {
        norm: disc.scaled_norm(&r0),
        u: init.to_vec(),
        residual: r0,
        lambda: 1.0,
        mode: StepMode::Newton,
    };
    let tau_init = config.ptc_tau_init.unwrap_or(disc.grid.h * disc.grid.h);
    let mut history = vec![state.norm];
    let mut best = (state.norm, state.u.clone());
    let mut ptc_steps = 0;

    for it in 0..=config.newton_max_iter {
        let (_, mut jac) = disc.linearize(&state.u)?;
        let scales = cell_scales(disc, &state.u, &jac, config.newton_tol);
        if state.norm <= config.newton_tol || converged(&state.residual, &scales) {
            return Ok(NewtonOutcome {
                u: state.u,
                residual_norm: state.norm,
                iterations: it,
                ptc_steps,
            });
        }
        if it == config.newton_max_iter {
            break;
        }
        let phi = merit(&state.residual, &scales);
        match state.mode {
            StepMode::Newton => {
                let neg: Vec<f64> = state.residual.iter().map(|v| -v).collect();
                let accepted = match jac.solve(&neg) {
                    Ok(dir) => {
                        let mut lambda = 1.0;
                        let mut found = None;
                        while lambda >= config.lambda_min {
                            if let Some((u, r)) = trial(disc, &state.u, &dir, lambda) {
                                // d phi/d lambda = -2 phi along the Newton direction
                                if merit(&r, &scales) <= (1.0 - 2.0 * config.armijo_c * lambda) * phi {
                                    found = Some((u, r));
                                    break;
                                }
                            }
                            lambda *= 0.5;
                        }
                        found.map(|f| (f, lambda))
                    }
                    Err(_) => None,
                };
                match accepted {
                    Some(((u, r), lambda)) => {
                        state.norm = disc.scaled_norm(&r);
                        state.u = u;
                        state.residual = r;
                        state.lambda = lambda;
                    }
                    None => {
                        state.mode = StepMode::PseudoTransient { tau: tau_init };
                    }
                }
            }
            StepMode::PseudoTransient { tau } => {
                ptc_steps += 1;
                for (d, v) in jac.diag.iter_mut().zip(&disc.grid.volumes) {
                    *d += v / tau;
                }
                let neg: Vec<f64> = state.residual.iter().map(|v| -v).collect();
                let step = jac
                    .solve(&neg)
                    .ok()
                    .and_then(|dir| trial(disc, &state.u, &dir, 1.0))
                    .filter(|(_, r)| merit(r, &scales) < phi);
                match step {
                    Some((u, r)) => {
                        state.norm = disc.scaled_norm(&r);
                        state.u = u;
                        state.residual = r;
                        let tau = tau * config.ptc_growth;
                        state.mode = if tau >= TAU_RELEASE {
                            StepMode::Newton
                        } else {
                            StepMode::PseudoTransient { tau }
                        };
                    }
                    None => {
                        let tau = tau / config.ptc_shrink;
                        if tau < TAU_FLOOR {
                            break;
                        }
                        state.mode = StepMode::PseudoTransient { tau };
                    }
                }
            }
        }
        history.push(state.norm);
        if state.norm < best.0 {
            best = (state.norm, state.u.clone());
        }
    }
    Err(Error::NonConvergence {
        eps: disc.reg.eps,
        iterations: history.len() - 1,
        best_residual: best.0,
        best_iterate: best.1,
        residual_history: history,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_grid, BoundarySpec, DomainSpec, MobilityLaw, ProblemSpec, SourceField};
    use crate::solver::flux::{FaceMobility, Regularization};

    #[test]
    fn constant_data_is_a_fixed_point() {
        for m in [-1.0, 0.5, 1.0, 2.0] {
            let spec = ProblemSpec::new(
                MobilityLaw::power(m).unwrap(),
                DomainSpec::ball(2, 1.0).unwrap(),
                SourceField::Constant(1.3),
                BoundarySpec::dirichlet(1.3),
            )
            .unwrap();
            let grid = build_grid(&spec.domain, 32).unwrap();
            let reg = Regularization { eps: 1e-3, delta: 0.1, face_mobility: FaceMobility::Max };
            let disc = Discretization::new(&spec, &grid, reg).unwrap();
            let out = newton_solve(&disc, &SolverConfig::default(), &[1.3; 32]).unwrap();
            assert_eq!(out.iterations, 0);
            assert!(out.u.iter().all(|&v| v == 1.3));
        }
    }

    #[test]
    fn converges_from_a_poor_guess() {
        let spec = ProblemSpec::new(
            MobilityLaw::power(1.0).unwrap(),
            DomainSpec::ball(1, 2.0).unwrap(),
            SourceField::Constant(0.0),
            BoundarySpec::dirichlet(1.0),
        )
        .unwrap();
        let grid = build_grid(&spec.domain, 64).unwrap();
        let reg = Regularization { eps: 0.05, delta: 0.5, face_mobility: FaceMobility::Max };
        let disc = Discretization::new(&spec, &grid, reg).unwrap();
        let cfg = SolverConfig::default();
        let out = newton_solve(&disc, &cfg, &[0.0; 64]).unwrap();
        assert!(out.residual_norm <= cfg.newton_tol);
        assert!(out.u.iter().all(|&v| v > 0.0 && v < 1.0));
    }

    #[test]
    fn budget_exhaustion_reports_best_iterate() {
        let spec = ProblemSpec::new(
            MobilityLaw::power(1.0).unwrap(),
            DomainSpec::ball(1, 2.0).unwrap(),
            SourceField::Constant(0.0),
            BoundarySpec::dirichlet(1.0),
        )
        .unwrap();
        let grid = build_grid(&spec.domain, 64).unwrap();
        let reg = Regularization { eps: 1e-6, delta: 0.5, face_mobility: FaceMobility::Max };
        let disc = Discretization::new(&spec, &grid, reg).unwrap();
        let cfg = SolverConfig { newton_max_iter: 1, ..Default::default() };
        match newton_solve(&disc, &cfg, &[0.0; 64]) {
            Err(Error::NonConvergence { best_iterate, residual_history, .. }) => {
                assert_eq!(best_iterate.len(), 64);
                assert!(!residual_history.is_empty());
            }
            other => panic!("expected non-convergence, got {other:?}"),
        }
    }
}
