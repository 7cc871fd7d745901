//! Warm-started `eps -> eps_final` continuation and boundary traces.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{mobility_eval, BoundarySpec, Field, Grid, ProblemSpec};
use crate::solver::assembly::Discretization;
use crate::solver::config::SolverConfig;
use crate::solver::flux::{FaceMobility, Regularization};
use crate::solver::newton::newton_solve;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpsStep {
    pub eps: f64,
    pub iterations: usize,
    pub ptc_steps: usize,
    pub residual: f64,
    /// `||u_eps - u_prev||_inf` against the previous accepted level.
    pub cauchy: Option<f64>,
}

/// Converged solution at `eps_final` plus per-level diagnostics.
#[derive(Debug, Clone)]
pub struct SolutionBundle {
    pub grid: Grid,
    pub f: Field,
    pub u: Field,
    /// `n + 1` face fluxes at `eps_final`, inner face first.
    pub z_faces: Vec<f64>,
    pub w_faces: Vec<f64>,
    /// Flux through the outer face, the discrete normal trace `[z, nu]`.
    pub trace_outer: f64,
    pub residual_norm: f64,
    pub eps_history: Vec<EpsStep>,
    pub eps_final: f64,
    pub delta: f64,
    pub newton_tol: f64,
    pub face_mobility: FaceMobility,
    /// Last two Cauchy increments below the tolerance.
    pub eps_converged: bool,
}

/// `clamp(f, min{f, g}, max{f, g})`.
pub fn initial_guess(spec: &ProblemSpec, f: &Field) -> Vec<f64> {
    let (mut lo, mut hi) = (f.min(), f.max());
    if let BoundarySpec::Dirichlet { outer, inner } = spec.boundary {
        for g in std::iter::once(outer).chain(inner) {
            lo = lo.min(g);
            hi = hi.max(g);
        }
    }
    f.values().iter().map(|v| v.clamp(lo, hi)).collect()
}

pub fn continuation_solve(spec: &ProblemSpec, grid: &Grid, config: &SolverConfig) -> Result<SolutionBundle> {
    continuation_solve_from(spec, grid, config, None)
}

/// As [`continuation_solve`], optionally overriding the initial guess.
pub fn continuation_solve_from(
    spec: &ProblemSpec,
    grid: &Grid,
    config: &SolverConfig,
    init: Option<&[f64]>,
) -> Result<SolutionBundle> {
    spec.validate()?;
    config.validate(spec)?;
    let delta = config.delta_for(spec);
    let reg_at = |eps| Regularization { eps, delta, face_mobility: config.face_mobility };
    let schedule = config.eps_schedule();

    let first = Discretization::new(spec, grid, reg_at(schedule[0]))?;
    let mut u = match init {
        Some(u0) => Field::new(grid, u0.to_vec())?.into_values(),
        None => initial_guess(spec, &first.source),
    };
    let mut history: Vec<EpsStep> = Vec::new();
    let mut prev_eps: Option<f64> = None;

    for &target in &schedule {
        let mut splits = 0;
        let mut eps = target;
        loop {
            let disc = Discretization::new(spec, grid, reg_at(eps))?;
            match newton_solve(&disc, config, &u) {
                Ok(out) => {
                    let cauchy = prev_eps.map(|_| {
                        out.u.iter().zip(&u).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
                    });
                    history.push(EpsStep {
                        eps,
                        iterations: out.iterations,
                        ptc_steps: out.ptc_steps,
                        residual: out.residual_norm,
                        cauchy,
                    });
                    u = out.u;
                    prev_eps = Some(eps);
                    if eps == target {
                        break;
                    }
                    eps = target;
                    splits = 0;
                }
                Err(err @ Error::NonConvergence { .. }) => {
                    let Some(from) = prev_eps else { return Err(err) };
                    if splits >= config.max_step_splits {
                        return Err(err);
                    }
                    splits += 1;
                    eps = (from * eps).sqrt();
                }
                Err(e) => return Err(e),
            }
        }
    }

    let eps_final = *schedule.last().expect("schedule is never empty");
    let disc = Discretization::new(spec, grid, reg_at(eps_final))?;
    let fluxes = disc.face_fluxes(&u)?;
    let residual_norm = disc.scaled_norm(&disc.residual(&u)?);
    let cauchy_tol = config.cauchy_tol_for(spec);
    let tail: Vec<f64> = history.iter().rev().take(2).filter_map(|s| s.cauchy).collect();
    let eps_converged = tail.len() == 2 && tail.iter().all(|&c| c < cauchy_tol);

    Ok(SolutionBundle {
        grid: grid.clone(),
        f: disc.source.clone(),
        u: Field::new(grid, u)?,
        z_faces: fluxes.iter().map(|f| f.z).collect(),
        w_faces: fluxes.iter().map(|f| f.w).collect(),
        trace_outer: fluxes[grid.n].z,
        residual_norm,
        eps_history: history,
        eps_final,
        delta,
        newton_tol: config.newton_tol,
        face_mobility: config.face_mobility,
        eps_converged,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Traces {
    /// Interior profile extrapolated linearly to `rho = R`.
    pub u_boundary: f64,
    /// Normal flux `[z, nu]` at `rho = R` without the `eps Du` viscosity.
    pub z_nu: f64,
    /// Director `w` on the outer face.
    pub w_nu: f64,
    /// `phi'(u_boundary)`.
    pub mobility: f64,
}

/// Boundary values at `rho = R`.
///
/// `u_boundary` comes from the last two interior cells, not from the datum,
/// so a relaxed (unattained) boundary condition is visible.
pub fn extract_traces(bundle: &SolutionBundle, spec: &ProblemSpec) -> Result<Traces> {
    let u = bundle.u.values();
    let n = u.len();
    let u_boundary = 1.5 * u[n - 1] - 0.5 * u[n - 2];
    let slope = match spec.boundary {
        BoundarySpec::Dirichlet { outer, .. } => (outer - u[n - 1]) / (0.5 * bundle.grid.h),
        BoundarySpec::NeumannZero => 0.0,
    };
    let z_nu = bundle.trace_outer - bundle.eps_final * slope;
    if spec.mobility.is_singular() && u_boundary <= 0.0 {
        return Err(Error::SingularMobility(u_boundary));
    }
    let mobility = mobility_eval(&spec.mobility, u_boundary.max(0.0), 0.0)?;
    Ok(Traces { u_boundary, z_nu, w_nu: bundle.w_faces[n], mobility })
}
