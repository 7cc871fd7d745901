//! Discrete regularized problem and the continuation driver.

pub mod assembly;
pub mod config;
pub mod continuation;
pub mod flux;
pub mod newton;

pub use assembly::{assemble_residual, Discretization};
pub use config::SolverConfig;
pub use continuation::{
    continuation_solve, continuation_solve_from, extract_traces, initial_guess, EpsStep, SolutionBundle, Traces,
};
pub use flux::{face_flux, face_flux_jac, FaceFlux, FaceMobility, Regularization};
pub use newton::{newton_solve, NewtonOutcome, NewtonState, StepMode};

use crate::error::Result;
use crate::model::{Field, Grid, ProblemSpec};

/// Solves the regularized problem at a single `eps` from `init`.
pub fn solve_regularized(
    spec: &ProblemSpec,
    grid: &Grid,
    eps: f64,
    delta: f64,
    config: &SolverConfig,
    init: &Field,
) -> Result<Field> {
    let reg = Regularization { eps, delta, face_mobility: config.face_mobility };
    let disc = Discretization::new(spec, grid, reg)?;
    let out = newton_solve(&disc, config, init.values())?;
    Field::new(grid, out.u)
}
