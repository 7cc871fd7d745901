use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::model::{build_grid, Grid, ProblemSpec};
use crate::oracles::OracleSolution;
use crate::solver::{continuation_solve, continuation_solve_from, Discretization, SolverConfig};

use super::checks::oracle_error;
use super::CheckReport;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub n: usize,
    pub eps: f64,
    pub h: f64,
    pub error: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceTable {
    pub rows: Vec<ConvergenceRow>,
}

impl ConvergenceTable {
    pub fn get(&self, n: usize, eps: f64) -> Option<&ConvergenceRow> {
        self.rows.iter().find(|r| r.n == n && r.eps == eps)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,eps,h,error,residual\n");
        for r in &self.rows {
            let _ = writeln!(out, "{},{:.16e},{:.16e},{:.16e},{:.16e}", r.n, r.eps, r.h, r.error, r.residual);
        }
        out
    }
}

/// Relative L-infinity error against `oracle` over every `(n, eps)` pair.
pub fn convergence_study(
    spec: &ProblemSpec,
    oracle: &OracleSolution,
    n_list: &[usize],
    eps_list: &[f64],
    config: &SolverConfig,
) -> Result<ConvergenceTable> {
    let mut rows = Vec::with_capacity(n_list.len() * eps_list.len());
    for &n in n_list {
        let grid = build_grid(&spec.domain, n)?;
        for &eps in eps_list {
            let cfg = config.clone().with_eps_final(eps);
            let bundle = continuation_solve(spec, &grid, &cfg)?;
            rows.push(ConvergenceRow {
                n,
                eps,
                h: grid.h,
                error: oracle_error(&bundle, oracle),
                residual: bundle.residual_norm,
            });
        }
    }
    Ok(ConvergenceTable { rows })
}

/// `max |J - J_fd| / max |J|` at `u`, with fourth-order central differences.
///
/// The flux varies on gradient scale `eps`, i.e. on `eps h` in `u`, so the
/// difference step is a small fraction of that.
pub fn jacobian_mismatch(disc: &Discretization<'_>, u: &[f64]) -> Result<f64> {
    let n = u.len();
    let (_, jac) = disc.linearize(u)?;
    let mut worst: f64 = 0.0;
    let mut scale: f64 = 0.0;
    let mut x = u.to_vec();
    let base = 2e-3 * (disc.reg.eps * disc.grid.h).min(1.0);
    for j in 0..n {
        let eta = base * u[j].abs().max(1.0);
        let mut eval = |t: f64| -> Result<Vec<f64>> {
            x[j] = u[j] + t;
            let r = disc.residual(&x);
            x[j] = u[j];
            r
        };
        let (p2, p1, m1, m2) = (eval(2.0 * eta)?, eval(eta)?, eval(-eta)?, eval(-2.0 * eta)?);
        for i in j.saturating_sub(2)..(j + 3).min(n) {
            let fd = (-p2[i] + 8.0 * p1[i] - 8.0 * m1[i] + m2[i]) / (12.0 * eta);
            let exact = jac.get(i, j);
            worst = worst.max((fd - exact).abs());
            scale = scale.max(exact.abs());
        }
    }
    Ok(worst / scale.max(f64::MIN_POSITIVE))
}

/// Solves from the default guess and from a seeded random one; the two
/// must agree in `L1` within `2 * 20 newton_tol sum V`.
pub fn check_uniqueness(spec: &ProblemSpec, grid: &Grid, config: &SolverConfig, seed: u64) -> Result<CheckReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let hi = spec.data_sup().max(0.5);
    let lo = if spec.mobility.is_singular() { 0.1 * hi } else { 0.0 };
    let init: Vec<f64> = (0..grid.n).map(|_| rng.gen_range(lo..=hi)).collect();
    let a = continuation_solve(spec, grid, config)?;
    let b = continuation_solve_from(spec, grid, config, Some(&init))?;
    let d: Vec<f64> = a.u.values().iter().zip(b.u.values()).map(|(x, y)| (x - y).abs()).collect();
    let tol = 2.0 * 20.0 * config.newton_tol * grid.total_volume();
    Ok(CheckReport::at_most("uniqueness", grid.integrate(&d), 0.0, tol, "uniqueness implied by L1 contraction"))
}
