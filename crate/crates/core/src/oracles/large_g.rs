//! Behaviour of `u_G(0)` as the Dirichlet datum grows.

use serde::{Deserialize, Serialize};

use super::{barrier_profile, constant_solution, m1_profile, sublinear_profile, superlinear_constant};
use crate::error::{Error, Result};
use crate::model::{build_grid, BoundarySpec, DomainSpec, MobilityLaw, ProblemSpec, SourceField};
use crate::solver::{continuation_solve, SolverConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GRegime {
    /// `m >= 1`: blow-up in the whole domain.
    Diverging,
    /// `m < 0`: bounded by the flat constant `U`.
    SaturatingConstant,
    /// `0 < m < 1`: bounded by the barrier value `u_bar(0)`.
    SaturatingBarrier,
}

/// Where `u_G(0)` comes from.
#[derive(Debug, Clone, Copy)]
pub enum GSource<'a> {
    Oracle,
    Solver { n: usize, config: &'a SolverConfig },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GSample {
    pub g: f64,
    pub u0: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LargeGReport {
    pub m: f64,
    pub f: f64,
    pub dim: u32,
    pub radius: f64,
    pub regime: GRegime,
    pub samples: Vec<GSample>,
    /// `lim u_G(0)`, absent when it is infinite.
    pub predicted_limit: Option<f64>,
}

fn oracle_u0(m: f64, f: f64, dim: u32, radius: f64, g: f64) -> Result<f64> {
    if m == 1.0 {
        if f != 0.0 {
            return Err(Error::Validity("m = 1 oracle needs F = 0".into()));
        }
        Ok(m1_profile(dim, radius, g)?.eval(0.0))
    } else if m > 1.0 {
        if f != 0.0 {
            return Err(Error::Validity("m > 1 oracle needs F = 0".into()));
        }
        Ok(superlinear_constant(m, dim, radius, g)?.eval(0.0))
    } else if m < 0.0 {
        let u = constant_solution(m, f, dim, radius)?;
        if g < u {
            return Err(Error::Validity(format!("m < 0 oracle needs G >= U = {u}, got {g}")));
        }
        Ok(u)
    } else {
        Ok(sublinear_profile(m, f, dim, radius, g)?.eval(0.0))
    }
}

fn solver_u0(m: f64, f: f64, dim: u32, radius: f64, g: f64, n: usize, config: &SolverConfig) -> Result<f64> {
    let domain = DomainSpec::ball(dim, radius)?;
    let spec = ProblemSpec::new(MobilityLaw::power(m)?, domain, SourceField::Constant(f), BoundarySpec::dirichlet(g))?;
    let grid = build_grid(&domain, n)?;
    Ok(continuation_solve(&spec, &grid, config)?.u[0])
}

/// Samples `u_G(0)` along an increasing sequence of data and attaches the
/// limit predicted for the mobility regime.
pub fn large_g_classify(
    m: f64,
    f: f64,
    dim: u32,
    radius: f64,
    gs: &[f64],
    source: GSource<'_>,
) -> Result<LargeGReport> {
    if m == 0.0 || !m.is_finite() {
        return Err(Error::Domain(format!("large-G classification needs a finite m != 0, got {m}")));
    }
    if gs.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::Config("G sequence must be strictly increasing".into()));
    }
    let (regime, predicted_limit) = if m >= 1.0 {
        (GRegime::Diverging, None)
    } else if m < 0.0 {
        (GRegime::SaturatingConstant, Some(constant_solution(m, f, dim, radius)?))
    } else {
        (GRegime::SaturatingBarrier, Some(barrier_profile(m, f, dim, radius)?.eval(0.0)))
    };
    let samples = gs
        .iter()
        .map(|&g| {
            let u0 = match source {
                GSource::Oracle => oracle_u0(m, f, dim, radius, g)?,
                GSource::Solver { n, config } => solver_u0(m, f, dim, radius, g, n, config)?,
            };
            Ok(GSample { g, u0 })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(LargeGReport { m, f, dim, radius, regime, samples, predicted_limit })
}
