use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::model::{build_grid, BoundarySpec, Grid, MobilityLaw, ProblemSpec, SourceField};
use crate::oracles::{eps_lower_bound, jump_constant_example, OracleKind, OracleSolution};
use crate::solver::{continuation_solve, extract_traces, SolutionBundle, SolverConfig};

use super::{CheckReport, CheckStatus};

const MAX_PRINCIPLE: &str = "L-infinity bound max(|f|, |g|) and nonnegativity of regularized solutions";
const LOWER_BOUND: &str = "a priori lower bound alpha for m < 0 from the subsolution eps|x|^2/2 + alpha";
const CONTRACTION: &str = "L1 contraction: integral of (u1-u2)+ <= integral of (f1-f2)+ for ordered data";
const NEUMANN_MASS: &str = "zero normal flux with Gauss-Green: integral of (u - f) = 0";
const COMPLEMENTARITY: &str = "obstacle-type Dirichlet condition: datum attained or extremal normal trace";
const ORACLE: &str = "explicit radial solution";
const JUMP: &str = "solutions do not jump in the bulk even where f does";

/// Slack for bounds that hold exactly for the converged discrete problem.
fn solve_tol(bundle: &SolutionBundle) -> f64 {
    10.0 * bundle.newton_tol
}

/// `-tol <= u <= max(|f|, |g|) + tol`.
pub fn check_max_principle(bundle: &SolutionBundle, spec: &ProblemSpec) -> CheckReport {
    let tol = solve_tol(bundle);
    let bound = spec.data_sup();
    let mut report = CheckReport::at_most("max_principle", bundle.u.max(), bound, tol, MAX_PRINCIPLE);
    let min = bundle.u.min();
    if min < -tol {
        report.status = CheckStatus::Fail;
        report = report.with_note(format!("min u = {min:.6e} is negative"));
    }
    report
}

/// `min u >= alpha` for `m < 0`, when the solve reached `eps < eps0`.
pub fn check_lower_bound(bundle: &SolutionBundle, spec: &ProblemSpec) -> CheckReport {
    let name = "lower_bound";
    let m = match spec.mobility {
        MobilityLaw::Power { m } if m < 0.0 => m,
        _ => return CheckReport::not_applicable(name, "needs a power mobility with m < 0", LOWER_BOUND),
    };
    let Some(g0) = spec.boundary.inf() else {
        return CheckReport::not_applicable(name, "needs Dirichlet data", LOWER_BOUND);
    };
    let lb = match eps_lower_bound(m, g0, spec.domain.radius) {
        Ok(lb) => lb,
        Err(e) => return CheckReport::errored(name, &e, LOWER_BOUND),
    };
    if bundle.eps_final >= lb.eps0 {
        return CheckReport::skipped(
            name,
            format!("precondition unmet: eps = {:.3e} >= eps0 = {:.6e}", bundle.eps_final, lb.eps0),
            LOWER_BOUND,
        );
    }
    CheckReport::at_least(name, bundle.u.min(), lb.alpha, solve_tol(bundle), LOWER_BOUND)
        .with_note(format!("eps0 = {:.6e}", lb.eps0))
}

/// `sum (u1-u2)+ V <= sum (f1-f2)+ V + 20 newton_tol sum V`.
pub fn contraction_report(b1: &SolutionBundle, b2: &SolutionBundle) -> CheckReport {
    let grid = &b1.grid;
    let pos = |a: &[f64], b: &[f64]| {
        let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| (x - y).max(0.0)).collect();
        grid.integrate(&d)
    };
    let lhs = pos(b1.u.values(), b2.u.values());
    let rhs = pos(b1.f.values(), b2.f.values());
    let tol = 20.0 * b1.newton_tol.max(b2.newton_tol) * grid.total_volume();
    CheckReport::at_most("contraction", lhs, rhs, tol, CONTRACTION)
}

fn same_problem_class(s1: &ProblemSpec, s2: &ProblemSpec) -> Result<()> {
    let kind = |s: &ProblemSpec| (s.mobility.exponent(), s.domain, s.boundary.is_dirichlet());
    if kind(s1) != kind(s2) || s1.mobility.exponent().is_none() {
        return Err(Error::Config("contraction needs the same power mobility, domain and boundary kind".into()));
    }
    if let (BoundarySpec::Dirichlet { outer: g1, inner: i1 }, BoundarySpec::Dirichlet { outer: g2, inner: i2 }) =
        (s1.boundary, s2.boundary)
    {
        let inner_ok = match (i1, i2) {
            (Some(a), Some(b)) => a <= b,
            (None, None) => true,
            _ => false,
        };
        if g1 > g2 || !inner_ok {
            return Err(Error::Config(format!("contraction needs g1 <= g2, got {g1} > {g2}")));
        }
    }
    Ok(())
}

pub fn check_contraction(
    spec1: &ProblemSpec,
    spec2: &ProblemSpec,
    grid: &Grid,
    config: &SolverConfig,
) -> Result<CheckReport> {
    same_problem_class(spec1, spec2)?;
    let b1 = continuation_solve(spec1, grid, config)?;
    let b2 = continuation_solve(spec2, grid, config)?;
    Ok(contraction_report(&b1, &b2))
}

/// `|sum (u - f) V| <= 10 newton_tol sum V` for the Neumann problem.
pub fn check_neumann_mass(bundle: &SolutionBundle, spec: &ProblemSpec) -> CheckReport {
    let name = "neumann_mass";
    if spec.boundary.is_dirichlet() {
        return CheckReport::not_applicable(name, "Dirichlet problem", NEUMANN_MASS);
    }
    let d: Vec<f64> = bundle.u.values().iter().zip(bundle.f.values()).map(|(u, f)| u - f).collect();
    let defect = bundle.grid.integrate(&d).abs();
    CheckReport::at_most(name, defect, 0.0, solve_tol(bundle) * bundle.grid.total_volume(), NEUMANN_MASS)
}

/// Trace tolerances `c sqrt(eps_final)`, scaled by the data (`u`), by one
/// (`w`) or by the boundary mobility (`z`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplementarityTol {
    pub c: f64,
}

impl Default for ComplementarityTol {
    fn default() -> Self {
        Self { c: 5.0 }
    }
}

/// Dirichlet condition in relaxed form. For `m < 0`: `u_b <= g` and either
/// `u_b = g` or `w_nu = 1`. For `m > 0`: `u_b >= g` and either `u_b = g` or
/// `z_nu = -phi'(u_b)`.
pub fn check_boundary_complementarity(
    bundle: &SolutionBundle,
    spec: &ProblemSpec,
    tol: ComplementarityTol,
) -> CheckReport {
    let name = "boundary_complementarity";
    let BoundarySpec::Dirichlet { outer: g, .. } = spec.boundary else {
        return CheckReport::not_applicable(name, "Neumann problem", COMPLEMENTARITY);
    };
    let traces = match extract_traces(bundle, spec) {
        Ok(t) => t,
        Err(e) => return CheckReport::errored(name, &e, COMPLEMENTARITY),
    };
    let root = bundle.eps_final.sqrt();
    let tol_b = tol.c * root * spec.scale();
    let gap = (traces.u_boundary - g).abs();
    let decreasing = spec.mobility.is_singular();
    // one-sided condition, then the complementary alternative
    let (side, alt, tol_alt, what) = if decreasing {
        (traces.u_boundary - g, (traces.w_nu - 1.0).abs(), tol.c * root, "|w_nu - 1|")
    } else {
        (
            g - traces.u_boundary,
            (traces.z_nu + traces.mobility).abs(),
            tol.c * root * traces.mobility.max(1.0),
            "|z_nu + phi'(u_b)|",
        )
    };
    let attained = gap <= tol_b;
    let ok = side <= tol_b && (attained || alt <= tol_alt);
    let (measured, bound, tolerance) = if attained { (gap, 0.0, tol_b) } else { (alt, 0.0, tol_alt) };
    let mut report = CheckReport::at_most(name, measured, bound, tolerance, COMPLEMENTARITY).with_note(format!(
        "u_b = {:.6e}, g = {g}, w_nu = {:.6e}, z_nu = {:.6e}; {}; tolerances {} sqrt(eps)",
        traces.u_boundary,
        traces.w_nu,
        traces.z_nu,
        if attained { "datum attained".to_string() } else { format!("datum relaxed, measured {what}") },
        tol.c,
    ));
    report.status = if ok { CheckStatus::Pass } else { CheckStatus::Fail };
    report
}

/// `max |u_i - o(rho_i)| / max |o(rho_i)|` over cell centers.
pub fn oracle_error(bundle: &SolutionBundle, oracle: &OracleSolution) -> f64 {
    let exact = oracle.sample(&bundle.grid.centers);
    let num = bundle.u.values().iter().zip(&exact).map(|(u, o)| (u - o).abs()).fold(0.0, f64::max);
    let den = exact.iter().fold(0.0, |a: f64, o| a.max(o.abs()));
    num / den.max(f64::MIN_POSITIVE)
}

/// `5 h/R + 5 sqrt(eps_final) scale`.
pub fn default_match_tol(grid: &Grid, eps_final: f64, scale: f64) -> f64 {
    5.0 * grid.h / grid.radius + 5.0 * eps_final.sqrt() * scale
}

/// Relative error within `tol`; for compact support also the support edge
/// within three cells.
pub fn oracle_match_report(bundle: &SolutionBundle, oracle: &OracleSolution, tol: f64) -> CheckReport {
    let mut report = CheckReport::at_most("oracle_match", oracle_error(bundle, oracle), 0.0, tol, ORACLE);
    let mut note = format!("{:?}: {}", oracle.kind, oracle.certificate.hypothesis);
    if oracle.kind == OracleKind::CompactSupport {
        let expected = oracle.params.interface.unwrap_or(0.0);
        let found = support_edge(bundle, oracle.params.m);
        let off = found.map_or(f64::INFINITY, |r| (r - expected).abs());
        if off > 3.0 * bundle.grid.h {
            report.status = CheckStatus::Fail;
        }
        let _ = write!(note, "; support edge {found:?} vs {expected}");
    }
    report.with_note(note)
}

/// Radius of the first face beyond which `|u_i - u_0|` exceeds `threshold`:
/// the edge of a flat core or of the support.
pub fn locate_edge(bundle: &SolutionBundle, threshold: f64) -> Option<f64> {
    let u = bundle.u.values();
    let i = u.iter().position(|&v| (v - u[0]).abs() > threshold)?;
    Some(bundle.grid.faces[i])
}

/// Edge of the support for `m > 1`, from a least-squares line through the
/// pressure `u^{m-1}` on cells where `u >= 0.2 max u`, extrapolated to zero.
/// The pressure is affine near the edge, while `u` itself carries an
/// `O(sqrt(eps))` viscous tail that any threshold would pick up.
pub fn support_edge(bundle: &SolutionBundle, m: f64) -> Option<f64> {
    let u = bundle.u.values();
    let top = bundle.u.max();
    if !(m > 1.0 && top > 0.0) {
        return None;
    }
    let pts: Vec<(f64, f64)> = u
        .iter()
        .zip(&bundle.grid.centers)
        .filter(|(&v, _)| v >= 0.2 * top)
        .map(|(&v, &r)| (r, v.powf(m - 1.0)))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let k = pts.len() as f64;
    let (sx, sy) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    let (mx, my) = (sx / k, sy / k);
    let (sxy, sxx) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + (x - mx) * (y - my), b + (x - mx) * (x - mx)));
    let slope = sxy / sxx;
    (slope > 0.0).then(|| mx - my / slope)
}

pub fn check_oracle_match(
    spec: &ProblemSpec,
    oracle: &OracleSolution,
    grid: &Grid,
    config: &SolverConfig,
) -> Result<CheckReport> {
    if !oracle.certificate.holds {
        return Err(Error::Validity(format!("oracle certificate fails: {}", oracle.certificate.hypothesis)));
    }
    let bundle = continuation_solve(spec, grid, config)?;
    let tol = default_match_tol(grid, bundle.eps_final, spec.scale());
    Ok(oracle_match_report(&bundle, oracle, tol))
}

/// `max_i |u_{i+1} - u_i|`.
pub fn max_increment(u: &[f64]) -> f64 {
    u.windows(2).map(|w| (w[1] - w[0]).abs()).fold(0.0, f64::max)
}

/// Decay of the maximal increment over successively doubled grids; a jump
/// would keep it constant. Increments below `floor` count as resolved.
pub fn jump_report(increments: &[f64], floor: f64) -> CheckReport {
    let ratio = increments
        .windows(2)
        .map(|w| if w[1] <= floor { f64::INFINITY } else { w[0] / w[1] })
        .fold(f64::INFINITY, f64::min);
    CheckReport::at_least("jump_diffusion", ratio, 1.5, 0.0, JUMP)
        .with_note(format!(
            "max increments [{}]",
            increments.iter().map(|d| format!("{d:.3e}")).collect::<Vec<_>>().join(", ")
        ))
}

/// Solves on `n`, `2n` and `4n` cells and checks that the largest jump
/// between neighbouring cells decays. When the data are those of the flat
/// two-level example, additionally checks `||u - beta|| <= 1% beta`.
pub fn check_jump_diffusion(spec: &ProblemSpec, n: usize, config: &SolverConfig) -> Result<CheckReport> {
    let SourceField::PiecewiseConstant { values, .. } = &spec.source else {
        return Err(Error::Config("jump diffusion needs a piecewise-constant source".into()));
    };
    if values.windows(2).all(|w| w[0] == w[1]) {
        return Err(Error::Config("jump diffusion needs a source with an interior jump".into()));
    }
    let bundles = (0..3)
        .map(|k| {
            let grid = build_grid(&spec.domain, n << k)?;
            continuation_solve(spec, &grid, config)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(jump_diffusion_report(&bundles, spec))
}

/// [`check_jump_diffusion`] on precomputed solves over nested grids,
/// coarsest first.
pub fn jump_diffusion_report(bundles: &[SolutionBundle], spec: &ProblemSpec) -> CheckReport {
    let increments: Vec<f64> = bundles.iter().map(|b| max_increment(b.u.values())).collect();
    let mut report = jump_report(&increments, 1e-9 * spec.scale());
    if let (Some(beta), Some(bundle)) = (flat_jump_level(spec), bundles.last()) {
        let dev = bundle.u.values().iter().map(|u| (u - beta).abs()).fold(0.0, f64::max);
        if dev > 0.01 * beta {
            report.status = CheckStatus::Fail;
        }
        let note = report.note.take().unwrap_or_default();
        report = report.with_note(format!("{note}; ||u - beta|| = {dev:.3e} vs 1% of beta = {beta}"));
    }
    report
}

/// `beta` when `spec` carries data for which `u = beta` is the exact solution.
fn flat_jump_level(spec: &ProblemSpec) -> Option<f64> {
    let SourceField::PiecewiseConstant { breakpoints, values } = &spec.source else { return None };
    let (&[r], &[alpha, beta]) = (breakpoints.as_slice(), values.as_slice()) else { return None };
    let MobilityLaw::Power { m } = spec.mobility else { return None };
    let BoundarySpec::Dirichlet { outer, inner: None } = spec.boundary else { return None };
    if outer != beta {
        return None;
    }
    jump_constant_example(m, spec.domain.dim, spec.domain.radius, r, alpha, beta).ok().map(|_| beta)
}
