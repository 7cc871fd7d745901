//! Named collections of checks for the `verify` command.

use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{build_grid, BoundarySpec, DomainSpec, Field, MobilityLaw, ProblemSpec, SourceField};
use crate::oracles::{
    compact_support, constant_solution_oracle, jump_m1_example, m1_profile, sublinear_profile, superlinear_constant,
    OracleSolution,
};
use crate::solver::{continuation_solve, SolutionBundle, SolverConfig};

use super::checks::{
    check_boundary_complementarity, check_lower_bound, check_max_principle, check_neumann_mass,
    contraction_report, default_match_tol, jump_diffusion_report, oracle_match_report, ComplementarityTol,
};
use super::random::{random_contraction_pair, random_neumann_spec};
use super::{CheckReport, CheckStatus};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Core,
    Singular,
    Degenerate,
    Neumann,
    All,
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "core" => Ok(Suite::Core),
            "singular" => Ok(Suite::Singular),
            "degenerate" => Ok(Suite::Degenerate),
            "neumann" => Ok(Suite::Neumann),
            "all" => Ok(Suite::All),
            other => Err(Error::Config(format!(
                "unknown suite `{other}`; expected core, singular, degenerate, neumann or all"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteOptions {
    pub seed: u64,
    pub n: usize,
    /// Random cases per mobility regime in the property checks.
    pub random_cases: usize,
    /// Corrupt every solution before checking it (self-test of the harness).
    pub inject_fault: bool,
    pub solver: SolverConfig,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        Self { seed: 20240607, n: 256, random_cases: 5, inject_fault: false, solver: SolverConfig::default() }
    }
}

type CaseFn = dyn Fn(&SuiteOptions) -> Vec<CheckReport> + Send + Sync;

/// One named unit of work producing reports; cases are independent.
pub struct SuiteCase {
    pub name: String,
    run: Box<CaseFn>,
}

impl SuiteCase {
    fn new(name: impl Into<String>, run: impl Fn(&SuiteOptions) -> Vec<CheckReport> + Send + Sync + 'static) -> Self {
        Self { name: name.into(), run: Box::new(run) }
    }

    /// Runs the case; report names are prefixed with the case name.
    pub fn run(&self, opts: &SuiteOptions) -> Vec<CheckReport> {
        (self.run)(opts)
            .into_iter()
            .map(|r| {
                let name = format!("{}/{}", self.name, r.name);
                r.renamed(name)
            })
            .collect()
    }
}

impl std::fmt::Debug for SuiteCase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SuiteCase").field("name", &self.name).finish()
    }
}

/// Lifts the solution by ten times the data scale and pushes a middle cell
/// to minus the data scale, which every check must notice.
pub fn inject_fault(bundle: &mut SolutionBundle, spec: &ProblemSpec) {
    let scale = spec.scale();
    let mut u: Vec<f64> = bundle.u.values().iter().map(|v| v + 10.0 * scale).collect();
    let n = u.len();
    u[n / 2] = -scale;
    bundle.u = Field::new(&bundle.grid, u).expect("finite corrupted field");
}

fn solve(spec: &ProblemSpec, n: usize, opts: &SuiteOptions) -> Result<SolutionBundle> {
    let grid = build_grid(&spec.domain, n)?;
    let mut bundle = continuation_solve(spec, &grid, &opts.solver)?;
    if opts.inject_fault {
        inject_fault(&mut bundle, spec);
    }
    Ok(bundle)
}

fn ball_spec(m: f64, dim: u32, radius: f64, source: SourceField, g: f64) -> Result<ProblemSpec> {
    ProblemSpec::new(MobilityLaw::power(m)?, DomainSpec::ball(dim, radius)?, source, BoundarySpec::dirichlet(g))
}

fn failed(name: &str, err: Error) -> Vec<CheckReport> {
    vec![CheckReport::errored(name, &err, "solver")]
}

/// Solve, then the bundle checks plus an oracle comparison.
fn oracle_case(
    name: &str,
    build: impl Fn() -> Result<(ProblemSpec, OracleSolution)> + Send + Sync + 'static,
) -> SuiteCase {
    SuiteCase::new(name, move |opts| {
        let (spec, oracle) = match build() {
            Ok(x) => x,
            Err(e) => return failed("setup", e),
        };
        let bundle = match solve(&spec, opts.n, opts) {
            Ok(b) => b,
            Err(e) => return failed("solve", e),
        };
        let tol = default_match_tol(&bundle.grid, bundle.eps_final, spec.scale());
        vec![
            check_max_principle(&bundle, &spec),
            check_lower_bound(&bundle, &spec),
            check_boundary_complementarity(&bundle, &spec, ComplementarityTol::default()),
            oracle_match_report(&bundle, &oracle, tol),
        ]
    })
}

fn contraction_case(m: f64) -> SuiteCase {
    SuiteCase::new(format!("contraction_m{m}"), move |opts| {
        (0..opts.random_cases as u64)
            .map(|k| {
                let seed = opts.seed.wrapping_add(k);
                let run = || -> Result<CheckReport> {
                    let (s1, s2) = random_contraction_pair(m, seed)?;
                    let b1 = solve(&s1, opts.n / 4, opts)?;
                    let mut clean = opts.clone();
                    clean.inject_fault = false;
                    let b2 = solve(&s2, opts.n / 4, &clean)?;
                    Ok(contraction_report(&b1, &b2))
                };
                run().unwrap_or_else(|e| CheckReport::errored("contraction", &e, "solver"))
                    .renamed(format!("contraction_seed{seed}"))
            })
            .collect()
    })
}

fn neumann_case(m: f64) -> SuiteCase {
    SuiteCase::new(format!("neumann_m{m}"), move |opts| {
        (0..opts.random_cases as u64)
            .flat_map(|k| {
                let seed = opts.seed.wrapping_add(k);
                let spec = match random_neumann_spec(m, seed) {
                    Ok(s) => s,
                    Err(e) => return failed("setup", e),
                };
                match solve(&spec, opts.n / 4, opts) {
                    Ok(b) => vec![
                        check_neumann_mass(&b, &spec).renamed(format!("mass_seed{seed}")),
                        check_max_principle(&b, &spec).renamed(format!("max_principle_seed{seed}")),
                    ],
                    Err(e) => failed(&format!("solve_seed{seed}"), e),
                }
            })
            .collect()
    })
}

fn jump_case() -> SuiteCase {
    SuiteCase::new("jump_flat", |opts| {
        let spec = match SourceField::piecewise(vec![0.1], vec![1.2, 1.0]).and_then(|f| ball_spec(1.0, 1, 1.0, f, 1.0))
        {
            Ok(s) => s,
            Err(e) => return failed("setup", e),
        };
        let n = (opts.n / 4).max(16);
        let bundles: Result<Vec<_>> = (0..3).map(|k| solve(&spec, n << k, opts)).collect();
        match bundles {
            Ok(b) => vec![jump_diffusion_report(&b, &spec), check_max_principle(&b[2], &spec)],
            Err(e) => failed("solve", e),
        }
    })
}

fn core_cases() -> Vec<SuiteCase> {
    vec![
        oracle_case("m1_profile", || Ok((ball_spec(1.0, 1, 2.0, SourceField::Constant(0.0), 1.0)?, m1_profile(1, 2.0, 1.0)?))),
        oracle_case("superlinear_constant", || {
            Ok((ball_spec(2.0, 1, 1.0, SourceField::Constant(0.0), 2.0)?, superlinear_constant(2.0, 1, 1.0, 2.0)?))
        }),
        oracle_case("jump_m1", || {
            let f = SourceField::piecewise(vec![1.0], vec![3.0, 1.0])?;
            Ok((ball_spec(1.0, 1, 2.0, f, 0.5)?, jump_m1_example(3.0, 1.0, 1.0, 2.0)?))
        }),
        jump_case(),
        contraction_case(1.0),
    ]
}

fn singular_cases() -> Vec<SuiteCase> {
    vec![
        oracle_case("constant_attained", || {
            Ok((ball_spec(-1.0, 1, 1.0, SourceField::Constant(0.0), 1.0)?, constant_solution_oracle(-1.0, 0.0, 1, 1.0, 1.0)?))
        }),
        oracle_case("constant_relaxed", || {
            Ok((ball_spec(-1.0, 1, 1.0, SourceField::Constant(0.0), 2.0)?, constant_solution_oracle(-1.0, 0.0, 1, 1.0, 2.0)?))
        }),
        contraction_case(-1.0),
    ]
}

fn degenerate_cases() -> Vec<SuiteCase> {
    vec![
        oracle_case("sublinear_profile", || {
            Ok((ball_spec(0.5, 1, 1.0, SourceField::Constant(0.0), 4.0)?, sublinear_profile(0.5, 0.0, 1, 1.0, 4.0)?))
        }),
        oracle_case("compact_support", || {
            Ok((ball_spec(2.0, 1, 1.0, SourceField::Constant(0.0), 0.3)?, compact_support(2.0, 1.0, 0.3)?))
        }),
        contraction_case(0.5),
        contraction_case(2.0),
    ]
}

fn neumann_cases() -> Vec<SuiteCase> {
    [-1.0, 0.5, 1.0, 2.0].into_iter().map(neumann_case).collect()
}

pub fn suite_cases(suite: Suite) -> Vec<SuiteCase> {
    match suite {
        Suite::Core => core_cases(),
        Suite::Singular => singular_cases(),
        Suite::Degenerate => degenerate_cases(),
        Suite::Neumann => neumann_cases(),
        Suite::All => [core_cases(), singular_cases(), degenerate_cases(), neumann_cases()].into_iter().flatten().collect(),
    }
}

/// Runs every case in order and returns the reports sorted by name.
pub fn run_suite(suite: Suite, opts: &SuiteOptions) -> Vec<CheckReport> {
    let mut reports: Vec<CheckReport> = suite_cases(suite).iter().flat_map(|c| c.run(opts)).collect();
    reports.sort_by(|a, b| a.name.cmp(&b.name));
    reports
}

/// Fault injection must turn every applicable check into a failure.
pub fn all_fail_or_inert(reports: &[CheckReport]) -> bool {
    reports.iter().all(|r| r.status != CheckStatus::Pass)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_parse() {
        for s in ["core", "singular", "degenerate", "neumann", "all"] {
            assert!(s.parse::<Suite>().is_ok());
        }
        assert!("bogus".parse::<Suite>().is_err());
    }
}
