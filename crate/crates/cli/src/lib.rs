//! Subcommand dispatch for the `resolvent` binary.
//!
//! Exit codes: 0 success, 1 usage or configuration error, 2 solver
//! non-convergence, 3 verification failure.
//!
//! Defaults, as printed by `--help`:
//!
//! ```
//! use resolvent::verify::SuiteOptions;
//! use resolvent::SolverConfig;
//!
//! let opts = SuiteOptions::default();
//! assert_eq!((opts.seed, opts.n, opts.random_cases), (20240607, 256, 5));
//! let solver = SolverConfig::default();
//! assert_eq!((solver.eps_init, solver.eps_factor, solver.eps_final), (0.1, 0.5, 1e-4));
//! assert_eq!((solver.newton_tol, solver.newton_max_iter), (1e-9, 400));
//! assert_eq!(resolvent::config::DEFAULT_CELLS, 256);
//! assert_eq!(resolvent_cli::OUT_DIR_ENV, "RESOLVENT_OUT_DIR");
//! ```

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use resolvent::config::{parse_config, RunConfig};
use resolvent::oracles::{
    barrier_profile, compact_support, constant_solution_oracle, jump_constant_example, jump_m1_example,
    large_g_classify, m1_profile, sublinear_profile, superlinear_constant, GSource, OracleSolution,
};
use resolvent::output::{emit_solution_csv, junit_xml, oracle_csv, write_json, OracleRecord};
use resolvent::verify::{convergence_study, suite_cases, CheckReport, CheckStatus, Suite, SuiteOptions};
use resolvent::{
    build_grid, continuation_solve, BoundarySpec, DomainSpec, Error, MobilityLaw, ProblemSpec, SolverConfig,
    SourceField,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_NONCONVERGENCE: i32 = 2;
pub const EXIT_VERIFY_FAILED: i32 = 3;

/// Default output directory when `--out` is not given.
pub const OUT_DIR_ENV: &str = "RESOLVENT_OUT_DIR";

#[derive(Debug, Parser)]
#[command(name = "resolvent", version, about = "Flux-saturated resolvent solver, oracles and property checks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve the problem described by a config file.
    Solve {
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Sample a reference solution.
    Oracle {
        #[command(flatten)]
        case: CaseArgs,
        /// Number of equispaced sample points on [0, R].
        #[arg(long, default_value_t = 101)]
        samples: usize,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Run a named verification suite.
    Verify {
        #[arg(long, value_enum, default_value_t = SuiteArg::Core)]
        suite: SuiteArg,
        /// Worker threads; 0 means one per logical processor.
        #[arg(long, default_value_t = 0)]
        jobs: usize,
        #[arg(long, default_value_t = SuiteOptions::default().seed)]
        seed: u64,
        #[arg(long, default_value_t = SuiteOptions::default().n)]
        cells: usize,
        /// Random problems per mobility regime.
        #[arg(long, default_value_t = SuiteOptions::default().random_cases)]
        random_cases: usize,
        /// Corrupt every solution before checking it.
        #[arg(long)]
        inject_fault: bool,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Track u_G(0) as the Dirichlet datum grows.
    Sweep {
        #[arg(long, allow_hyphen_values = true)]
        m: f64,
        #[arg(long = "F", default_value_t = 0.0)]
        f: f64,
        #[arg(long = "N", default_value_t = 1)]
        dim: u32,
        #[arg(long = "R")]
        radius: f64,
        #[arg(long = "G", value_delimiter = ',', default_value = "1,4,16,64")]
        gs: Vec<f64>,
        /// Solve on this many cells instead of evaluating the oracle.
        #[arg(long)]
        cells: Option<usize>,
        #[arg(long, default_value_t = SolverConfig::default().eps_final)]
        eps_final: f64,
        #[command(flatten)]
        out: OutArgs,
    },
    /// L-infinity error against an oracle over a grid of (n, eps).
    Convergence {
        #[command(flatten)]
        case: CaseArgs,
        #[arg(long = "n", value_delimiter = ',', default_value = "64,128,256,512")]
        n_list: Vec<usize>,
        #[arg(long = "eps", value_delimiter = ',', default_value = "1e-2,1e-3,1e-4")]
        eps_list: Vec<f64>,
        #[command(flatten)]
        out: OutArgs,
    },
}

#[derive(Debug, Clone, Args)]
pub struct OutArgs {
    /// Output directory; defaults to $RESOLVENT_OUT_DIR, then the config, then `.`.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SuiteArg {
    Core,
    Singular,
    Degenerate,
    Neumann,
    All,
}

impl From<SuiteArg> for Suite {
    fn from(s: SuiteArg) -> Self {
        match s {
            SuiteArg::Core => Suite::Core,
            SuiteArg::Singular => Suite::Singular,
            SuiteArg::Degenerate => Suite::Degenerate,
            SuiteArg::Neumann => Suite::Neumann,
            SuiteArg::All => Suite::All,
        }
    }
}

impl SuiteArg {
    fn name(self) -> &'static str {
        match self {
            SuiteArg::Core => "core",
            SuiteArg::Singular => "singular",
            SuiteArg::Degenerate => "degenerate",
            SuiteArg::Neumann => "neumann",
            SuiteArg::All => "all",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OracleCase {
    Constant,
    M1,
    Superlinear,
    Sublinear,
    Compact,
    Barrier,
    JumpConstant,
    JumpM1,
}

impl OracleCase {
    fn name(self) -> &'static str {
        match self {
            OracleCase::Constant => "constant",
            OracleCase::M1 => "m1",
            OracleCase::Superlinear => "superlinear",
            OracleCase::Sublinear => "sublinear",
            OracleCase::Compact => "compact",
            OracleCase::Barrier => "barrier",
            OracleCase::JumpConstant => "jump_constant",
            OracleCase::JumpM1 => "jump_m1",
        }
    }
}

/// Parameters shared by `oracle` and `convergence`.
#[derive(Debug, Clone, Args)]
pub struct CaseArgs {
    #[arg(long, value_enum)]
    pub case: OracleCase,
    /// Mobility exponent (ignored by the m = 1 cases).
    #[arg(long, allow_hyphen_values = true, default_value_t = 1.0)]
    pub m: f64,
    /// Constant source, or its supremum for the barrier.
    #[arg(long = "F", default_value_t = 0.0)]
    pub f: f64,
    #[arg(long = "N", default_value_t = 1)]
    pub dim: u32,
    #[arg(long = "R")]
    pub radius: f64,
    /// Dirichlet datum; the jump cases default to beta.
    #[arg(long = "G")]
    pub g: Option<f64>,
    /// Jump location for the jump cases.
    #[arg(long)]
    pub r: Option<f64>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
}

fn need(name: &str, v: Option<f64>) -> resolvent::Result<f64> {
    v.ok_or_else(|| Error::Config(format!("--{name} is required for this case")))
}

impl CaseArgs {
    pub fn oracle(&self) -> resolvent::Result<OracleSolution> {
        let (m, f, dim, radius) = (self.m, self.f, self.dim, self.radius);
        match self.case {
            OracleCase::Constant => constant_solution_oracle(m, f, dim, radius, need("G", self.g)?),
            OracleCase::M1 => m1_profile(dim, radius, need("G", self.g)?),
            OracleCase::Superlinear => superlinear_constant(m, dim, radius, need("G", self.g)?),
            OracleCase::Sublinear => sublinear_profile(m, f, dim, radius, need("G", self.g)?),
            OracleCase::Compact => compact_support(m, radius, need("G", self.g)?),
            OracleCase::Barrier => barrier_profile(m, f, dim, radius),
            OracleCase::JumpConstant => {
                jump_constant_example(m, dim, radius, need("r", self.r)?, need("alpha", self.alpha)?, need("beta", self.beta)?)
            }
            OracleCase::JumpM1 => jump_m1_example(need("alpha", self.alpha)?, need("beta", self.beta)?, need("r", self.r)?, radius),
        }
    }

    /// The boundary-value problem the oracle solves.
    pub fn spec(&self, oracle: &OracleSolution) -> resolvent::Result<ProblemSpec> {
        let p = &oracle.params;
        let source = match (p.interface, p.alpha, p.beta) {
            (Some(r), Some(a), Some(b)) => SourceField::piecewise(vec![r], vec![a, b])?,
            _ => SourceField::Constant(p.f),
        };
        let g = match (self.g, p.g) {
            (Some(g), _) | (None, Some(g)) => g,
            (None, None) => return Err(Error::Config(format!("case `{}` is not a boundary-value problem", self.case.name()))),
        };
        ProblemSpec::new(MobilityLaw::power(p.m)?, DomainSpec::ball(p.dim, p.radius)?, source, BoundarySpec::dirichlet(g))
    }
}

fn out_dir(flag: &OutArgs, config: Option<&Path>) -> resolvent::Result<PathBuf> {
    let dir = flag
        .out
        .clone()
        .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .or_else(|| config.map(Path::to_path_buf))
        .unwrap_or_else(|| PathBuf::from("."));
    fs::create_dir_all(&dir)?;
    Ok(dir)
}

fn exit_for(err: &Error) -> i32 {
    match err {
        Error::NonConvergence { .. } => EXIT_NONCONVERGENCE,
        _ => EXIT_USAGE,
    }
}

fn fail(err: Error) -> i32 {
    eprintln!("error: {err}");
    exit_for(&err)
}

fn solve(config: &Path, out: &OutArgs) -> resolvent::Result<i32> {
    let text = fs::read_to_string(config)?;
    let RunConfig { spec, solver, cells, output, .. } = parse_config(&text)?;
    let grid = build_grid(&spec.domain, cells)?;
    let bundle = continuation_solve(&spec, &grid, &solver)?;
    let dir = out_dir(out, output.dir.as_deref())?;
    let csv = dir.join(format!("{}.csv", output.stem));
    let sidecar = emit_solution_csv(&bundle, &spec, &csv)?;
    println!("{}", csv.display());
    println!("{}", sidecar.display());
    if !bundle.eps_converged {
        eprintln!("warning: eps-continuation increments did not settle below the Cauchy tolerance");
    }
    Ok(EXIT_OK)
}

fn oracle(case: &CaseArgs, samples: usize, out: &OutArgs) -> resolvent::Result<i32> {
    if samples < 2 {
        return Err(Error::Config(format!("--samples must be at least 2, got {samples}")));
    }
    let o = case.oracle()?;
    let rhos: Vec<f64> = (0..samples).map(|k| case.radius * k as f64 / (samples - 1) as f64).collect();
    let dir = out_dir(out, None)?;
    let stem = format!("oracle_{}", case.case.name());
    let csv = dir.join(format!("{stem}.csv"));
    fs::write(&csv, oracle_csv(&o, &rhos))?;
    let json = dir.join(format!("{stem}.json"));
    write_json(&json, &OracleRecord::from(&o))?;
    println!("{}", csv.display());
    println!("{}", json.display());
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct VerifySummary<'a> {
    suite: &'a str,
    seed: u64,
    inject_fault: bool,
    passed: usize,
    failed: usize,
    inert: usize,
    reports: &'a [CheckReport],
}

fn verify(suite: SuiteArg, jobs: usize, opts: SuiteOptions, out: &OutArgs) -> resolvent::Result<i32> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::Config(format!("cannot start {jobs} workers: {e}")))?;
    let cases = suite_cases(suite.into());
    let mut reports: Vec<CheckReport> = pool.install(|| {
        use rayon::prelude::*;
        cases.par_iter().flat_map_iter(|c| c.run(&opts)).collect()
    });
    reports.sort_by(|a, b| a.name.cmp(&b.name));
    let passed = reports.iter().filter(|r| r.passed()).count();
    let failed = reports.iter().filter(|r| r.failed()).count();
    for r in &reports {
        let tag = match r.status {
            CheckStatus::Pass => "PASS",
            CheckStatus::Fail => "FAIL",
            _ => "SKIP",
        };
        println!("{tag} {}", r.name);
    }
    let dir = out_dir(out, None)?;
    let stem = format!("verify_{}", suite.name());
    fs::write(dir.join(format!("{stem}.xml")), junit_xml(suite.name(), &reports))?;
    let summary = VerifySummary {
        suite: suite.name(),
        seed: opts.seed,
        inject_fault: opts.inject_fault,
        passed,
        failed,
        inert: reports.len() - passed - failed,
        reports: &reports,
    };
    write_json(&dir.join(format!("{stem}.json")), &summary)?;
    println!("{passed} passed, {failed} failed, {} skipped", summary.inert);
    Ok(if failed > 0 { EXIT_VERIFY_FAILED } else { EXIT_OK })
}

#[allow(clippy::too_many_arguments)]
fn sweep(m: f64, f: f64, dim: u32, radius: f64, gs: &[f64], cells: Option<usize>, eps_final: f64, out: &OutArgs) -> resolvent::Result<i32> {
    let config = SolverConfig::default().with_eps_final(eps_final);
    let source = match cells {
        Some(n) => GSource::Solver { n, config: &config },
        None => GSource::Oracle,
    };
    let report = large_g_classify(m, f, dim, radius, gs, source)?;
    let mut csv = String::from("g,u0\n");
    for s in &report.samples {
        csv.push_str(&format!("{:.16e},{:.16e}\n", s.g, s.u0));
    }
    let dir = out_dir(out, None)?;
    fs::write(dir.join("sweep.csv"), csv)?;
    write_json(&dir.join("sweep.json"), &report)?;
    println!("regime: {:?}", report.regime);
    match report.predicted_limit {
        Some(l) => println!("predicted limit of u_G(0): {l:.6}"),
        None => println!("predicted limit of u_G(0): infinite"),
    }
    Ok(EXIT_OK)
}

fn convergence(case: &CaseArgs, n_list: &[usize], eps_list: &[f64], out: &OutArgs) -> resolvent::Result<i32> {
    let o = case.oracle()?;
    let spec = case.spec(&o)?;
    let table = convergence_study(&spec, &o, n_list, eps_list, &SolverConfig::default())?;
    let dir = out_dir(out, None)?;
    let csv = dir.join(format!("convergence_{}.csv", case.case.name()));
    fs::write(&csv, table.to_csv())?;
    print!("{}", table.to_csv());
    Ok(EXIT_OK)
}

pub fn run(cli: Cli) -> i32 {
    let result = match cli.command {
        Command::Solve { config, out } => solve(&config, &out),
        Command::Oracle { case, samples, out } => oracle(&case, samples, &out),
        Command::Verify { suite, jobs, seed, cells, random_cases, inject_fault, out } => {
            let opts = SuiteOptions { seed, n: cells, random_cases, inject_fault, ..SuiteOptions::default() };
            verify(suite, jobs, opts, &out)
        }
        Command::Sweep { m, f, dim, radius, gs, cells, eps_final, out } => {
            sweep(m, f, dim, radius, &gs, cells, eps_final, &out)
        }
        Command::Convergence { case, n_list, eps_list, out } => convergence(&case, &n_list, &eps_list, &out),
    };
    result.unwrap_or_else(fail)
}

/// Parses `argv` (program name first) and runs it.
pub fn dispatch<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(argv) {
        Ok(cli) => run(cli),
        Err(e) => {
            let _ = e.print();
            if e.use_stderr() {
                EXIT_USAGE
            } else {
                EXIT_OK // --help, --version
            }
        }
    }
}
