//! WebAssembly entry points for the static demo page in `www/`.
//!
//! Each export takes plain numbers and returns a JSON string; errors come
//! back as `{"error": "..."}` so the page never has to catch exceptions.
//! The JSON-producing functions are ordinary Rust and are tested natively.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use resolvent::oracles::{
    barrier_profile, compact_support, constant_solution_oracle, large_g_classify, m1_profile, sublinear_profile,
    superlinear_constant, GSource, OracleSolution,
};
use resolvent::{
    build_grid, continuation_solve, extract_traces, BoundarySpec, DomainSpec, Error, MobilityLaw, ProblemSpec,
    Result, SolverConfig, SourceField,
};

/// Upper bound on cells so a click cannot freeze the tab.
pub const MAX_CELLS: usize = 4096;

#[derive(Debug, Serialize)]
pub struct SolveOutput {
    pub rho: Vec<f64>,
    pub u: Vec<f64>,
    /// Reference profile on the same centers, when one applies to the data.
    pub oracle: Option<Vec<f64>>,
    pub oracle_kind: Option<String>,
    pub u_boundary: Option<f64>,
    pub w_nu: Option<f64>,
    pub eps_final: f64,
    pub levels: usize,
    pub residual: f64,
}

#[derive(Debug, Serialize)]
pub struct OracleOutput {
    pub kind: String,
    pub rho: Vec<f64>,
    pub u: Vec<f64>,
    pub hypothesis: String,
    pub lhs: f64,
    pub rhs: f64,
}

fn to_json<T: Serialize>(r: Result<T>) -> String {
    match r {
        Ok(v) => serde_json::to_string(&v).unwrap_or_else(|e| error_json(&e.to_string())),
        Err(e) => error_json(&e.to_string()),
    }
}

fn error_json(msg: &str) -> String {
    serde_json::json!({ "error": msg }).to_string()
}

fn kind_name(o: &OracleSolution) -> String {
    serde_json::to_value(o.kind).ok().and_then(|v| v.as_str().map(str::to_owned)).unwrap_or_default()
}

/// The closed-form profile that applies to `(m, f, N, R, g)`, if any.
fn matching_oracle(m: f64, f: f64, dim: u32, radius: f64, g: f64) -> Option<OracleSolution> {
    constant_solution_oracle(m, f, dim, radius, g).ok().or_else(|| {
        let found = if m > 0.0 && m < 1.0 {
            sublinear_profile(m, f, dim, radius, g)
        } else if f != 0.0 {
            return None;
        } else if m == 1.0 {
            m1_profile(dim, radius, g)
        } else if m > 1.0 {
            superlinear_constant(m, dim, radius, g).or_else(|e| if dim == 1 { compact_support(m, radius, g) } else { Err(e) })
        } else {
            return None;
        };
        found.ok()
    })
}

pub fn solve_profile_impl(m: f64, f: f64, dim: u32, radius: f64, g: f64, cells: usize, eps_final: f64) -> Result<SolveOutput> {
    if cells > MAX_CELLS {
        return Err(Error::Config(format!("at most {MAX_CELLS} cells in the browser, got {cells}")));
    }
    let spec = ProblemSpec::new(
        MobilityLaw::power(m)?,
        DomainSpec::ball(dim, radius)?,
        SourceField::Constant(f),
        BoundarySpec::dirichlet(g),
    )?;
    let grid = build_grid(&spec.domain, cells)?;
    let config = SolverConfig::default().with_eps_final(eps_final);
    let bundle = continuation_solve(&spec, &grid, &config)?;
    let traces = extract_traces(&bundle, &spec).ok();
    let oracle = matching_oracle(m, f, dim, radius, g);
    Ok(SolveOutput {
        oracle: oracle.as_ref().map(|o| o.sample(&grid.centers)),
        oracle_kind: oracle.as_ref().map(kind_name),
        u_boundary: traces.map(|t| t.u_boundary),
        w_nu: traces.map(|t| t.w_nu),
        eps_final: bundle.eps_final,
        levels: bundle.eps_history.len(),
        residual: bundle.residual_norm,
        u: bundle.u.into_values(),
        rho: grid.centers,
    })
}

pub fn oracle_profile_impl(case: &str, m: f64, f: f64, dim: u32, radius: f64, g: f64, samples: usize) -> Result<OracleOutput> {
    let o = match case {
        "constant" => constant_solution_oracle(m, f, dim, radius, g)?,
        "m1" => m1_profile(dim, radius, g)?,
        "superlinear" => superlinear_constant(m, dim, radius, g)?,
        "sublinear" => sublinear_profile(m, f, dim, radius, g)?,
        "compact" => compact_support(m, radius, g)?,
        "barrier" => barrier_profile(m, f, dim, radius)?,
        other => return Err(Error::Config(format!("unknown case `{other}`"))),
    };
    let samples = samples.clamp(2, MAX_CELLS);
    let rho: Vec<f64> = (0..samples).map(|k| radius * k as f64 / (samples - 1) as f64).collect();
    let u = o.sample(&rho);
    Ok(OracleOutput {
        kind: kind_name(&o),
        rho,
        u,
        hypothesis: o.certificate.hypothesis.clone(),
        lhs: o.certificate.lhs,
        rhs: o.certificate.rhs,
    })
}

/// `gs` is a comma-separated list; `cells == 0` uses the oracles only.
pub fn large_g_sweep_impl(m: f64, f: f64, dim: u32, radius: f64, gs: &str, cells: usize) -> Result<resolvent::oracles::LargeGReport> {
    let gs: Vec<f64> = gs
        .split(',')
        .map(|s| s.trim().parse::<f64>().map_err(|e| Error::Parse(format!("`{s}`: {e}"))))
        .collect::<Result<_>>()?;
    if cells > MAX_CELLS {
        return Err(Error::Config(format!("at most {MAX_CELLS} cells in the browser, got {cells}")));
    }
    let config = SolverConfig::default();
    let source = if cells == 0 { GSource::Oracle } else { GSource::Solver { n: cells, config: &config } };
    large_g_classify(m, f, dim, radius, &gs, source)
}

#[wasm_bindgen]
pub fn solve_profile(m: f64, f: f64, dim: u32, radius: f64, g: f64, cells: usize, eps_final: f64) -> String {
    to_json(solve_profile_impl(m, f, dim, radius, g, cells, eps_final))
}

#[wasm_bindgen]
pub fn oracle_profile(case: &str, m: f64, f: f64, dim: u32, radius: f64, g: f64, samples: usize) -> String {
    to_json(oracle_profile_impl(case, m, f, dim, radius, g, samples))
}

#[wasm_bindgen]
pub fn large_g_sweep(m: f64, f: f64, dim: u32, radius: f64, gs: &str, cells: usize) -> String {
    to_json(large_g_sweep_impl(m, f, dim, radius, gs, cells))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solve_attaches_m1_oracle() {
        let out = solve_profile_impl(1.0, 0.0, 1, 2.0, 1.0, 256, 1e-4).unwrap();
        assert_eq!(out.oracle_kind.as_deref(), Some("m1_profile"));
        let err = out.u.iter().zip(out.oracle.unwrap()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(err < 0.02, "{err}");
    }

    #[test]
    fn errors_are_json() {
        let s = solve_profile(-1.0, 0.0, 1, 1.0, 0.0, 64, 1e-3);
        let v: serde_json::Value = serde_json::from_str(&s).unwrap();
        assert!(v["error"].as_str().unwrap().contains("m<0"));
        let s = oracle_profile("nope", 1.0, 0.0, 1, 1.0, 1.0, 10);
        assert!(s.contains("unknown case"));
    }

    #[test]
    fn oracle_and_sweep_round_trip_json() {
        let v: serde_json::Value = serde_json::from_str(&oracle_profile("compact", 2.0, 0.0, 1, 1.0, 0.3, 11)).unwrap();
        assert_eq!(v["u"].as_array().unwrap().len(), 11);
        let v: serde_json::Value = serde_json::from_str(&large_g_sweep(-1.0, 0.0, 1, 1.0, "1, 4, 16", 0)).unwrap();
        assert_eq!(v["regime"], "saturating_constant");
        assert_eq!(v["samples"].as_array().unwrap().len(), 3);
    }
}
