//! CSV, JSON and JUnit emitters. Floats are written with 17 significant
//! digits so every value survives a text round trip bit-exactly.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::ProblemSpec;
use crate::oracles::{Certificate, OracleKind, OracleParams, OracleSolution};
use crate::solver::{extract_traces, EpsStep, FaceMobility, SolutionBundle, Traces};
use crate::verify::{CheckReport, CheckStatus};

pub const SOLUTION_HEADER: &str = "rho,u,f,z_face_left,w_face_left";

/// Everything about a solve that is not a per-cell column.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub n: usize,
    pub eps_final: f64,
    pub delta: f64,
    pub newton_tol: f64,
    pub face_mobility: FaceMobility,
    pub eps_converged: bool,
    pub residual_norm: f64,
    pub trace_outer: f64,
    pub traces: Option<Traces>,
    pub eps_history: Vec<EpsStep>,
    /// Final residual at each continuation level.
    pub residuals: Vec<f64>,
}

impl Diagnostics {
    pub fn new(bundle: &SolutionBundle, spec: &ProblemSpec) -> Self {
        Self {
            n: bundle.grid.n,
            eps_final: bundle.eps_final,
            delta: bundle.delta,
            newton_tol: bundle.newton_tol,
            face_mobility: bundle.face_mobility,
            eps_converged: bundle.eps_converged,
            residual_norm: bundle.residual_norm,
            trace_outer: bundle.trace_outer,
            // Neumann problems have no boundary trace to report
            traces: extract_traces(bundle, spec).ok(),
            eps_history: bundle.eps_history.clone(),
            residuals: bundle.eps_history.iter().map(|s| s.residual).collect(),
        }
    }
}

fn num(out: &mut String, x: f64) {
    let _ = write!(out, "{x:.16e}");
}

pub fn solution_csv(bundle: &SolutionBundle) -> String {
    let mut out = String::with_capacity(96 * (bundle.grid.n + 1));
    out.push_str(SOLUTION_HEADER);
    out.push('\n');
    let cols = [bundle.grid.centers.as_slice(), bundle.u.values(), bundle.f.values(), &bundle.z_faces, &bundle.w_faces];
    for i in 0..bundle.grid.n {
        for (k, col) in cols.iter().enumerate() {
            if k > 0 {
                out.push(',');
            }
            num(&mut out, col[i]);
        }
        out.push('\n');
    }
    out
}

/// Sidecar path for a CSV: same stem, `.json` extension.
pub fn sidecar_path(csv: &Path) -> PathBuf {
    csv.with_extension("json")
}

/// Writes the solution CSV to `path` and its diagnostics to the sidecar.
pub fn emit_solution_csv(bundle: &SolutionBundle, spec: &ProblemSpec, path: &Path) -> Result<PathBuf> {
    fs::write(path, solution_csv(bundle))?;
    let sidecar = sidecar_path(path);
    write_json(&sidecar, &Diagnostics::new(bundle, spec))?;
    Ok(sidecar)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

/// Reads a headed numeric CSV into columns keyed by header name.
pub fn read_csv_columns(text: &str) -> Result<Vec<(String, Vec<f64>)>> {
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| Error::Parse("empty CSV".into()))?;
    let mut cols: Vec<(String, Vec<f64>)> = header.split(',').map(|h| (h.trim().to_string(), Vec::new())).collect();
    for (row, line) in lines.enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != cols.len() {
            return Err(Error::Parse(format!("CSV row {} has {} fields, expected {}", row + 1, fields.len(), cols.len())));
        }
        for (col, field) in cols.iter_mut().zip(fields) {
            let x = field.trim().parse().map_err(|e| Error::Parse(format!("CSV row {}: `{field}`: {e}", row + 1)))?;
            col.1.push(x);
        }
    }
    Ok(cols)
}

pub fn csv_column(text: &str, name: &str) -> Result<Vec<f64>> {
    read_csv_columns(text)?
        .into_iter()
        .find(|(h, _)| h == name)
        .map(|(_, v)| v)
        .ok_or_else(|| Error::Parse(format!("CSV has no column `{name}`")))
}

pub fn oracle_csv(oracle: &OracleSolution, rhos: &[f64]) -> String {
    let mut out = String::from("rho,u\n");
    for (&r, u) in rhos.iter().zip(oracle.sample(rhos)) {
        num(&mut out, r);
        out.push(',');
        num(&mut out, u);
        out.push('\n');
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleRecord {
    pub kind: OracleKind,
    pub params: OracleParams,
    pub certificate: Certificate,
}

impl From<&OracleSolution> for OracleRecord {
    fn from(o: &OracleSolution) -> Self {
        Self { kind: o.kind, params: o.params.clone(), certificate: o.certificate.clone() }
    }
}

fn xml_escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

fn describe(r: &CheckReport) -> String {
    let mut s = format!("measured {:e}, bound {:e}, tolerance {:e} ({})", r.measured, r.bound, r.tolerance, r.provenance);
    if let Some(note) = &r.note {
        let _ = write!(s, ": {note}");
    }
    s
}

/// JUnit-style XML, one testcase per report.
pub fn junit_xml(suite: &str, reports: &[CheckReport]) -> String {
    let failures = reports.iter().filter(|r| r.status == CheckStatus::Fail).count();
    let skipped = reports.iter().filter(|r| matches!(r.status, CheckStatus::Skipped | CheckStatus::NotApplicable)).count();
    let mut out = String::from("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = writeln!(
        out,
        "<testsuite name=\"{}\" tests=\"{}\" failures=\"{failures}\" skipped=\"{skipped}\">",
        xml_escape(suite),
        reports.len()
    );
    for r in reports {
        let _ = write!(out, "  <testcase classname=\"{}\" name=\"{}\"", xml_escape(suite), xml_escape(&r.name));
        let body = xml_escape(&describe(r));
        match r.status {
            CheckStatus::Pass => {
                let _ = writeln!(out, ">\n    <system-out>{body}</system-out>\n  </testcase>");
            }
            CheckStatus::Fail => {
                let _ = writeln!(out, ">\n    <failure message=\"{body}\"/>\n  </testcase>");
            }
            CheckStatus::Skipped | CheckStatus::NotApplicable => {
                let _ = writeln!(out, ">\n    <skipped message=\"{body}\"/>\n  </testcase>");
            }
        }
    }
    out.push_str("</testsuite>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_grid, BoundarySpec, DomainSpec, MobilityLaw, SourceField};
    use crate::solver::{continuation_solve, SolverConfig};

    fn small_solve(n: usize) -> (ProblemSpec, SolutionBundle) {
        let spec = ProblemSpec::new(
            MobilityLaw::power(1.0).unwrap(),
            DomainSpec::ball(1, 2.0).unwrap(),
            SourceField::Constant(0.0),
            BoundarySpec::dirichlet(1.0),
        )
        .unwrap();
        let grid = build_grid(&spec.domain, n).unwrap();
        let b = continuation_solve(&spec, &grid, &SolverConfig::default()).unwrap();
        (spec, b)
    }

    #[test]
    fn four_cells_four_rows() {
        let (_, b) = small_solve(4);
        let csv = solution_csv(&b);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 5);
        assert_eq!(lines[0], SOLUTION_HEADER);
    }

    #[test]
    fn round_trip_is_bit_exact() {
        let (_, b) = small_solve(32);
        let u = csv_column(&solution_csv(&b), "u").unwrap();
        let SourceField::Sampled(v) = SourceField::Sampled(u) else { unreachable!() };
        assert!(v.iter().zip(b.u.values()).all(|(a, c)| a.to_bits() == c.to_bits()));
    }

    #[test]
    fn sidecar_history_decreasing() {
        let (spec, b) = small_solve(16);
        let dir = std::env::temp_dir().join(format!("resolvent-out-{}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        let sidecar = emit_solution_csv(&b, &spec, &dir.join("s.csv")).unwrap();
        let d: Diagnostics = serde_json::from_str(&fs::read_to_string(sidecar).unwrap()).unwrap();
        assert!(d.eps_history.windows(2).all(|w| w[1].eps < w[0].eps));
        assert_eq!(d.residuals.len(), d.eps_history.len());
        assert!(d.traces.is_some());
        fs::remove_dir_all(dir).unwrap();
    }

    #[test]
    fn junit_counts_and_escapes() {
        let reports = vec![
            CheckReport::at_most("a<b", 1.0, 2.0, 0.0, "x & y"),
            CheckReport::at_most("c", 3.0, 2.0, 0.0, "z"),
            CheckReport::skipped("d", "no", "w"),
        ];
        let xml = junit_xml("core", &reports);
        assert!(xml.contains("tests=\"3\" failures=\"1\" skipped=\"1\""));
        assert!(xml.contains("a&lt;b") && xml.contains("x &amp; y"));
    }
}
