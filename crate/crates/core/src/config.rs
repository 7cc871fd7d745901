//! Run configuration files.
//!
//! The format is TOML restricted to flat `key = value` pairs inside the
//! sections `[mobility]`, `[domain]`, `[grid]`, `[source]`, `[boundary]`,
//! `[solver]`, `[output]` and `[run]`:
//!
//! ```toml
//! [mobility]
//! m = 1.0
//!
//! [domain]
//! dim = 1
//! radius = 2.0
//! mode = "ball"          # or "interval"
//!
//! [grid]
//! cells = 256
//!
//! [source]
//! value = 0.0            # or: breakpoints = [0.1] with values = [1.2, 1.0]
//!
//! [boundary]
//! kind = "dirichlet"     # or "neumann"
//! g = 1.0
//! # g_inner = 1.0        # interval mode only
//!
//! [solver]
//! eps_final = 1e-4       # any SolverConfig field; omitted ones take defaults
//!
//! [output]
//! dir = "out"
//! stem = "solution"
//!
//! [run]
//! seed = 20240607
//! suite = "core"
//! ```
//!
//! Only `[mobility]`, `[domain]` and `[boundary]` are required. Unknown
//! sections and keys are rejected by name; duplicate keys are a parse error.

use std::path::PathBuf;

use toml::{Table, Value};

use crate::error::{Error, Result};
use crate::model::{BoundarySpec, DomainMode, DomainSpec, MobilityLaw, ProblemSpec, SourceField};
use crate::solver::SolverConfig;
use crate::verify::Suite;

pub const DEFAULT_CELLS: usize = 256;
pub const DEFAULT_SEED: u64 = 20240607;
pub const DEFAULT_STEM: &str = "solution";

#[derive(Debug, Clone, PartialEq)]
pub struct OutputConfig {
    /// `None` defers to the caller (environment or working directory).
    pub dir: Option<PathBuf>,
    pub stem: String,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { dir: None, stem: DEFAULT_STEM.to_string() }
    }
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub spec: ProblemSpec,
    pub solver: SolverConfig,
    pub cells: usize,
    pub output: OutputConfig,
    pub seed: u64,
    pub suite: Suite,
}

const SECTIONS: &[(&str, &[&str])] = &[
    ("mobility", &["m"]),
    ("domain", &["dim", "radius", "mode"]),
    ("grid", &["cells"]),
    ("source", &["value", "breakpoints", "values", "samples"]),
    ("boundary", &["kind", "g", "g_inner"]),
    ("solver", &[]),
    ("output", &["dir", "stem"]),
    ("run", &["seed", "suite"]),
];

fn parse_err(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

struct Section<'a> {
    name: &'a str,
    table: Option<&'a Table>,
}

impl<'a> Section<'a> {
    fn get(&self, key: &str) -> Option<&'a Value> {
        self.table.and_then(|t| t.get(key))
    }

    fn float(&self, key: &str) -> Result<Option<f64>> {
        match self.get(key) {
            None => Ok(None),
            Some(Value::Float(x)) => Ok(Some(*x)),
            Some(Value::Integer(i)) => Ok(Some(*i as f64)),
            Some(v) => Err(parse_err(format!("[{}] {key}: expected a number, got {v}", self.name))),
        }
    }

    fn require_float(&self, key: &str) -> Result<f64> {
        self.float(key)?.ok_or_else(|| parse_err(format!("[{}] missing required key `{key}`", self.name)))
    }

    fn int(&self, key: &str) -> Result<Option<i64>> {
        match self.get(key) {
            None => Ok(None),
            Some(Value::Integer(i)) => Ok(Some(*i)),
            Some(v) => Err(parse_err(format!("[{}] {key}: expected an integer, got {v}", self.name))),
        }
    }

    fn string(&self, key: &str) -> Result<Option<&'a str>> {
        match self.get(key) {
            None => Ok(None),
            Some(Value::String(s)) => Ok(Some(s.as_str())),
            Some(v) => Err(parse_err(format!("[{}] {key}: expected a string, got {v}", self.name))),
        }
    }

    fn floats(&self, key: &str) -> Result<Option<Vec<f64>>> {
        let Some(v) = self.get(key) else { return Ok(None) };
        let bad = || parse_err(format!("[{}] {key}: expected an array of numbers", self.name));
        let arr = v.as_array().ok_or_else(bad)?;
        arr.iter()
            .map(|x| match x {
                Value::Float(f) => Ok(*f),
                Value::Integer(i) => Ok(*i as f64),
                _ => Err(bad()),
            })
            .collect::<Result<Vec<_>>>()
            .map(Some)
    }
}

fn check_keys(root: &Table) -> Result<()> {
    for (name, value) in root {
        let Some((_, allowed)) = SECTIONS.iter().find(|(s, _)| s == name) else {
            return Err(parse_err(format!("unknown section `{name}`")));
        };
        let table = value.as_table().ok_or_else(|| parse_err(format!("`{name}` must be a section")))?;
        if *name == "solver" {
            continue; // checked against SolverConfig's own fields
        }
        if let Some(key) = table.keys().find(|k| !allowed.contains(&k.as_str())) {
            return Err(parse_err(format!("unknown key `{key}` in [{name}]")));
        }
    }
    Ok(())
}

fn section<'a>(root: &'a Table, name: &'a str) -> Section<'a> {
    Section { name, table: root.get(name).and_then(Value::as_table) }
}

fn required<'a>(root: &'a Table, name: &'a str) -> Result<Section<'a>> {
    let s = section(root, name);
    if s.table.is_none() {
        return Err(parse_err(format!("missing required section [{name}]")));
    }
    Ok(s)
}

fn parse_source(s: &Section<'_>) -> Result<SourceField> {
    let value = s.float("value")?;
    let pieces = (s.floats("breakpoints")?, s.floats("values")?);
    let samples = s.floats("samples")?;
    match (value, pieces, samples) {
        (Some(v), (None, None), None) => Ok(SourceField::Constant(v)),
        (None, (Some(b), Some(v)), None) => SourceField::piecewise(b, v),
        (None, (None, None), Some(v)) => Ok(SourceField::Sampled(v)),
        (None, (None, None), None) => Ok(SourceField::Constant(0.0)),
        _ => Err(parse_err(
            "[source] give exactly one of `value`, `breakpoints` with `values`, or `samples`",
        )),
    }
}

fn parse_boundary(s: &Section<'_>) -> Result<BoundarySpec> {
    match s.string("kind")?.unwrap_or("dirichlet") {
        "dirichlet" => Ok(BoundarySpec::Dirichlet { outer: s.require_float("g")?, inner: s.float("g_inner")? }),
        "neumann" => {
            if let Some(key) = ["g", "g_inner"].into_iter().find(|k| s.get(k).is_some()) {
                return Err(parse_err(format!("[boundary] `{key}` has no meaning for kind = \"neumann\"")));
            }
            Ok(BoundarySpec::NeumannZero)
        }
        other => Err(parse_err(format!("[boundary] kind: expected \"dirichlet\" or \"neumann\", got \"{other}\""))),
    }
}

fn parse_domain(s: &Section<'_>) -> Result<DomainSpec> {
    let mode = match s.string("mode")?.unwrap_or("ball") {
        "ball" => DomainMode::RadialBall,
        "interval" => DomainMode::Interval,
        other => return Err(parse_err(format!("[domain] mode: expected \"ball\" or \"interval\", got \"{other}\""))),
    };
    let dim = s.int("dim")?.unwrap_or(1);
    let dim = u32::try_from(dim).map_err(|_| parse_err(format!("[domain] dim must be a positive integer, got {dim}")))?;
    DomainSpec::new(dim, s.require_float("radius")?, mode)
}

/// Parses and fully validates a run configuration.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let root: Table = text.parse().map_err(|e: toml::de::Error| parse_err(e.to_string()))?;
    check_keys(&root)?;

    let mobility = MobilityLaw::power(required(&root, "mobility")?.require_float("m")?)?;
    let domain = parse_domain(&required(&root, "domain")?)?;
    let source = parse_source(&section(&root, "source"))?;
    let boundary = parse_boundary(&required(&root, "boundary")?)?;
    let spec = ProblemSpec::new(mobility, domain, source, boundary)?;

    let solver: SolverConfig = match root.get("solver") {
        Some(v) => v.clone().try_into().map_err(|e: toml::de::Error| parse_err(format!("[solver] {e}")))?,
        None => SolverConfig::default(),
    };
    solver.validate(&spec)?;

    let cells = section(&root, "grid").int("cells")?.unwrap_or(DEFAULT_CELLS as i64);
    let cells = usize::try_from(cells).map_err(|_| parse_err(format!("[grid] cells must be positive, got {cells}")))?;
    if cells < crate::model::MIN_CELLS {
        return Err(Error::Config(format!("[grid] cells must be at least {}, got {cells}", crate::model::MIN_CELLS)));
    }
    if let SourceField::Sampled(v) = &spec.source {
        if v.len() != cells {
            return Err(Error::Config(format!("[source] {} samples for {cells} cells", v.len())));
        }
    }

    let out = section(&root, "output");
    let output = OutputConfig {
        dir: out.string("dir")?.map(PathBuf::from),
        stem: out.string("stem")?.unwrap_or(DEFAULT_STEM).to_string(),
    };
    let run = section(&root, "run");
    let seed = run.int("seed")?.map_or(Ok(DEFAULT_SEED), |s| {
        u64::try_from(s).map_err(|_| parse_err(format!("[run] seed must be nonnegative, got {s}")))
    })?;
    let suite = run.string("suite")?.unwrap_or("core").parse()?;

    Ok(RunConfig { spec, solver, cells, output, seed, suite })
}
