//! Run configuration: one JSON document per invocation.
//!
//! ```json
//! {
//!   "experiment": "bh-variance",
//!   "seed": 7,
//!   "parameters": { "n": 100, "nu": [0.1, 1, 10] },
//!   "output": "variance.csv",
//!   "format": "csv"
//! }
//! ```
//!
//! Only `experiment` is mandatory at the top level; each experiment lists
//! its own required and optional parameters (see `qsweep list-experiments`).

use std::fmt;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use serde_json::{Map, Value};

use crate::error::CliError;
use crate::experiments::Experiment;

/// Seed used when neither the file nor `--seed` provides one.
pub const DEFAULT_SEED: u64 = 0x5EED;

const TOP_LEVEL: [&str; 5] = ["experiment", "seed", "parameters", "output", "format"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "csv" => Some(Format::Csv),
            "json" => Some(Format::Json),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub seed: u64,
    pub parameters: Map<String, Value>,
    pub output: Option<PathBuf>,
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Number,
    Integer,
    Text(&'static [&'static str]),
    NumberList,
    IntegerList,
    Profile,
    NumberOrProfile,
}

impl Kind {
    pub fn describe(self) -> String {
        match self {
            Kind::Number => "number".into(),
            Kind::Integer => "non-negative integer".into(),
            Kind::Text(choices) => format!("one of {}", choices.join("|")),
            Kind::NumberList => "array of numbers".into(),
            Kind::IntegerList => "array of non-negative integers".into(),
            Kind::Profile => "profile object".into(),
            Kind::NumberOrProfile => "number or profile object".into(),
        }
    }

    fn accepts(self, v: &Value) -> Result<(), String> {
        let ok = match self {
            Kind::Number => v.is_number(),
            Kind::Integer => v.is_u64(),
            Kind::Text(choices) => v.as_str().is_some_and(|s| choices.contains(&s)),
            Kind::NumberList => v.as_array().is_some_and(|a| a.iter().all(Value::is_number)),
            Kind::IntegerList => v.as_array().is_some_and(|a| a.iter().all(Value::is_u64)),
            Kind::Profile => return ProfileSpec::from_value(v).map(drop),
            Kind::NumberOrProfile => v.is_number() || ProfileSpec::from_value(v).is_ok(),
        };
        if ok {
            Ok(())
        } else {
            Err(self.describe())
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Presence {
    Required,
    Optional,
    /// Default given as a JSON literal.
    Default(&'static str),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Param {
    pub key: &'static str,
    pub kind: Kind,
    pub default: Presence,
    pub doc: &'static str,
}

impl Param {
    pub const fn new(key: &'static str, kind: Kind, default: Presence, doc: &'static str) -> Self {
        Self { key, kind, default, doc }
    }

    /// Type check of a value for this key; the error names the expected type.
    pub fn accepts(&self, v: &Value) -> Result<(), String> {
        self.kind.accepts(v)
    }
}

/// Swept-parameter shapes accepted wherever a profile is expected.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProfileSpec {
    Constant { value: f64 },
    /// `v0 exp(-gamma t)` for `t >= start` (default 0).
    Exponential {
        v0: f64,
        gamma: f64,
        #[serde(default)]
        start: f64,
    },
    /// `v0 (t / t0)^(-x)` for `t >= start` (default `t0`).
    PowerLaw {
        v0: f64,
        t0: f64,
        x: f64,
        start: Option<f64>,
    },
    /// `v0 + rate t` on `[start, end]`.
    Linear { v0: f64, rate: f64, start: f64, end: f64 },
    Tabulated { samples: Vec<(f64, f64)> },
}

impl ProfileSpec {
    fn from_value(v: &Value) -> Result<Self, String> {
        Self::deserialize(v).map_err(|e| format!("profile object ({e})"))
    }

    pub fn build(&self) -> Result<qsweep_core::SweepProfile, qsweep_core::ProfileError> {
        use qsweep_core::{Domain, SweepProfile};
        Ok(match *self {
            ProfileSpec::Constant { value } => SweepProfile::constant(value),
            ProfileSpec::Exponential { v0, gamma, start } => SweepProfile::exponential(v0, gamma, start),
            ProfileSpec::PowerLaw { v0, t0, x, start } => SweepProfile::power_law(v0, t0, x, start.unwrap_or(t0))?,
            ProfileSpec::Linear { v0, rate, start, end } => {
                SweepProfile::new(qsweep_core::Form::Linear { v0, rate }, Domain::new(start, end))?
            }
            ProfileSpec::Tabulated { ref samples } => SweepProfile::tabulated(samples.clone())?,
        })
    }
}

/// Outcome of a schema check.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Report {
    pub warnings: Vec<String>,
    pub errors: Vec<String>,
}

impl Report {
    pub fn is_ok(&self) -> bool {
        self.errors.is_empty()
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter) -> fmt::Result {
        if self.errors.is_empty() && self.warnings.is_empty() {
            return writeln!(f, "ok");
        }
        for w in &self.warnings {
            writeln!(f, "warning: {w}")?;
        }
        for e in &self.errors {
            writeln!(f, "error: {e}")?;
        }
        if self.errors.is_empty() {
            writeln!(f, "ok")?;
        }
        Ok(())
    }
}

/// Parses JSON text, reporting syntax errors with line and column.
pub fn parse_document(text: &str) -> Result<Value, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

/// Schema check of a parsed document. Unknown keys are warnings; missing
/// or mistyped keys are errors.
pub fn check(doc: &Value) -> (Report, Option<ExperimentConfig>) {
    let mut report = Report::default();
    let Some(obj) = doc.as_object() else {
        report.errors.push("top level must be a JSON object".into());
        return (report, None);
    };
    for k in obj.keys().filter(|k| !TOP_LEVEL.contains(&k.as_str())) {
        report.warnings.push(format!("unknown key `{k}`"));
    }

    let experiment = match obj.get("experiment") {
        None => {
            report.errors.push("missing key `experiment`".into());
            None
        }
        Some(v) => match v.as_str().map(Experiment::from_name) {
            Some(Some(e)) => Some(e),
            Some(None) => {
                report.errors.push(format!(
                    "key `experiment`: unknown experiment {v}, expected one of {}",
                    Experiment::names().join("|")
                ));
                None
            }
            None => {
                report.errors.push("key `experiment`: expected string".into());
                None
            }
        },
    };

    let seed = match obj.get("seed") {
        None => Some(DEFAULT_SEED),
        Some(v) => v.as_u64().or_else(|| {
            report.errors.push("key `seed`: expected unsigned 64-bit integer".into());
            None
        }),
    };

    let output = match obj.get("output") {
        None => Some(None),
        Some(Value::String(s)) => Some(Some(PathBuf::from(s))),
        Some(_) => {
            report.errors.push("key `output`: expected string (file path)".into());
            None
        }
    };

    let format = match obj.get("format") {
        None => Some(Format::Csv),
        Some(v) => v.as_str().and_then(Format::parse).or_else(|| {
            report.errors.push("key `format`: expected one of csv|json".into());
            None
        }),
    };

    let empty = Map::new();
    let parameters = match obj.get("parameters") {
        None => Some(&empty),
        Some(Value::Object(m)) => Some(m),
        Some(_) => {
            report.errors.push("key `parameters`: expected object".into());
            None
        }
    };

    if let (Some(exp), Some(params)) = (experiment, parameters) {
        check_parameters(exp, params, &mut report);
    }

    let cfg = match (experiment, seed, parameters, output, format) {
        (Some(experiment), Some(seed), Some(p), Some(output), Some(format)) if report.is_ok() => Some(ExperimentConfig {
            experiment,
            seed,
            parameters: p.clone(),
            output,
            format,
        }),
        _ => None,
    };
    (report, cfg)
}

fn check_parameters(exp: Experiment, params: &Map<String, Value>, report: &mut Report) {
    let schema = exp.params();
    for k in params.keys().filter(|k| !schema.iter().any(|p| p.key == k.as_str())) {
        report.warnings.push(format!("unknown key `parameters.{k}`"));
    }
    for p in schema {
        match params.get(p.key) {
            None if p.default == Presence::Required => {
                report.errors.push(format!("missing key `parameters.{}` ({})", p.key, p.kind.describe()));
            }
            None => {}
            Some(v) => {
                if let Err(expected) = p.accepts(v) {
                    report.errors.push(format!("key `parameters.{}`: expected {expected}", p.key));
                }
            }
        }
    }
}

/// Reads and checks a config file.
pub fn validate_file(path: &Path) -> Result<Report, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    Ok(check(&parse_document(&text)?).0)
}

/// Reads a config file, failing on the first schema error.
pub fn load(path: &Path) -> Result<(ExperimentConfig, Report), CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    from_str(&text)
}

pub fn from_str(text: &str) -> Result<(ExperimentConfig, Report), CliError> {
    let (report, cfg) = check(&parse_document(text)?);
    match cfg {
        Some(c) => Ok((c, report)),
        None => Err(CliError::Schema(report.errors.join("; "))),
    }
}

/// Typed access to an experiment's parameter block, with schema defaults.
pub struct Params<'a> {
    schema: &'static [Param],
    values: &'a Map<String, Value>,
}

impl<'a> Params<'a> {
    pub fn new(schema: &'static [Param], values: &'a Map<String, Value>) -> Self {
        Self { schema, values }
    }

    fn param(&self, key: &str) -> &'static Param {
        self.schema
            .iter()
            .find(|p| p.key == key)
            .unwrap_or_else(|| panic!("parameter `{key}` is not in the schema"))
    }

    fn raw(&self, key: &str) -> Option<Value> {
        if let Some(v) = self.values.get(key) {
            return Some(v.clone());
        }
        match self.param(key).default {
            Presence::Default(lit) => Some(serde_json::from_str(lit).expect("schema default is valid JSON")),
            _ => None,
        }
    }

    fn typed<T: for<'de> Deserialize<'de>>(&self, key: &str) -> Result<Option<T>, CliError> {
        match self.raw(key) {
            None => Ok(None),
            Some(v) => T::deserialize(&v).map(Some).map_err(|_| CliError::WrongType {
                key: format!("parameters.{key}"),
                expected: self.param(key).kind.describe(),
            }),
        }
    }

    fn required<T: for<'de> Deserialize<'de>>(&self, key: &str) -> Result<T, CliError> {
        self.typed(key)?.ok_or_else(|| CliError::Missing(format!("parameters.{key}")))
    }

    pub fn f64(&self, key: &str) -> Result<f64, CliError> {
        self.required(key)
    }

    pub fn opt_f64(&self, key: &str) -> Result<Option<f64>, CliError> {
        self.typed(key)
    }

    pub fn usize(&self, key: &str) -> Result<usize, CliError> {
        self.required(key)
    }

    pub fn text(&self, key: &str) -> Result<String, CliError> {
        self.required(key)
    }

    pub fn f64_list(&self, key: &str) -> Result<Vec<f64>, CliError> {
        self.required(key)
    }

    pub fn opt_f64_list(&self, key: &str) -> Result<Option<Vec<f64>>, CliError> {
        self.typed(key)
    }

    pub fn usize_list(&self, key: &str) -> Result<Vec<usize>, CliError> {
        self.required(key)
    }

    pub fn profile(&self, key: &str) -> Result<qsweep_core::SweepProfile, CliError> {
        let form: ProfileSpec = self.required(key)?;
        form.build().map_err(|e| CliError::Invalid {
            key: format!("parameters.{key}"),
            message: e.to_string(),
        })
    }

    /// A bare number is a constant profile.
    pub fn number_or_profile(&self, key: &str) -> Result<qsweep_core::SweepProfile, CliError> {
        match self.raw(key) {
            Some(Value::Number(n)) => Ok(qsweep_core::SweepProfile::constant(n.as_f64().unwrap_or(f64::NAN))),
            _ => self.profile(key),
        }
    }
}
