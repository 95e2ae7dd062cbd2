//! Scenario files: named declarations plus an ordered list of checks.
//!
//! Any string of the form `"@name"` inside `params` (or inside another
//! declaration) is replaced by the declaration `name` before the check runs.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::Value;

pub const SCENARIO_VERSION: u32 = 1;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(default = "default_version")]
    pub scenario_version: u32,
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub declarations: BTreeMap<String, Value>,
    #[serde(default)]
    pub checks: Vec<CheckDecl>,
}

fn default_version() -> u32 {
    SCENARIO_VERSION
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckDecl {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
    pub op: String,
    /// Overrides every tolerance of the check.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    /// Per-assertion overrides, keyed by assertion name.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub tolerances: BTreeMap<String, f64>,
    #[serde(default)]
    pub params: Value,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ScenarioError {
    /// Malformed JSON or a schema mismatch at a byte offset.
    Parse { offset: usize, line: usize, column: usize, message: String },
    /// Well-formed JSON that fails validation at a JSON path.
    Invalid { path: String, message: String },
}

impl fmt::Display for ScenarioError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScenarioError::Parse { offset, line, column, message } => {
                write!(f, "parse error at byte {offset} (line {line}, column {column}): {message}")
            }
            ScenarioError::Invalid { path, message } => write!(f, "invalid scenario at {path}: {message}"),
        }
    }
}

impl std::error::Error for ScenarioError {}

fn byte_offset(src: &str, line: usize, column: usize) -> usize {
    if line == 0 {
        return 0;
    }
    let start: usize = src.split_inclusive('\n').take(line - 1).map(str::len).sum();
    (start + column.saturating_sub(1)).min(src.len())
}

impl Scenario {
    pub fn parse(src: &str) -> Result<Scenario, ScenarioError> {
        let sc: Scenario = serde_json::from_str(src).map_err(|e| ScenarioError::Parse {
            offset: byte_offset(src, e.line(), e.column()),
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        sc.validate_header()?;
        Ok(sc)
    }

    pub fn empty(name: &str) -> Scenario {
        Scenario {
            scenario_version: SCENARIO_VERSION,
            name: name.into(),
            description: None,
            seed: 0,
            declarations: BTreeMap::new(),
            checks: Vec::new(),
        }
    }

    fn validate_header(&self) -> Result<(), ScenarioError> {
        if self.scenario_version != SCENARIO_VERSION {
            return Err(ScenarioError::Invalid {
                path: "scenario_version".into(),
                message: format!("unsupported version {} (expected {SCENARIO_VERSION})", self.scenario_version),
            });
        }
        for (i, ch) in self.checks.iter().enumerate() {
            let tols = ch.tolerance.iter().chain(ch.tolerances.values());
            for t in tols {
                if !(*t > 0.0 && t.is_finite()) {
                    return Err(ScenarioError::Invalid { path: format!("checks[{i}].tolerance"), message: "tolerances must be positive".into() });
                }
            }
        }
        let mut seen = std::collections::BTreeSet::new();
        for i in 0..self.checks.len() {
            let id = self.check_id(i);
            if !seen.insert(id.clone()) {
                return Err(ScenarioError::Invalid { path: format!("checks[{i}].id"), message: format!("duplicate check id {id:?}") });
            }
        }
        Ok(())
    }

    pub fn check_id(&self, i: usize) -> String {
        let ch = &self.checks[i];
        ch.id.clone().unwrap_or_else(|| format!("{}#{i}", ch.op))
    }

    /// `params` of check `i` with every reference substituted.
    pub fn resolved_params(&self, i: usize) -> Result<Value, ScenarioError> {
        let mut stack = Vec::new();
        resolve(&self.checks[i].params, &self.declarations, &mut stack, &format!("checks[{i}].params"))
    }
}

fn resolve(v: &Value, decls: &BTreeMap<String, Value>, stack: &mut Vec<String>, path: &str) -> Result<Value, ScenarioError> {
    match v {
        Value::String(s) if s.starts_with('@') => {
            let name = &s[1..];
            let Some(target) = decls.get(name) else {
                return Err(ScenarioError::Invalid { path: path.into(), message: format!("unresolved reference {s}") });
            };
            if stack.iter().any(|n| n == name) {
                return Err(ScenarioError::Invalid { path: path.into(), message: format!("cyclic reference through {s}") });
            }
            stack.push(name.to_string());
            let out = resolve(target, decls, stack, &format!("declarations.{name}"));
            stack.pop();
            out
        }
        Value::Array(items) => {
            items.iter().enumerate().map(|(k, x)| resolve(x, decls, stack, &format!("{path}[{k}]"))).collect::<Result<Vec<_>, _>>().map(Value::Array)
        }
        Value::Object(map) => {
            let mut out = serde_json::Map::new();
            for (k, x) in map {
                out.insert(k.clone(), resolve(x, decls, stack, &format!("{path}.{k}"))?);
            }
            Ok(Value::Object(out))
        }
        other => Ok(other.clone()),
    }
}
