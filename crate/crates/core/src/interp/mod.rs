//! Evaluators: the global oracle over choreographies, the distributed
//! evaluator over projected units, and the harness comparing the two.

pub mod distributed;
pub mod global;

use std::collections::BTreeMap;
use std::path::Path;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::check::canonical;
use crate::prelude::Frontend;
use crate::project::project_frontend;
use crate::runtime::{Registry, Value, View};
use crate::syntax::{Diagnostic, LocalTE, TypeExpr};

pub use distributed::eval_distributed;
pub use global::eval_global;

/// Deadline used when none is configured.
pub const DEFAULT_DEADLINE: Duration = Duration::from_secs(10);

#[derive(Debug, Error)]
pub enum ManifestError {
    #[error("cannot read manifest {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("malformed manifest {path}: {source}")]
    Json { path: String, source: serde_json::Error },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntryPoint {
    pub class: String,
    pub method: String,
}

/// Arguments of one constructor or method invocation.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Invocation {
    /// Channel parameter name to registry key.
    #[serde(default)]
    pub channels: BTreeMap<String, String>,
    /// Literals per role, consumed in parameter order by the parameters
    /// located at that role.
    #[serde(default)]
    pub args: BTreeMap<String, Vec<serde_json::Value>>,
}

/// How to start an execution: the entry class and method, the roles taking
/// part, and the arguments of the constructor (absent for static entries)
/// and the method.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub entry: EntryPoint,
    pub roles: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constructor: Option<Invocation>,
    #[serde(default)]
    pub method: Invocation,
}

impl Manifest {
    pub fn load(path: &Path) -> Result<Manifest, ManifestError> {
        let p = path.display().to_string();
        let text = std::fs::read_to_string(path).map_err(|source| ManifestError::Io { path: p.clone(), source })?;
        serde_json::from_str(&text).map_err(|source| ManifestError::Json { path: p, source })
    }

    /// Copy with the method's literals for `role` replaced.
    pub fn with_args(&self, role: &str, args: Vec<serde_json::Value>) -> Manifest {
        let mut m = self.clone();
        m.method.args.insert(role.to_string(), args);
        m
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum Status {
    Ok,
    DeadlockTimeout { blocked: Vec<String> },
    Error { role: Option<String>, message: String },
}

#[derive(Debug, Clone, Serialize)]
pub struct ExecutionReport {
    pub returns: BTreeMap<String, View>,
    pub transcripts: BTreeMap<String, Vec<String>>,
    pub duration_ms: f64,
    #[serde(flatten)]
    pub status: Status,
}

impl ExecutionReport {
    pub fn is_ok(&self) -> bool {
        self.status == Status::Ok
    }
}

/// Type shape used to turn manifest literals into values.
#[derive(Debug, Clone)]
pub(crate) struct Shape {
    name: String,
    args: Vec<Shape>,
}

impl Shape {
    pub(crate) fn of_te(te: &TypeExpr) -> Shape {
        match te {
            TypeExpr::Void(_) => Shape { name: "void".into(), args: Vec::new() },
            TypeExpr::Named(n) => {
                Shape { name: canonical(&n.name.name).to_string(), args: n.args.iter().map(Shape::of_te).collect() }
            }
        }
    }

    pub(crate) fn of_local(te: &LocalTE) -> Shape {
        match te {
            LocalTE::Void => Shape { name: "void".into(), args: Vec::new() },
            LocalTE::Named(n, args) => {
                Shape { name: canonical(n).to_string(), args: args.iter().map(Shape::of_local).collect() }
            }
        }
    }
}

/// Converts a manifest literal to a value of the given shape.
pub(crate) fn from_json(v: &serde_json::Value, shape: &Shape) -> Result<Value, String> {
    use serde_json::Value as J;
    let bad = || format!("cannot read {v} as {}", shape.name);
    Ok(match (shape.name.as_str(), v) {
        (_, J::Null) if shape.name != "Optional" => Value::Null,
        ("String", J::String(s)) => Value::str(s),
        ("Integer", J::Number(n)) => Value::Int(n.as_i64().and_then(|i| i32::try_from(i).ok()).ok_or_else(bad)?),
        ("Long", J::Number(n)) => Value::Long(n.as_i64().ok_or_else(bad)?),
        ("Double", J::Number(n)) => Value::Double(n.as_f64().ok_or_else(bad)?),
        ("Boolean", J::Bool(b)) => Value::Bool(*b),
        ("List" | "ArrayList", J::Array(items)) => {
            let elem = shape.args.first().cloned().unwrap_or(Shape { name: "Object".into(), args: Vec::new() });
            Value::list(items.iter().map(|x| from_json(x, &elem)).collect::<Result<_, _>>()?)
        }
        ("Optional", J::Null) => Value::Optional(None),
        ("Optional", x) => {
            let elem = shape.args.first().cloned().unwrap_or(Shape { name: "Object".into(), args: Vec::new() });
            Value::Optional(Some(Box::new(from_json(x, &elem)?)))
        }
        ("Object", x) => untyped(x),
        _ => return Err(bad()),
    })
}

fn untyped(v: &serde_json::Value) -> Value {
    use serde_json::Value as J;
    match v {
        J::Null => Value::Null,
        J::Bool(b) => Value::Bool(*b),
        J::Number(n) => match n.as_i64() {
            Some(i) => i32::try_from(i).map(Value::Int).unwrap_or(Value::Long(i)),
            None => Value::Double(n.as_f64().unwrap_or(f64::NAN)),
        },
        J::String(s) => Value::str(s),
        J::Array(items) => Value::list(items.iter().map(untyped).collect()),
        J::Object(_) => Value::str(&v.to_string()),
    }
}

/// Outcome of running a choreography both ways on the same inputs.
#[derive(Debug, Clone, Serialize)]
pub struct Comparison {
    pub global: ExecutionReport,
    pub distributed: ExecutionReport,
    pub diffs: Vec<String>,
}

impl Comparison {
    pub fn agrees(&self) -> bool {
        self.diffs.is_empty()
    }
}

/// Differences between two reports: status, then per-role returns and
/// transcripts.
pub fn compare(global: &ExecutionReport, distributed: &ExecutionReport, roles: &[String]) -> Vec<String> {
    let mut diffs = Vec::new();
    if !global.is_ok() {
        diffs.push(format!("global run failed: {:?}", global.status));
    }
    if !distributed.is_ok() {
        diffs.push(format!("distributed run failed: {:?}", distributed.status));
    }
    for r in roles {
        let (g, d) = (global.returns.get(r), distributed.returns.get(r));
        if g != d {
            let show = |v: Option<&View>| v.map(|v| v.to_string()).unwrap_or_else(|| "(none)".into());
            diffs.push(format!("return at {r}: global {} vs distributed {}", show(g), show(d)));
        }
        let empty = Vec::new();
        let (gt, dt) = (global.transcripts.get(r).unwrap_or(&empty), distributed.transcripts.get(r).unwrap_or(&empty));
        if gt != dt {
            let i = gt.iter().zip(dt).position(|(a, b)| a != b).unwrap_or(gt.len().min(dt.len()));
            diffs.push(format!(
                "transcript at {r} differs at line {}: global {:?} vs distributed {:?}",
                i + 1,
                gt.get(i),
                dt.get(i)
            ));
        }
    }
    diffs
}

/// Runs `manifest` with the oracle and with the projected units.
pub fn differential_run(
    front: &Frontend,
    manifest: &Manifest,
    deadline: Duration,
) -> Result<Comparison, Vec<Diagnostic>> {
    let projection = project_frontend(front);
    if projection.has_errors() {
        return Err(projection.diags);
    }
    let global = eval_global(&front.program, &front.checked, manifest, deadline);
    let units = projection.program();
    let distributed = eval_distributed(&units, manifest, &Registry::new(), deadline);
    let diffs = compare(&global, &distributed, &manifest.roles);
    Ok(Comparison { global, distributed, diffs })
}

/// Stack size for evaluator threads; recursion in choreographies maps to
/// recursion in the evaluators.
pub(crate) const STACK: usize = 64 << 20;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn manifest_round_trips() {
        let text = r#"{
            "entry": {"class": "Mergesort", "method": "sort"},
            "roles": ["A", "B", "C"],
            "constructor": {"channels": {"ch_AB": "ab", "ch_BC": "bc", "ch_CA": "ca"}},
            "method": {"args": {"A": [[15, 3, 14]]}}
        }"#;
        let m: Manifest = serde_json::from_str(text).unwrap();
        assert_eq!(m.roles, ["A", "B", "C"]);
        assert_eq!(m.constructor.as_ref().unwrap().channels["ch_BC"], "bc");
        let again: Manifest = serde_json::from_str(&serde_json::to_string(&m).unwrap()).unwrap();
        assert_eq!(again, m);
    }

    #[test]
    fn literals_follow_declared_types() {
        let list = Shape { name: "List".into(), args: vec![Shape { name: "Integer".into(), args: vec![] }] };
        let v = from_json(&serde_json::json!([3, 1]), &list).unwrap();
        assert_eq!(v, Value::list(vec![Value::Int(3), Value::Int(1)]));
        let long = Shape { name: "Long".into(), args: vec![] };
        assert_eq!(from_json(&serde_json::json!(7), &long).unwrap(), Value::Long(7));
        assert!(from_json(&serde_json::json!("x"), &long).is_err());
    }
}
