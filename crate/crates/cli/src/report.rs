//! Machine-readable reports with a human-readable rendering. Reports
//! contain no clocks or paths, so a fixed input and seed always produce
//! byte-identical output.

use crate::instance::{self, InstanceDocument};
use excat_core::backend::{Mor, Obj};
use excat_core::complex::{ChainMap, Complex, Homotopy};
use serde::Serialize;
use serde_json::{json, Value};

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub schema_version: String,
    pub op: String,
    pub status: String, // "ok" | "domain-error" | "invalid"
    #[serde(skip_serializing_if = "Option::is_none")]
    pub result: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl Report {
    pub fn ok(op: &str, result: Value) -> Report {
        Report {
            schema_version: instance::SCHEMA_VERSION.into(),
            op: op.into(),
            status: "ok".into(),
            result: Some(result),
            error: None,
        }
    }

    pub fn domain_error(op: &str, message: String, detail: Option<Value>) -> Report {
        Report {
            schema_version: instance::SCHEMA_VERSION.into(),
            op: op.into(),
            status: "domain-error".into(),
            result: detail,
            error: Some(message),
        }
    }

    pub fn invalid(op: &str, message: String) -> Report {
        Report {
            schema_version: instance::SCHEMA_VERSION.into(),
            op: op.into(),
            status: "invalid".into(),
            result: None,
            error: Some(message),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{}: {}\n", self.op, self.status);
        if let Some(err) = &self.error {
            out.push_str(&format!("  error: {err}\n"));
        }
        if let Some(res) = &self.result {
            out.push_str(&render_value(res, 1));
        }
        out
    }
}

fn render_value(v: &Value, indent: usize) -> String {
    let pad = "  ".repeat(indent);
    match v {
        Value::Object(map) => {
            let mut out = String::new();
            for (k, val) in map {
                match val {
                    Value::Object(_) | Value::Array(_) => {
                        out.push_str(&format!("{pad}{k}:\n"));
                        out.push_str(&render_value(val, indent + 1));
                    }
                    _ => out.push_str(&format!("{pad}{k}: {val}\n")),
                }
            }
            out
        }
        Value::Array(items) => {
            let mut out = String::new();
            for item in items {
                match item {
                    Value::Object(_) | Value::Array(_) => {
                        out.push_str(&format!("{pad}-\n"));
                        out.push_str(&render_value(item, indent + 1));
                    }
                    _ => out.push_str(&format!("{pad}- {item}\n")),
                }
            }
            out
        }
        _ => format!("{pad}{v}\n"),
    }
}

pub fn obj_json(o: &Obj) -> Value {
    serde_json::to_value(instance::object_spec(o)).expect("object serializes")
}

pub fn mor_json(f: &Mor) -> Value {
    let spec = instance::morphism_spec(f, "src", "dst");
    json!({
        "source": obj_json(&f.src),
        "target": obj_json(&f.dst),
        "data": spec.matrix.map(|m| serde_json::to_value(m).unwrap())
            .or_else(|| spec.entries.map(|e| serde_json::to_value(e).unwrap())),
    })
}

pub fn complex_json(c: &Complex) -> Value {
    json!({
        "lo": c.lo,
        "entries": c.entries.iter().map(obj_json).collect::<Vec<_>>(),
        "differentials": c.diffs.iter().map(mor_json).collect::<Vec<_>>(),
    })
}

pub fn chain_map_json(f: &ChainMap) -> Value {
    let comps: Vec<Value> = (f.src.lo.min(f.dst.lo)..=f.src.hi().max(f.dst.hi()))
        .map(|i| json!({ "degree": i, "map": mor_json(&f.at(i)) }))
        .collect();
    json!({ "components": comps })
}

pub fn homotopy_json(h: &Homotopy) -> Value {
    let comps: Vec<Value> =
        h.comps.iter().map(|(i, m)| json!({ "degree": i, "map": mor_json(m) })).collect();
    json!({ "components": comps })
}

pub fn instance_json(doc: &InstanceDocument) -> Value {
    serde_json::to_value(doc).expect("instance serializes")
}
