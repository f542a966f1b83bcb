//! Report rendering: JSON for machines, sectioned `key = value` text for people.

use std::fmt::Write as _;

use serde_json::Value;

use super::scenario::ScenarioReport;
use crate::error::{Error, Result};

pub fn to_json(report: &ScenarioReport) -> Result<String> {
    serde_json::to_string_pretty(report).map_err(|e| Error::InvalidState(format!("serializing report: {e}")))
}

pub fn from_json(text: &str) -> Result<ScenarioReport> {
    serde_json::from_str(text).map_err(|e| Error::format(format!("line {}", e.line()), e.to_string()))
}

/// The report without its `timing` section. Two runs of the same config and
/// seed must agree on this value exactly.
pub fn deterministic_view(report: &ScenarioReport) -> Result<Value> {
    let mut value = serde_json::to_value(report).map_err(|e| Error::InvalidState(e.to_string()))?;
    if let Value::Object(map) = &mut value {
        map.remove("timing");
    }
    Ok(value)
}

pub fn to_text(report: &ScenarioReport) -> Result<String> {
    let value = serde_json::to_value(report).map_err(|e| Error::InvalidState(e.to_string()))?;
    let mut out = String::new();
    let Value::Object(top) = &value else {
        return Ok(out);
    };
    scalars(&mut out, top);
    for (key, v) in top {
        section(&mut out, key, v);
    }
    Ok(out)
}

fn scalars(out: &mut String, map: &serde_json::Map<String, Value>) {
    for (key, v) in map {
        if let Some(s) = render_scalar(v) {
            let _ = writeln!(out, "{key} = {s}");
        }
    }
}

fn section(out: &mut String, path: &str, value: &Value) {
    match value {
        Value::Object(map) => {
            let _ = writeln!(out, "\n[{path}]");
            scalars(out, map);
            for (key, v) in map {
                section(out, &format!("{path}.{key}"), v);
            }
        }
        Value::Array(items) if items.iter().any(|v| v.is_object() || v.is_array()) => {
            for (i, v) in items.iter().enumerate() {
                section(out, &format!("{path}.{i}"), v);
            }
        }
        _ => {}
    }
}

fn render_scalar(v: &Value) -> Option<String> {
    match v {
        Value::Null => Some("none".into()),
        Value::Bool(b) => Some(b.to_string()),
        Value::Number(n) => Some(n.to_string()),
        Value::String(s) => Some(s.clone()),
        Value::Array(items) if items.iter().all(|v| !v.is_object() && !v.is_array()) => Some(format!(
            "[{}]",
            items
                .iter()
                .filter_map(render_scalar)
                .collect::<Vec<_>>()
                .join(", ")
        )),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::config::{ScenarioConfig, ScenarioKind};
    use crate::bench::scenario::run_scenario;

    fn report() -> ScenarioReport {
        run_scenario(&ScenarioConfig {
            n_items: 500,
            seq_len: 12,
            queries: 120,
            run_seconds: 0.0,
            bucket_sweep: vec![1, 4],
            ..ScenarioConfig::defaults(ScenarioKind::TalSweep, 3)
        })
        .unwrap()
    }

    #[test]
    fn json_round_trip() {
        let r = report();
        let text = to_json(&r).unwrap();
        assert_eq!(deterministic_view(&from_json(&text).unwrap()).unwrap(), deterministic_view(&r).unwrap());
    }

    #[test]
    fn text_has_sections() {
        let text = to_text(&report()).unwrap();
        assert!(text.starts_with("schema_version = 1\n"));
        for header in ["[config]", "[index]", "[results]", "[results.rows.0]", "[determinism]", "[timing]"] {
            assert!(text.contains(header), "missing {header}\n{text}");
        }
        assert!(text.contains("bucket_sweep = [1, 4]"));
    }

    #[test]
    fn deterministic_view_drops_timing() {
        let v = deterministic_view(&report()).unwrap();
        assert!(v.get("timing").is_none());
        assert!(v.get("results").is_some());
    }
}
