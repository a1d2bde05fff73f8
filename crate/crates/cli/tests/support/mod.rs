//! Shared helpers for the CLI integration tests.
//!
//! `validate` checks a JSON value against the subset of JSON Schema used by
//! the shipped schema files: `$ref` into `$defs`, `type`, `const`, `enum`,
//! `properties`, `required`, `additionalProperties`, `propertyNames`,
//! `items`, `minItems`, `maxItems`, `minimum`, `maximum` and `oneOf`.
//! `pattern` is not evaluated; rational strings are checked by the fixture
//! parser instead.

#![allow(dead_code)]

use std::path::{Path, PathBuf};

use serde_json::Value;

pub fn repo_root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

pub fn load_json(path: &Path) -> Value {
    let text = std::fs::read_to_string(path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    serde_json::from_str(&text).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

pub fn binary() -> &'static str {
    env!("CARGO_BIN_EXE_instanton-lab")
}

const KNOWN: [&str; 19] = [
    "$schema",
    "$id",
    "$defs",
    "$ref",
    "title",
    "description",
    "type",
    "const",
    "enum",
    "properties",
    "required",
    "additionalProperties",
    "propertyNames",
    "items",
    "minItems",
    "maxItems",
    "minimum",
    "maximum",
    "oneOf",
];

fn type_matches(t: &str, v: &Value) -> bool {
    match t {
        "object" => v.is_object(),
        "array" => v.is_array(),
        "string" => v.is_string(),
        "boolean" => v.is_boolean(),
        "null" => v.is_null(),
        "number" => v.is_number(),
        "integer" => v.is_i64() || v.is_u64(),
        _ => false,
    }
}

struct Validator<'a> {
    root: &'a Value,
    errors: Vec<String>,
}

impl Validator<'_> {
    fn resolve(&self, reference: &str) -> &Value {
        let name = reference.strip_prefix("#/$defs/").unwrap_or_else(|| panic!("unsupported $ref {reference}"));
        &self.root["$defs"][name]
    }

    fn check(&mut self, schema: &Value, v: &Value, path: &str) {
        let Some(obj) = schema.as_object() else { return };
        for k in obj.keys() {
            assert!(KNOWN.contains(&k.as_str()) || k == "pattern", "schema keyword {k} not supported");
        }
        if let Some(r) = obj.get("$ref").and_then(Value::as_str) {
            let target = self.resolve(r).clone();
            self.check(&target, v, path);
        }
        if let Some(t) = obj.get("type") {
            let ok = match t {
                Value::String(s) => type_matches(s, v),
                Value::Array(ts) => ts.iter().filter_map(Value::as_str).any(|s| type_matches(s, v)),
                _ => true,
            };
            if !ok {
                self.errors.push(format!("{path}: expected type {t}, got {v}"));
                return;
            }
        }
        if let Some(c) = obj.get("const") {
            if c != v {
                self.errors.push(format!("{path}: expected {c}, got {v}"));
            }
        }
        if let Some(Value::Array(options)) = obj.get("enum") {
            if !options.contains(v) {
                self.errors.push(format!("{path}: {v} not in enum"));
            }
        }
        if let Some(min) = obj.get("minimum").and_then(Value::as_f64) {
            if v.as_f64().is_some_and(|x| x < min) {
                self.errors.push(format!("{path}: {v} below minimum {min}"));
            }
        }
        if let Some(max) = obj.get("maximum").and_then(Value::as_f64) {
            if v.as_f64().is_some_and(|x| x > max) {
                self.errors.push(format!("{path}: {v} above maximum {max}"));
            }
        }
        if let Some(Value::Array(options)) = obj.get("oneOf") {
            let passing = options
                .iter()
                .filter(|o| {
                    let mut sub = Validator { root: self.root, errors: Vec::new() };
                    sub.check(o, v, path);
                    sub.errors.is_empty()
                })
                .count();
            if passing != 1 {
                self.errors.push(format!("{path}: matches {passing} oneOf branches"));
            }
        }
        if let Value::Object(map) = v {
            let props = obj.get("properties").and_then(Value::as_object);
            if let Some(Value::Array(req)) = obj.get("required") {
                for r in req.iter().filter_map(Value::as_str) {
                    if !map.contains_key(r) {
                        self.errors.push(format!("{path}: missing {r}"));
                    }
                }
            }
            for (k, val) in map {
                let sub = format!("{path}/{k}");
                if let Some(names) = obj.get("propertyNames") {
                    self.check(names, &Value::String(k.clone()), &sub);
                }
                match props.and_then(|p| p.get(k)) {
                    Some(s) => self.check(s, val, &sub),
                    None => match obj.get("additionalProperties") {
                        Some(Value::Bool(false)) => self.errors.push(format!("{sub}: unexpected property")),
                        Some(s @ Value::Object(_)) => self.check(s, val, &sub),
                        _ => {}
                    },
                }
            }
        }
        if let Value::Array(items) = v {
            if let Some(min) = obj.get("minItems").and_then(Value::as_u64) {
                if (items.len() as u64) < min {
                    self.errors.push(format!("{path}: fewer than {min} items"));
                }
            }
            if let Some(max) = obj.get("maxItems").and_then(Value::as_u64) {
                if items.len() as u64 > max {
                    self.errors.push(format!("{path}: more than {max} items"));
                }
            }
            if let Some(s) = obj.get("items") {
                for (i, item) in items.iter().enumerate() {
                    self.check(s, item, &format!("{path}/{i}"));
                }
            }
        }
    }
}

/// Violations of `schema` by `value`, one message each; empty when valid.
pub fn validate(schema: &Value, value: &Value) -> Vec<String> {
    let mut v = Validator { root: schema, errors: Vec::new() };
    v.check(schema, value, "");
    v.errors
}

pub fn report_schema() -> Value {
    load_json(&repo_root().join("schemas/report.schema.json"))
}

pub fn fixture_schema() -> Value {
    load_json(&repo_root().join("schemas/lattice_fixture.schema.json"))
}
