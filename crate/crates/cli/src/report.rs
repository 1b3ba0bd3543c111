//! JSON report pieces shared by the subcommands.
//!
//! Every report is an object with `schema_version`, `command` and `caps`;
//! exact values are `"p/q"` strings with a `*_decimal` float alongside, and
//! ratios are `"p/q"` or `"inf"`.

use serde::Serialize;
use serde_json::{json, Value as Json};

use seqdict::value::{to_f64, to_pq};
use seqdict::welfare::PosdRatio;
use seqdict::{Caps, Value};

use crate::instance::SCHEMA_VERSION;

#[derive(Debug, Clone, Copy, Serialize)]
pub struct CapsJson {
    pub factorial: usize,
    pub exponential: usize,
    pub monotone: usize,
}

impl From<&Caps> for CapsJson {
    fn from(c: &Caps) -> Self {
        CapsJson { factorial: c.factorial, exponential: c.exponential, monotone: c.monotone }
    }
}

pub fn pq(v: &Value) -> String {
    to_pq(v)
}

pub fn ratio_str(r: &PosdRatio) -> String {
    match r {
        PosdRatio::Finite(v) => to_pq(v),
        PosdRatio::Infinite => "inf".into(),
    }
}

pub fn ratio_f64(r: &PosdRatio) -> f64 {
    match r {
        PosdRatio::Finite(v) => to_f64(v),
        PosdRatio::Infinite => f64::INFINITY,
    }
}

/// Adds the common header fields to a report object.
pub fn envelope(command: &str, caps: &Caps, body: Json) -> Json {
    let mut out = json!({
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "caps": CapsJson::from(caps),
    });
    if let (Some(o), Json::Object(b)) = (out.as_object_mut(), body) {
        o.extend(b);
    }
    out
}

pub fn to_pretty(j: &Json) -> String {
    serde_json::to_string_pretty(j).expect("JSON values always serialize")
}

/// Fields every report of `command` must carry, with their JSON types.
pub fn required_fields(command: &str) -> &'static [(&'static str, &'static str)] {
    const COMMON: [(&str, &str); 3] = [("schema_version", "number"), ("command", "string"), ("caps", "object")];
    match command {
        "run" => &[
            ("schema_version", "number"),
            ("command", "string"),
            ("caps", "object"),
            ("kind", "string"),
            ("n", "number"),
            ("algorithm", "string"),
            ("seed", "number"),
            ("sequence", "array"),
            ("welfare", "string"),
            ("welfare_decimal", "number"),
            ("queries", "number"),
            ("distinct_queries", "number"),
        ],
        "posd" => &[
            ("schema_version", "number"),
            ("command", "string"),
            ("caps", "object"),
            ("kind", "string"),
            ("n", "number"),
            ("optimum", "string"),
            ("best_welfare", "string"),
            ("best_sequence", "array"),
            ("ratio", "string"),
        ],
        "verify" => &[
            ("schema_version", "number"),
            ("command", "string"),
            ("caps", "object"),
            ("suite", "string"),
            ("seed", "number"),
            ("passed", "boolean"),
            ("checks", "array"),
        ],
        _ => &COMMON,
    }
}

fn type_name(v: &Json) -> &'static str {
    match v {
        Json::Null => "null",
        Json::Bool(_) => "boolean",
        Json::Number(_) => "number",
        Json::String(_) => "string",
        Json::Array(_) => "array",
        Json::Object(_) => "object",
    }
}

/// Checks a report against [`required_fields`]; returns the problems found.
pub fn validate(report: &Json) -> Vec<String> {
    let Some(obj) = report.as_object() else {
        return vec!["report is not an object".into()];
    };
    let command = obj.get("command").and_then(Json::as_str).unwrap_or("");
    let mut problems = Vec::new();
    for (field, ty) in required_fields(command) {
        match obj.get(*field) {
            None => problems.push(format!("missing {field}")),
            Some(v) if type_name(v) != *ty => problems.push(format!("{field} should be {ty}, is {}", type_name(v))),
            _ => {}
        }
    }
    if command == "verify" {
        for (k, c) in obj.get("checks").and_then(Json::as_array).into_iter().flatten().enumerate() {
            if c.get("name").and_then(Json::as_str).is_none() || c.get("passed").and_then(Json::as_bool).is_none() {
                problems.push(format!("check {k} lacks name or passed"));
            }
        }
    }
    problems
}
