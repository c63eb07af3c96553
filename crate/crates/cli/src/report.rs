//! Bit-stable report writers: sorted keys and floats rounded to 12
//! significant digits.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;

use crate::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub config: BTreeMap<String, Value>,
    pub input_hashes: BTreeMap<String, String>,
    pub seed: u64,
    pub toolkit_version: String,
}

/// Rounds to 12 significant digits and prints the shortest form that
/// parses back to the rounded value.
pub fn format_float(x: f64) -> String {
    if !x.is_finite() {
        return if x.is_nan() { "nan".into() } else if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let rounded: f64 = format!("{x:.11e}").parse().expect("formatted float parses");
    if rounded == 0.0 {
        return "0".into();
    }
    format!("{rounded}")
}

fn json_number(x: f64) -> String {
    if x.is_finite() {
        format_float(x)
    } else {
        "null".into()
    }
}

/// Compact canonical JSON of any serializable payload.
pub fn to_canonical_json<T: Serialize>(payload: &T) -> CliResult<String> {
    let v = serde_json::to_value(payload).map_err(|e| CliError::Usage(format!("unserializable report: {e}")))?;
    let mut out = String::new();
    write_value(&v, &mut out, None, 0);
    Ok(out)
}

/// Indented canonical JSON, newline-terminated.
pub fn to_pretty_json<T: Serialize>(payload: &T) -> CliResult<String> {
    let v = serde_json::to_value(payload).map_err(|e| CliError::Usage(format!("unserializable report: {e}")))?;
    let mut out = String::new();
    write_value(&v, &mut out, Some(2), 0);
    out.push('\n');
    Ok(out)
}

fn write_value(v: &Value, out: &mut String, indent: Option<usize>, depth: usize) {
    let newline = |out: &mut String, d: usize| {
        if let Some(step) = indent {
            out.push('\n');
            out.extend(std::iter::repeat_n(' ', step * d));
        }
    };
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if n.is_f64() {
                out.push_str(&json_number(n.as_f64().unwrap_or(f64::NAN)));
            } else {
                out.push_str(&n.to_string());
            }
        }
        Value::String(s) => out.push_str(&Value::String(s.clone()).to_string()),
        Value::Array(items) => {
            if items.is_empty() {
                out.push_str("[]");
                return;
            }
            out.push('[');
            // Scalar arrays stay on one line.
            let flat = items.iter().all(|x| !x.is_array() && !x.is_object());
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                    if flat && indent.is_some() {
                        out.push(' ');
                    }
                }
                if !flat {
                    newline(out, depth + 1);
                }
                write_value(item, out, indent, depth + 1);
            }
            if !flat {
                newline(out, depth);
            }
            out.push(']');
        }
        Value::Object(map) => {
            if map.is_empty() {
                out.push_str("{}");
                return;
            }
            let mut keys: Vec<&String> = map.keys().collect();
            keys.sort();
            out.push('{');
            for (i, k) in keys.into_iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                newline(out, depth + 1);
                out.push_str(&Value::String(k.clone()).to_string());
                out.push(':');
                if indent.is_some() {
                    out.push(' ');
                }
                write_value(&map[k], out, indent, depth + 1);
            }
            newline(out, depth);
            out.push('}');
        }
    }
}

/// One compact JSON object per line.
pub fn to_jsonl<T: Serialize>(rows: &[T]) -> CliResult<String> {
    let mut out = String::new();
    for r in rows {
        out.push_str(&to_canonical_json(r)?);
        out.push('\n');
    }
    Ok(out)
}

/// Tab-separated table with a header row.
pub fn to_tsv(header: &[&str], rows: &[Vec<Cell>]) -> String {
    let mut out = header.join("\t");
    out.push('\n');
    for row in rows {
        let cells: Vec<String> = row.iter().map(Cell::render).collect();
        out.push_str(&cells.join("\t"));
        out.push('\n');
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Float(f64),
    Int(i64),
    Text(String),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Float(x) => format_float(*x),
            Cell::Int(i) => i.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }
}

/// CSV of a matrix, one row per line, 12 significant digits.
pub fn to_csv(m: &ndarray::Array2<f64>) -> String {
    let mut out = String::new();
    for row in m.rows() {
        let cells: Vec<String> = row.iter().map(|&x| format_float(x)).collect();
        let _ = writeln!(out, "{}", cells.join(","));
    }
    out
}

pub fn write_file(path: &Path, contents: &str) -> CliResult<()> {
    fs::write(path, contents).map_err(|source| CliError::Write {
        path: path.display().to_string(),
        source,
    })
}

/// `<path>.manifest.json`, written beside outputs that cannot embed one.
pub fn sidecar_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".manifest.json");
    PathBuf::from(s)
}

pub fn write_sidecar(path: &Path, manifest: &RunManifest) -> CliResult<()> {
    write_file(&sidecar_path(path), &to_pretty_json(manifest)?)
}

/// Writes a payload with the manifest embedded under `manifest`.
pub fn write_json_with_manifest<T: Serialize>(path: &Path, payload: &T, manifest: &RunManifest) -> CliResult<()> {
    let mut v = serde_json::to_value(payload).map_err(|e| CliError::Usage(format!("unserializable report: {e}")))?;
    match &mut v {
        Value::Object(map) => {
            map.insert(
                "manifest".into(),
                serde_json::to_value(manifest).map_err(|e| CliError::Usage(e.to_string()))?,
            );
        }
        _ => return Err(CliError::Usage("report payload must be an object".into())),
    }
    write_file(path, &to_pretty_json(&v)?)
}
