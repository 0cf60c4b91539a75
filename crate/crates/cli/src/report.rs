//! Report envelope and output encodings.

use std::path::Path;

use serde::Serialize;
use serde_json::{Map, Number, Value};
use sha2::{Digest, Sha256};

use crate::CliError;

#[derive(Clone, Debug, Serialize)]
pub struct Input {
    pub path: String,
    pub sha256: String,
}

impl Input {
    pub fn read(path: &Path) -> Result<(Self, String), CliError> {
        let bytes = std::fs::read(path).map_err(|e| CliError::Io(path.to_path_buf(), e))?;
        let text = String::from_utf8(bytes.clone())
            .map_err(|_| CliError::Usage(format!("{}: not UTF-8 text", path.display())))?;
        Ok((
            Input {
                path: path.display().to_string(),
                sha256: hex::encode(Sha256::digest(&bytes)),
            },
            text,
        ))
    }
}

/// What every command produces.
pub struct Outcome {
    pub code: i32,
    pub engine: String,
    pub inputs: Vec<Input>,
    pub result: Value,
    pub csv: Vec<Vec<String>>,
    pub text: String,
}

/// Rounds every float to 12 significant digits so reports compare
/// byte for byte.
pub fn round_floats(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().unwrap_or(f64::NAN);
            let r: f64 = format!("{x:.11e}").parse().unwrap_or(x);
            Number::from_f64(r).map_or(Value::Null, Value::Number)
        }
        Value::Array(a) => Value::Array(a.into_iter().map(round_floats).collect()),
        Value::Object(o) => {
            Value::Object(o.into_iter().map(|(k, v)| (k, round_floats(v))).collect())
        }
        other => other,
    }
}

pub fn envelope(command: &str, seed: u64, out: &Outcome) -> Value {
    let mut m = Map::new();
    m.insert("tool".into(), "ontic".into());
    m.insert("version".into(), env!("CARGO_PKG_VERSION").into());
    m.insert("command".into(), command.into());
    m.insert("seed".into(), seed.into());
    m.insert("engine".into(), out.engine.clone().into());
    m.insert(
        "inputs".into(),
        serde_json::to_value(&out.inputs).expect("inputs serialize"),
    );
    m.insert("result".into(), out.result.clone());
    round_floats(Value::Object(m))
}

pub fn to_json(command: &str, seed: u64, out: &Outcome) -> String {
    let mut s = serde_json::to_string_pretty(&envelope(command, seed, out)).expect("json");
    s.push('\n');
    s
}

pub fn to_csv(rows: &[Vec<String>]) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.write_record(r)
            .map_err(|e| CliError::Usage(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv is UTF-8"))
}

/// A float in the same 12-digit form the JSON uses.
pub fn num(x: f64) -> String {
    let r: f64 = format!("{x:.11e}").parse().unwrap_or(x);
    format!("{r}")
}
