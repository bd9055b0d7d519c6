//! Report envelope, input loading and the decimal mirror.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use medgeom::rat;
use serde::de::DeserializeOwned;
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

/// Failure with its exit code: 1 invalid input, 2 cap exceeded, 3 internal verification failure.
#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn invalid(message: impl Into<String>) -> Self {
        Self {
            code: 1,
            message: message.into(),
        }
    }

    pub fn cap(message: impl Into<String>) -> Self {
        Self {
            code: 2,
            message: message.into(),
        }
    }

    pub fn internal(message: impl Into<String>) -> Self {
        Self {
            code: 3,
            message: message.into(),
        }
    }

    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(self.code)
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// A parsed input file with its digest.
pub struct Input<T> {
    pub value: T,
    pub record: Value,
}

pub fn load<T: DeserializeOwned>(path: &Path) -> CliResult<Input<T>> {
    let bytes = std::fs::read(path).map_err(|e| CliError::invalid(format!("{}: {e}", path.display())))?;
    let value: T =
        serde_json::from_slice(&bytes).map_err(|e| CliError::invalid(format!("{}: {e}", path.display())))?;
    let raw: Value = serde_json::from_slice(&bytes).expect("already parsed once");
    Ok(Input {
        value,
        record: json!({
            "path": path.display().to_string(),
            "sha256": hex(&Sha256::digest(&bytes)),
            "data": raw,
        }),
    })
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

pub struct Report {
    pub command: String,
    pub inputs: Vec<Value>,
    pub options: Value,
    pub result: Value,
    pub compute_ms: f64,
}

impl Report {
    pub fn to_json(&self, decimal: Option<usize>) -> Value {
        let mut out = Map::new();
        out.insert("tool".into(), json!(env!("CARGO_PKG_NAME")));
        out.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
        out.insert("command".into(), json!(self.command));
        out.insert("inputs".into(), Value::Array(self.inputs.clone()));
        out.insert("options".into(), self.options.clone());
        out.insert("result".into(), self.result.clone());
        if let Some(k) = decimal {
            out.insert("decimal".into(), decimal_mirror(&self.result, k));
        }
        out.insert("timings".into(), json!({ "compute_ms": self.compute_ms }));
        Value::Object(out)
    }

    pub fn write(&self, decimal: Option<usize>, output: Option<&PathBuf>) -> CliResult<()> {
        let text = serde_json::to_string_pretty(&self.to_json(decimal)).expect("reports serialize") + "\n";
        match output {
            Some(p) => std::fs::write(p, text).map_err(|e| CliError::invalid(format!("{}: {e}", p.display()))),
            None => {
                print!("{text}");
                Ok(())
            }
        }
    }
}

fn looks_rational(s: &str) -> bool {
    let body = s.strip_prefix('-').unwrap_or(s);
    let mut parts = body.splitn(2, '/');
    let num = parts.next().unwrap_or("");
    let den = parts.next();
    !num.is_empty() && num.bytes().all(|b| b.is_ascii_digit()) && den.is_none_or(|d| !d.is_empty() && d.bytes().all(|b| b.is_ascii_digit()))
}

/// Copy of `v` with every exact rational string replaced by `k` truncated decimal digits.
pub fn decimal_mirror(v: &Value, k: usize) -> Value {
    match v {
        Value::String(s) if looks_rational(s) => match rat::parse_rat(s) {
            Ok(r) => Value::String(rat::to_decimal(&r, k)),
            Err(_) => v.clone(),
        },
        Value::Array(a) => Value::Array(a.iter().map(|x| decimal_mirror(x, k)).collect()),
        Value::Object(o) => Value::Object(o.iter().map(|(key, x)| (key.clone(), decimal_mirror(x, k))).collect()),
        _ => v.clone(),
    }
}
