//! File formats and report plumbing shared by the subcommands.

use std::fmt;
use std::path::{Path, PathBuf};

use convec_core::codec::field_ref;
use convec_core::gf::{Field, FieldElement};
use convec_core::polymat::{CodeFile, ConvCode};
use convec_core::Error;
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

pub const VERSION: &str = concat!("convec ", env!("CARGO_PKG_VERSION"));

/// A failure reported as `{"error": {"code", "message"}}` on stderr.
#[derive(Debug)]
pub struct Failure {
    pub code: &'static str,
    pub message: String,
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.code, self.message)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure {
            code: e.code(),
            message: e.to_string(),
        }
    }
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: "usage",
            message: message.into(),
        }
    }

    pub fn to_json(&self) -> Value {
        json!({ "error": { "code": self.code, "message": self.message } })
    }
}

pub type CliResult<T> = std::result::Result<T, Failure>;

/// An input file read once, with its content hash.
pub struct Input {
    pub path: PathBuf,
    pub text: String,
    pub sha256: String,
}

impl Input {
    pub fn read(path: &Path) -> CliResult<Self> {
        let bytes = std::fs::read(path).map_err(|e| Failure {
            code: "io",
            message: format!("{}: {e}", path.display()),
        })?;
        let sha256 = hex(&Sha256::digest(&bytes));
        let text = String::from_utf8(bytes).map_err(|_| Failure {
            code: "parse_error",
            message: format!("{}: not UTF-8", path.display()),
        })?;
        Ok(Input {
            path: path.to_path_buf(),
            text,
            sha256,
        })
    }
}

pub fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

pub fn write(path: &Path, contents: &str) -> CliResult<()> {
    std::fs::write(path, contents).map_err(|e| Failure {
        code: "io",
        message: format!("{}: {e}", path.display()),
    })
}

pub fn load_code(input: &Input) -> CliResult<ConvCode> {
    let file: CodeFile = serde_json::from_str(&input.text).map_err(|e| Failure {
        code: "parse_error",
        message: format!("{}: {e}", input.path.display()),
    })?;
    Ok(ConvCode::from_json(&file)?)
}

/// Message text: header `#k=<k> field=<ref>`, then one line of k hex
/// symbols per coefficient `u_t`.
pub fn parse_message(text: &str, f: &Field, k: usize) -> CliResult<Vec<Vec<FieldElement>>> {
    let mut blocks = Vec::new();
    for (no, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(header) = line.strip_prefix('#') {
            for kv in header.split_whitespace() {
                match kv.split_once('=') {
                    Some(("k", v)) if v != k.to_string() => {
                        return Err(Error::DimensionMismatch(format!("message has k={v}, code has k={k}")).into())
                    }
                    Some(("field", r)) if r != field_ref(f) => return Err(Error::FieldMismatch.into()),
                    _ => {}
                }
            }
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() != k {
            return Err(Failure {
                code: "parse_error",
                message: format!("line {}: expected {k} symbols, found {}", no + 1, toks.len()),
            });
        }
        let block = toks
            .iter()
            .map(|t| {
                f.parse_hex(t).map_err(|_| Failure {
                    code: "parse_error",
                    message: format!("line {}: bad symbol {t:?}", no + 1),
                })
            })
            .collect::<CliResult<Vec<_>>>()?;
        blocks.push(block);
    }
    if blocks.is_empty() {
        return Err(Failure {
            code: "parse_error",
            message: "message has no coefficients".into(),
        });
    }
    Ok(blocks)
}

pub fn format_message(f: &Field, blocks: &[Vec<FieldElement>]) -> String {
    let k = blocks.first().map_or(0, Vec::len);
    let mut out = format!("#k={k} field={}\n", field_ref(f));
    for b in blocks {
        let toks: Vec<String> = b.iter().map(|e| f.to_hex(e)).collect();
        out.push_str(&toks.join(" "));
        out.push('\n');
    }
    out
}

/// Common report envelope: tool version and input hashes first.
pub fn envelope(command: &str, inputs: &[(&str, &Input)], body: Value) -> Value {
    let hashes: Map<String, Value> = inputs
        .iter()
        .map(|(name, i)| (name.to_string(), json!(i.sha256)))
        .collect();
    let mut out = Map::new();
    out.insert("tool".into(), json!(VERSION));
    out.insert("command".into(), json!(command));
    out.insert("input_sha256".into(), Value::Object(hashes));
    if let Value::Object(body) = body {
        out.extend(body);
    }
    Value::Object(out)
}

/// Drop every `wall_time_ms` field so reports are byte-stable.
pub fn strip_timings(v: &mut Value) {
    match v {
        Value::Object(m) => {
            m.remove("wall_time_ms");
            m.values_mut().for_each(strip_timings);
        }
        Value::Array(a) => a.iter_mut().for_each(strip_timings),
        _ => {}
    }
}

pub fn emit_report(path: Option<&Path>, mut report: Value, timings: bool) -> CliResult<()> {
    if !timings {
        strip_timings(&mut report);
    }
    let text = serde_json::to_string_pretty(&report).expect("report serialises") + "\n";
    match path {
        Some(p) => write(p, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
