use std::fs;
use std::path::Path;

use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};

pub const TOOL: &str = "spamqpt";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Provenance attached to every output file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Provenance {
    pub config_hash: String,
    pub base_seed: Option<u64>,
}

impl Provenance {
    /// Hashes the compact JSON form of `config`.
    pub fn of(config: &impl Serialize, base_seed: Option<u64>) -> CliResult<Self> {
        let bytes = serde_json::to_vec(config)
            .map_err(|e| CliError::Usage(format!("cannot serialize configuration: {e}")))?;
        let digest = Sha256::digest(&bytes);
        let config_hash = digest.iter().map(|b| format!("{b:02x}")).collect();
        Ok(Self {
            config_hash,
            base_seed,
        })
    }

    /// `# spamqpt <version> config_hash=<hex> base_seed=<n|none>`
    pub fn header(&self) -> String {
        let seed = self
            .base_seed
            .map_or_else(|| "none".to_string(), |s| s.to_string());
        format!(
            "# {TOOL} {VERSION} config_hash={} base_seed={seed}\n",
            self.config_hash
        )
    }

    pub fn json(&self) -> Value {
        json!({
            "tool": TOOL,
            "version": VERSION,
            "config_hash": self.config_hash,
            "base_seed": self.base_seed,
        })
    }
}

pub fn write_file(path: &Path, contents: &str) -> CliResult<()> {
    fs::write(path, contents).map_err(|e| CliError::io(path, e))
}

pub fn read_file(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

pub fn create_dir(path: &Path) -> CliResult<()> {
    fs::create_dir_all(path).map_err(|e| CliError::io(path, e))
}

/// Pretty JSON with a leading `_meta` object and a trailing newline.
pub fn json_with_meta(prov: &Provenance, body: Value) -> String {
    let mut map = serde_json::Map::new();
    map.insert("_meta".into(), prov.json());
    match body {
        Value::Object(fields) => map.extend(fields),
        other => {
            map.insert("data".into(), other);
        }
    }
    let mut s = serde_json::to_string_pretty(&Value::Object(map)).expect("JSON values serialize");
    s.push('\n');
    s
}

/// Serializes rows as CSV after the provenance header.
pub fn csv_with_header<T: Serialize>(prov: &Provenance, rows: &[T]) -> CliResult<String> {
    let mut w = csv::Writer::from_writer(prov.header().into_bytes());
    for r in rows {
        w.serialize(r)
            .map_err(|e| CliError::Usage(format!("cannot write CSV: {e}")))?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| CliError::Usage(format!("cannot write CSV: {e}")))?;
    Ok(String::from_utf8(bytes).expect("CSV output is UTF-8"))
}
