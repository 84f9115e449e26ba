use std::io::Write;
use std::path::{Path, PathBuf};

use bnsharp_core::constants::SharpConstantEstimate;
use bnsharp_core::{Error, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::ExperimentConfig;
use crate::run::{RunOutput, Table};

fn io(e: impl std::fmt::Display) -> Error {
    Error::InvalidParameter(format!("output: {e}"))
}

/// CSV text with a header row.
pub fn render_csv(table: &Table) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    match table {
        Table::Constants(rows) => {
            if rows.is_empty() {
                w.write_record([
                    "p",
                    "q",
                    "operator",
                    "body",
                    "a",
                    "kind",
                    "value",
                    "tolerance",
                    "seed",
                    "runtime_ms",
                ])
                .map_err(io)?;
            }
            for r in rows {
                w.serialize(r).map_err(io)?;
            }
        }
        Table::Levitan(rows) => {
            if rows.is_empty() {
                w.write_record(["a", "property", "bound", "observed", "slack"])
                    .map_err(io)?;
            }
            for r in rows {
                w.serialize(r).map_err(io)?;
            }
        }
    }
    let bytes = w.into_inner().map_err(io)?;
    String::from_utf8(bytes).map_err(io)
}

/// Writes through a temporary file in the target directory and renames it
/// into place.
pub fn write_csv_atomic(path: &Path, text: &str) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
        _ => PathBuf::from("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(&dir).map_err(io)?;
    tmp.write_all(text.as_bytes()).map_err(io)?;
    tmp.as_file().sync_all().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub version: String,
    pub core_version: String,
    pub experiment: String,
    pub config: ExperimentConfig,
    pub config_text: String,
    /// SHA-256 of `config_text`.
    pub config_hash: String,
    pub seed: u64,
    pub rows: usize,
    pub reference: Option<SharpConstantEstimate>,
    pub extrapolated: Option<f64>,
    pub notes: Vec<String>,
}

pub fn sha256_hex(text: &str) -> String {
    Sha256::digest(text.as_bytes())
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

impl Manifest {
    pub fn new(config: &ExperimentConfig, out: &RunOutput) -> Self {
        let config_text = config.to_text();
        Manifest {
            version: env!("CARGO_PKG_VERSION").to_string(),
            core_version: bnsharp_core::VERSION.to_string(),
            experiment: config.kind.name().to_string(),
            config: config.clone(),
            config_hash: sha256_hex(&config_text),
            config_text,
            seed: config.seed,
            rows: out.table.len(),
            reference: out.reference.clone(),
            extrapolated: out.extrapolated,
            notes: out.notes.clone(),
        }
    }
}

/// `<csv path>.manifest.json`.
pub fn manifest_path(csv: &Path) -> PathBuf {
    let mut s = csv.as_os_str().to_owned();
    s.push(".manifest.json");
    PathBuf::from(s)
}

pub fn write_manifest(csv: &Path, manifest: &Manifest) -> Result<PathBuf> {
    let path = manifest_path(csv);
    let text = serde_json::to_string_pretty(manifest).map_err(io)?;
    write_csv_atomic(&path, &text)?;
    Ok(path)
}
