//! Time-series dump: one CSV per snapshot plus a JSON manifest.

use std::fs;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::Result;
use crate::wave::grid::WaveField;

/// Hex SHA-256 of a configuration text.
pub fn config_hash(text: &str) -> String {
    hex::encode(Sha256::digest(text.as_bytes()))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SeriesManifest {
    pub times: Vec<f64>,
    pub norms: Vec<f64>,
    pub files: Vec<String>,
    pub config_hash: String,
    pub seed: Option<u64>,
}

pub fn write_series(dir: &Path, prefix: &str, series: &[WaveField], config_hash: &str, seed: Option<u64>) -> Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let mut files = Vec::with_capacity(series.len());
    for (i, psi) in series.iter().enumerate() {
        let name = format!("{prefix}_{i:04}.csv");
        let file = BufWriter::new(fs::File::create(dir.join(&name))?);
        let seed_note = seed.map(|s| format!(" seed={s}")).unwrap_or_default();
        psi.write_csv(file, Some(&format!("config_hash={config_hash}{seed_note} t={}", psi.time)))?;
        files.push(name);
    }
    let manifest = SeriesManifest {
        times: series.iter().map(|p| p.time).collect(),
        norms: series.iter().map(WaveField::norm).collect(),
        files,
        config_hash: config_hash.to_string(),
        seed,
    };
    let path = dir.join(format!("{prefix}_manifest.json"));
    fs::write(&path, serde_json::to_string_pretty(&manifest).map_err(|e| crate::Error::Io(e.to_string()))?)?;
    Ok(path)
}
