use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use mpw_core::wave::WaveField;
use serde_json::{json, Value};

/// Output directory for one run; every file carries the config hash and seed.
pub struct Artifacts {
    dir: PathBuf,
    hash: String,
    seed: Option<u64>,
    files: Vec<String>,
}

impl Artifacts {
    pub fn new(dir: &Path, hash: &str, seed: Option<u64>) -> Result<Self> {
        fs::create_dir_all(dir).with_context(|| format!("cannot create output directory {}", dir.display()))?;
        Ok(Self { dir: dir.to_path_buf(), hash: hash.to_string(), seed, files: Vec::new() })
    }

    fn comment(&self) -> String {
        match self.seed {
            Some(s) => format!("# config_hash={} seed={s}", self.hash),
            None => format!("# config_hash={}", self.hash),
        }
    }

    fn create(&mut self, name: &str) -> Result<BufWriter<File>> {
        let path = self.dir.join(name);
        let file = File::create(&path).with_context(|| format!("cannot write {}", path.display()))?;
        self.files.push(name.to_string());
        Ok(BufWriter::new(file))
    }

    pub fn csv<R>(&mut self, name: &str, header: &[&str], rows: impl IntoIterator<Item = R>) -> Result<()>
    where
        R: IntoIterator<Item = String>,
    {
        let comment = self.comment();
        let mut out = self.create(name)?;
        writeln!(out, "{comment}")?;
        let mut w = csv::Writer::from_writer(out);
        w.write_record(header)?;
        for row in rows {
            w.write_record(row)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn wave(&mut self, name: &str, psi: &WaveField) -> Result<()> {
        let comment = format!("{} t={}", &self.comment()[2..], psi.time);
        let out = self.create(name)?;
        psi.write_csv(out, Some(&comment))?;
        Ok(())
    }

    pub fn json(&mut self, name: &str, mut value: Value) -> Result<()> {
        if let Value::Object(map) = &mut value {
            map.insert("config_hash".into(), json!(self.hash));
            map.insert("seed".into(), json!(self.seed));
        }
        let mut out = self.create(name)?;
        serde_json::to_writer_pretty(&mut out, &value)?;
        writeln!(out)?;
        Ok(())
    }

    pub fn files(&self) -> &[String] {
        &self.files
    }
}

pub fn num(v: f64) -> String {
    format!("{v:e}")
}
