//! Staged stage outputs and the run manifest.
//!
//! Outputs are written into a staging directory inside the work directory
//! and renamed into place only once the whole stage has succeeded, so a
//! failed run never leaves half-written artifacts behind.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::RunConfig;
use crate::error::{data, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FileHash {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Serialize)]
pub struct Manifest {
    pub command: String,
    pub version: String,
    pub config_file: String,
    pub config_hash: String,
    pub inputs: Vec<FileHash>,
    pub outputs: Vec<FileHash>,
}

pub fn sha256_file(path: &Path) -> Result<String> {
    let bytes = fs::read(path).map_err(|e| data(format!("cannot read {}: {e}", path.display())))?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

pub fn sha256_text(text: &str) -> String {
    hex::encode(Sha256::digest(text.as_bytes()))
}

pub fn manifest_name(command: &str) -> String {
    format!("manifest-{command}.json")
}

pub fn config_name(command: &str) -> String {
    format!("config-{command}.txt")
}

pub struct Stage {
    command: String,
    workdir: PathBuf,
    staging: PathBuf,
    outputs: Vec<String>,
    inputs: Vec<FileHash>,
}

impl Stage {
    pub fn begin(workdir: &Path, command: &str) -> Result<Self> {
        fs::create_dir_all(workdir)
            .map_err(|e| data(format!("cannot create work directory {}: {e}", workdir.display())))?;
        let staging = workdir.join(format!(".staging-{command}"));
        if staging.exists() {
            fs::remove_dir_all(&staging)?;
        }
        fs::create_dir_all(&staging)?;
        Ok(Stage {
            command: command.to_string(),
            workdir: workdir.to_path_buf(),
            staging,
            outputs: Vec::new(),
            inputs: Vec::new(),
        })
    }

    /// Records an input file and its content hash. Files inside the work
    /// directory are recorded by their relative name.
    pub fn input(&mut self, path: &Path) -> Result<()> {
        let sha256 = sha256_file(path)?;
        let shown = path.strip_prefix(&self.workdir).unwrap_or(path);
        self.inputs.push(FileHash {
            path: shown.display().to_string(),
            sha256,
        });
        Ok(())
    }

    /// Records an input that is not a file, such as a shipped word list.
    pub fn input_text(&mut self, label: &str, text: &str) {
        self.inputs.push(FileHash {
            path: label.to_string(),
            sha256: sha256_text(text),
        });
    }

    /// Staging path for output `name`, registered for commit.
    pub fn output(&mut self, name: &str) -> PathBuf {
        if !self.outputs.iter().any(|o| o == name) {
            self.outputs.push(name.to_string());
        }
        self.staging.join(name)
    }

    pub fn write_csv<T: Serialize>(&mut self, name: &str, rows: impl IntoIterator<Item = T>) -> Result<()> {
        let path = self.output(name);
        let mut w = csv::Writer::from_path(&path)?;
        for r in rows {
            w.serialize(r)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_jsonl<T: Serialize>(&mut self, name: &str, rows: impl IntoIterator<Item = T>) -> Result<()> {
        let path = self.output(name);
        let mut w = BufWriter::new(File::create(&path)?);
        for r in rows {
            serde_json::to_writer(&mut w, &r)?;
            w.write_all(b"\n")?;
        }
        w.flush()?;
        Ok(())
    }

    /// Moves every staged output into the work directory and writes the
    /// resolved config and the manifest.
    pub fn commit(mut self, config: &RunConfig) -> Result<Manifest> {
        let config_file = config_name(&self.command);
        fs::write(self.output(&config_file), config.render())?;
        let mut outputs = Vec::with_capacity(self.outputs.len());
        for name in &self.outputs {
            let staged = self.staging.join(name);
            outputs.push(FileHash {
                path: name.clone(),
                sha256: sha256_file(&staged)?,
            });
        }
        for name in &self.outputs {
            fs::rename(self.staging.join(name), self.workdir.join(name))?;
        }
        let manifest = Manifest {
            command: self.command.clone(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            config_file,
            config_hash: config.hash(),
            inputs: std::mem::take(&mut self.inputs),
            outputs,
        };
        let tmp = self.staging.join(manifest_name(&self.command));
        let mut f = BufWriter::new(File::create(&tmp)?);
        serde_json::to_writer_pretty(&mut f, &manifest)?;
        f.write_all(b"\n")?;
        f.flush()?;
        drop(f);
        fs::rename(&tmp, self.workdir.join(manifest_name(&self.command)))?;
        fs::remove_dir_all(&self.staging)?;
        Ok(manifest)
    }
}

impl Drop for Stage {
    fn drop(&mut self) {
        // no-op after commit; cleans up after a failed stage
        let _ = fs::remove_dir_all(&self.staging);
    }
}
