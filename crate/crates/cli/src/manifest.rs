//! Run manifests: a JSON record written next to every command's outputs.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Serialize)]
pub struct FileDigest {
    pub path: PathBuf,
    pub sha256: String,
    pub bytes: u64,
}

impl FileDigest {
    pub fn of(path: &Path) -> CliResult<Self> {
        let mut file = File::open(path).map_err(|e| CliError::io(format!("cannot read {}", path.display()), e))?;
        let mut hasher = Sha256::new();
        let mut buffer = [0u8; 64 * 1024];
        let mut bytes = 0u64;
        loop {
            let read = file
                .read(&mut buffer)
                .map_err(|e| CliError::io(format!("cannot read {}", path.display()), e))?;
            if read == 0 {
                break;
            }
            hasher.update(&buffer[..read]);
            bytes += read as u64;
        }
        Ok(Self {
            path: path.to_path_buf(),
            sha256: hex::encode(hasher.finalize()),
            bytes,
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct StageTiming {
    pub stage: String,
    pub seconds: f64,
}

/// Resolved configuration, input and output digests, version and timings
/// of one command invocation.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub config: serde_json::Value,
    pub inputs: Vec<FileDigest>,
    pub outputs: Vec<FileDigest>,
    pub timings: Vec<StageTiming>,
}

impl RunManifest {
    pub fn new(command: &'static str, config: impl Serialize) -> CliResult<Self> {
        Ok(Self {
            tool: "oodg",
            version: env!("CARGO_PKG_VERSION"),
            command,
            config: serde_json::to_value(config).map_err(oodg::Error::from)?,
            inputs: Vec::new(),
            outputs: Vec::new(),
            timings: Vec::new(),
        })
    }

    pub fn input(&mut self, path: &Path) -> CliResult<()> {
        self.inputs.push(FileDigest::of(path)?);
        Ok(())
    }

    pub fn output(&mut self, path: &Path) -> CliResult<()> {
        self.outputs.push(FileDigest::of(path)?);
        Ok(())
    }

    pub fn time(&mut self, stage: &str, seconds: f64) {
        self.timings.push(StageTiming {
            stage: stage.to_string(),
            seconds,
        });
    }

    /// Runs `f`, recording its wall-clock time under `stage`.
    pub fn timed<T>(&mut self, stage: &str, f: impl FnOnce() -> CliResult<T>) -> CliResult<T> {
        let start = Instant::now();
        let out = f()?;
        self.time(stage, start.elapsed().as_secs_f64());
        Ok(out)
    }

    pub fn write(&self, path: &Path) -> CliResult<()> {
        let context = || format!("cannot write {}", path.display());
        let file = File::create(path).map_err(|e| CliError::io(context(), e))?;
        let mut out = BufWriter::new(file);
        serde_json::to_writer_pretty(&mut out, self).map_err(oodg::Error::from)?;
        out.write_all(b"\n").map_err(|e| CliError::io(context(), e))?;
        out.flush().map_err(|e| CliError::io(context(), e))?;
        Ok(())
    }
}

/// `fit` writing `results/model.json` → `results/model.fit.manifest.json`,
/// so a command rewriting its input in place keeps the earlier manifest.
pub fn manifest_path_for(output: &Path, command: &str) -> PathBuf {
    let stem = output.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    output.with_file_name(format!("{stem}.{command}.manifest.json"))
}
