use std::fs;
use std::io::Read;
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::model::io::write_json;

pub const MANIFEST_FILE: &str = "manifest.json";
pub const REPORT_FILE: &str = "report.json";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileDigest {
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StepStatus {
    Ok,
    Failed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Step {
    pub name: String,
    pub status: StepStatus,
    pub wall_ms: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// Provenance record written next to every run's outputs. The wall times
/// and `started_unix_ms` are the only fields that vary between reruns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub status: StepStatus,
    pub started_unix_ms: u64,
    pub config: Value,
    pub inputs: Vec<FileDigest>,
    pub outputs: Vec<FileDigest>,
    pub steps: Vec<Step>,
}

impl RunManifest {
    pub fn read(dir: &Path) -> Result<RunManifest> {
        let path = dir.join(MANIFEST_FILE);
        if !path.exists() {
            return Err(Error::MissingFile(path));
        }
        let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
        serde_json::from_str(&text).map_err(|source| Error::Json { path, source })
    }
}

/// The `report.json` payload: inputs echoed under `config`, results under
/// `measured`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub command: String,
    pub config: Value,
    pub measured: Value,
}

pub fn sha256_file(path: &Path) -> Result<FileDigest> {
    let mut file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut hasher = Sha256::new();
    let mut buf = vec![0u8; 1 << 16];
    let mut bytes = 0u64;
    loop {
        let n = file.read(&mut buf).map_err(|e| Error::io(path, e))?;
        if n == 0 {
            break;
        }
        hasher.update(&buf[..n]);
        bytes += n as u64;
    }
    Ok(FileDigest {
        path: path.display().to_string(),
        sha256: hex::encode(hasher.finalize()),
        bytes,
    })
}

/// Collects steps, inputs and outputs of one command run.
pub struct RunContext {
    pub out: PathBuf,
    command: String,
    started_unix_ms: u64,
    steps: Vec<Step>,
    inputs: Vec<PathBuf>,
    outputs: Vec<String>,
}

impl RunContext {
    pub fn new(command: &str, out: &Path) -> Result<Self> {
        fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
        let started_unix_ms = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_millis() as u64)
            .unwrap_or(0);
        Ok(RunContext {
            out: out.to_path_buf(),
            command: command.to_string(),
            started_unix_ms,
            steps: Vec::new(),
            inputs: Vec::new(),
            outputs: Vec::new(),
        })
    }

    pub fn step<T>(&mut self, name: &str, f: impl FnOnce() -> Result<T>) -> Result<T> {
        let t0 = Instant::now();
        let res = f();
        let wall_ms = t0.elapsed().as_secs_f64() * 1e3;
        log::debug!("step {name}: {wall_ms:.1} ms");
        self.steps.push(Step {
            name: name.to_string(),
            status: if res.is_ok() { StepStatus::Ok } else { StepStatus::Failed },
            wall_ms,
            error: res.as_ref().err().map(ToString::to_string),
        });
        res
    }

    pub fn input(&mut self, path: &Path) {
        self.inputs.push(path.to_path_buf());
    }

    /// Records every regular file of a directory as an input.
    pub fn input_dir(&mut self, dir: &Path) -> Result<()> {
        let mut files: Vec<PathBuf> = fs::read_dir(dir)
            .map_err(|e| Error::io(dir, e))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.is_file() && p.file_name().is_some_and(|n| n != MANIFEST_FILE))
            .collect();
        files.sort();
        self.inputs.extend(files);
        Ok(())
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.out.join(name)
    }

    /// Marks a file under the output directory as produced by this run.
    pub fn output(&mut self, name: &str) {
        if !self.outputs.iter().any(|o| o == name) {
            self.outputs.push(name.to_string());
        }
    }

    pub fn write_json<T: Serialize + ?Sized>(&mut self, name: &str, value: &T) -> Result<()> {
        write_json(&self.path(name), value)?;
        self.output(name);
        Ok(())
    }

    pub fn write_text(&mut self, name: &str, text: &str) -> Result<()> {
        let path = self.path(name);
        fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
        self.output(name);
        Ok(())
    }

    /// Writes the manifest. `config` is echoed verbatim.
    pub fn finish(mut self, config: Value, ok: bool) -> Result<()> {
        let inputs = self.inputs.iter().map(|p| sha256_file(p)).collect::<Result<Vec<_>>>()?;
        self.outputs.sort();
        let outputs = self
            .outputs
            .iter()
            .map(|name| {
                sha256_file(&self.out.join(name)).map(|mut d| {
                    d.path = name.clone();
                    d
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let manifest = RunManifest {
            tool: "hetg".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: self.command,
            status: if ok { StepStatus::Ok } else { StepStatus::Failed },
            started_unix_ms: self.started_unix_ms,
            config,
            inputs,
            outputs,
            steps: self.steps,
        };
        write_json(&self.out.join(MANIFEST_FILE), &manifest)
    }
}
