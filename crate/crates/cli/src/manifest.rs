//! Output directories with a checksum manifest.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{io, CliError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FileRecord {
    pub file: String,
    pub sha256: String,
    pub bytes: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solver: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frame: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub method: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub kind: String,
    pub config: serde_json::Value,
    pub files: Vec<FileRecord>,
    #[serde(default)]
    pub summary: serde_json::Value,
    pub wall_time_s: f64,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    format!("{:x}", Sha256::digest(bytes))
}

#[derive(Debug)]
pub struct OutputDir {
    dir: PathBuf,
    files: Vec<FileRecord>,
}

#[derive(Debug, Clone, Default)]
pub struct FileTags {
    pub solver: Option<String>,
    pub frame: Option<String>,
    pub method: Option<String>,
}

impl OutputDir {
    pub fn create(dir: &Path) -> Result<Self> {
        std::fs::create_dir_all(dir).map_err(io(dir))?;
        Ok(Self {
            dir: dir.to_owned(),
            files: Vec::new(),
        })
    }

    pub fn path(&self) -> &Path {
        &self.dir
    }

    pub fn write(&mut self, name: &str, contents: &str, tags: FileTags) -> Result<PathBuf> {
        let path = self.dir.join(name);
        std::fs::write(&path, contents).map_err(io(&path))?;
        self.files.retain(|f| f.file != name);
        self.files.push(FileRecord {
            file: name.to_owned(),
            sha256: sha256_hex(contents.as_bytes()),
            bytes: contents.len() as u64,
            solver: tags.solver,
            frame: tags.frame,
            method: tags.method,
        });
        Ok(path)
    }

    pub fn files(&self) -> &[FileRecord] {
        &self.files
    }

    /// Writes `<stem>_manifest.json` and checks every listed file against it.
    pub fn finish(
        self,
        stem: &str,
        kind: &str,
        config: serde_json::Value,
        summary: serde_json::Value,
        wall_time_s: f64,
    ) -> Result<PathBuf> {
        let manifest = Manifest {
            tool: "tlsim".to_owned(),
            version: env!("CARGO_PKG_VERSION").to_owned(),
            kind: kind.to_owned(),
            config,
            files: self.files,
            summary,
            wall_time_s,
        };
        let path = self.dir.join(format!("{stem}_manifest.json"));
        let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
        std::fs::write(&path, text).map_err(io(&path))?;
        let bad: Vec<_> = verify_manifest(&path)?.into_iter().filter(|c| !c.ok).collect();
        if let Some(c) = bad.first() {
            return Err(CliError::Config {
                path: c.file.clone(),
                reason: format!("written file failed verification: {}", c.detail),
            });
        }
        Ok(path)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FileCheck {
    pub file: String,
    pub ok: bool,
    pub detail: String,
}

pub fn read_manifest(path: &Path) -> Result<Manifest> {
    let text = std::fs::read_to_string(path).map_err(io(path))?;
    serde_json::from_str(&text).map_err(|source| CliError::Json {
        path: path.to_owned(),
        source,
    })
}

/// Recomputes size and SHA-256 of every file listed in the manifest.
pub fn verify_manifest(path: &Path) -> Result<Vec<FileCheck>> {
    let m = read_manifest(path)?;
    let dir = path.parent().unwrap_or(Path::new("."));
    Ok(m.files
        .iter()
        .map(|f| {
            let (ok, detail) = match std::fs::read(dir.join(&f.file)) {
                Err(e) => (false, format!("unreadable: {e}")),
                Ok(b) if b.len() as u64 != f.bytes => (false, format!("size {} != {}", b.len(), f.bytes)),
                Ok(b) => {
                    let h = sha256_hex(&b);
                    if h == f.sha256 {
                        (true, "ok".to_owned())
                    } else {
                        (false, format!("sha256 {h} != {}", f.sha256))
                    }
                }
            };
            FileCheck {
                file: f.file.clone(),
                ok,
                detail,
            }
        })
        .collect())
}
