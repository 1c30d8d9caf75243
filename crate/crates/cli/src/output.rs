use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::{Failure, Stage};

/// Writes `bytes` to `path`, or to stdout when no path is given.
pub fn emit(path: Option<&Path>, bytes: &[u8]) -> Result<(), Failure> {
    match path {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir).stage("output")?;
            }
            fs::write(p, bytes).stage("output")
        }
        None => std::io::stdout().write_all(bytes).stage("output"),
    }
}

pub fn json_bytes<T: serde::Serialize>(value: &T) -> Result<Vec<u8>, Failure> {
    let mut s = serde_json::to_string_pretty(value).stage("output")?;
    s.push('\n');
    Ok(s.into_bytes())
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Output directory that records the hash of every file written to it.
pub struct ArtifactDir {
    pub root: PathBuf,
    pub hashes: BTreeMap<String, String>,
}

impl ArtifactDir {
    pub fn create(root: &Path) -> Result<Self, Failure> {
        fs::create_dir_all(root).stage("output")?;
        Ok(Self { root: root.to_path_buf(), hashes: BTreeMap::new() })
    }

    pub fn write(&mut self, name: &str, bytes: &[u8]) -> Result<(), Failure> {
        fs::write(self.root.join(name), bytes).stage("output")?;
        self.hashes.insert(name.to_string(), sha256_hex(bytes));
        Ok(())
    }
}
