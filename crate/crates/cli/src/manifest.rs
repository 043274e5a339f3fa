use serde::Serialize;
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

use crate::config::RunConfig;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ArtifactRecord {
    pub file: String,
    pub sha256: String,
    pub bytes: usize,
}

impl ArtifactRecord {
    pub fn new(file: &str, contents: &[u8]) -> Self {
        Self {
            file: file.to_string(),
            sha256: sha256_hex(contents),
            bytes: contents.len(),
        }
    }
}

/// Contents of `manifest.json`.
#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub core_version: &'static str,
    pub experiment: String,
    pub units: String,
    pub unit_convention: &'static str,
    pub seed: u64,
    pub config: RunConfig,
    pub wall_time_s: f64,
    pub artifacts: Vec<ArtifactRecord>,
    pub summary: Map<String, Value>,
    pub notes: Vec<String>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sha256_of_abc() {
        assert_eq!(
            sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }
}
