//! Run manifest: everything needed to reproduce a run bit-exactly. The
//! `timings` field is the only part allowed to differ between identical
//! runs.

use serde::Serialize;
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

pub const SCHEMA_VERSIONS: [(&str, u32); 4] =
    [("floorplan", 1), ("program", 1), ("scene", 1), ("rle", 1)];

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub version: String,
    pub schema_versions: BTreeMap<String, u32>,
    pub command: String,
    pub rng_seed: u64,
    pub config: serde_json::Value,
    pub inputs: BTreeMap<String, InputRecord>,
    pub outputs: Vec<String>,
    /// Wall-clock timings; intentionally isolated so everything else is
    /// byte-stable across reruns.
    pub timings: BTreeMap<String, u128>,
}

#[derive(Debug, Serialize)]
pub struct InputRecord {
    pub path: String,
    pub sha256: String,
}

impl RunManifest {
    pub fn new(command: &str, rng_seed: u64, config: serde_json::Value) -> Self {
        Self {
            version: env!("CARGO_PKG_VERSION").to_string(),
            schema_versions: SCHEMA_VERSIONS
                .iter()
                .map(|(k, v)| (k.to_string(), *v))
                .collect(),
            command: command.to_string(),
            rng_seed,
            config,
            inputs: BTreeMap::new(),
            outputs: Vec::new(),
            timings: BTreeMap::new(),
        }
    }

    pub fn record_input(&mut self, role: &str, path: &Path) -> std::io::Result<()> {
        let bytes = std::fs::read(path)?;
        let digest = Sha256::digest(&bytes);
        self.inputs.insert(
            role.to_string(),
            InputRecord {
                path: path.display().to_string(),
                sha256: hex_string(&digest),
            },
        );
        Ok(())
    }

    pub fn record_output(&mut self, path: &Path) {
        self.outputs.push(path.display().to_string());
        self.outputs.sort();
    }

    pub fn record_timing(&mut self, label: &str, elapsed: std::time::Duration) {
        self.timings.insert(label.to_string(), elapsed.as_millis());
    }

    pub fn write_to(&self, dir: &Path) -> std::io::Result<PathBuf> {
        let path = dir.join("manifest.json");
        std::fs::write(&path, serde_json::to_string_pretty(self).expect("manifest serializes"))?;
        Ok(path)
    }
}

fn hex_string(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}
