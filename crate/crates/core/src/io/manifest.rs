use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub const SCHEMA_VERSION: u32 = 1;
pub const MANIFEST_FILE: &str = "manifest.json";
pub const RESOLVED_CONFIG_FILE: &str = "resolved_config.txt";

/// Provenance record written beside every set of outputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub schema_version: u32,
    pub command: String,
    pub seed: u64,
    pub build_id: String,
}

/// Write the resolved config snapshot and the manifest into `dir`.
pub fn write_artifact_meta(dir: &Path, resolved_config: &str, manifest: &Manifest) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir.display().to_string(), e))?;
    let cfg_path = dir.join(RESOLVED_CONFIG_FILE);
    std::fs::write(&cfg_path, resolved_config).map_err(|e| Error::io(cfg_path.display().to_string(), e))?;
    let json = serde_json::to_string_pretty(manifest).map_err(|e| Error::Input(e.to_string()))?;
    let path = dir.join(MANIFEST_FILE);
    std::fs::write(&path, json + "\n").map_err(|e| Error::io(path.display().to_string(), e))
}
