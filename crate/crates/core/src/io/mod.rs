//! Text configs, artifact manifests and replay frame export.

mod config;
mod manifest;
mod replay;

pub use config::{
    parse_eval_config, parse_pairs, parse_train_config, read_eval_config, read_train_config, write_eval_config, write_train_config,
    EvalConfig, Provenance, Resolved,
};
pub use manifest::{write_artifact_meta, Manifest, MANIFEST_FILE, RESOLVED_CONFIG_FILE, SCHEMA_VERSION};
pub use replay::replay_export;
