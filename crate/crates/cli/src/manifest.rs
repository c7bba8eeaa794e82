//! Run manifests: every experiment writes `manifest.toml` beside its CSVs,
//! holding the fully resolved configuration plus a `[manifest]` table with
//! the experiment kind, the config content hash, the base seed, and the
//! tool version. A manifest is itself a loadable config, so
//! `srion <kind> --config <out>/manifest.toml` reproduces the run exactly.

use crate::config::Config;
use crate::error::CliError;
use crate::experiments::ExperimentKind;
use std::path::{Path, PathBuf};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

pub fn manifest_text(kind: ExperimentKind, cfg: &Config) -> String {
    format!(
        "[manifest]\nkind = \"{}\"\nversion = \"{}\"\nconfig_hash = \"{:016x}\"\nbase_seed = {}\n\n{}",
        kind.as_str(),
        TOOL_VERSION,
        cfg.content_hash(),
        cfg.ensemble.base_seed,
        cfg.to_toml(),
    )
}

pub fn write_manifest(dir: &Path, kind: ExperimentKind, cfg: &Config) -> Result<PathBuf, CliError> {
    std::fs::create_dir_all(dir)?;
    let path = dir.join("manifest.toml");
    std::fs::write(&path, manifest_text(kind, cfg))?;
    Ok(path)
}

/// Enforce that a config bound to an experiment kind (e.g. a manifest) is
/// not replayed under a different subcommand.
pub fn check_kind(cfg: &Config, kind: ExperimentKind) -> Result<(), CliError> {
    if let Some(bound) = &cfg.experiment.kind {
        if bound != kind.as_str() {
            return Err(CliError::Config(format!(
                "config is bound to experiment `{bound}` but `{}` was invoked",
                kind.as_str()
            )));
        }
    }
    Ok(())
}
