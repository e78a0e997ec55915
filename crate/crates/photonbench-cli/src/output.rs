//! Artifact writing: temp-file-and-rename placement (no partial files) and
//! the manifest that ties every output back to its config.

use std::path::Path;

use anyhow::{Context, Result};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::experiments::Overrides;

/// What an experiment hands back for persistence.
pub struct RunOutput {
    pub csv: String,
    pub summary: Value,
    /// Human-readable non-convergence notes; empty means clean.
    pub flagged: Vec<String>,
}

/// Write `result.csv`, `summary.json`, and `manifest.json` into `dir`.
pub fn write_artifacts(
    dir: &Path,
    experiment: &str,
    effective_params: &Value,
    output: &RunOutput,
    overrides: &Overrides,
    wall_time_s: f64,
) -> Result<()> {
    std::fs::create_dir_all(dir)
        .with_context(|| format!("creating output directory {}", dir.display()))?;

    let config_text = serde_json::to_string(&json!({
        "experiment": experiment,
        "params": effective_params,
    }))?;
    let manifest = json!({
        "experiment": experiment,
        "config": { "experiment": experiment, "params": effective_params },
        "config_sha256": sha256_hex(config_text.as_bytes()),
        "versions": {
            "cli": env!("CARGO_PKG_VERSION"),
            "lib": photonbench::VERSION,
        },
        "overrides": {
            "seed": overrides.seed,
            "resolution_scale": overrides.resolution_scale,
            "threads": overrides.threads,
        },
        "wall_time_s": wall_time_s,
        "converged": output.flagged.is_empty(),
        "flagged": output.flagged,
        "artifacts": ["result.csv", "summary.json"],
    });

    write_atomic(&dir.join("result.csv"), output.csv.as_bytes())?;
    let mut summary_text = serde_json::to_string_pretty(&output.summary)?;
    summary_text.push('\n');
    write_atomic(&dir.join("summary.json"), summary_text.as_bytes())?;
    let mut manifest_text = serde_json::to_string_pretty(&manifest)?;
    manifest_text.push('\n');
    write_atomic(&dir.join("manifest.json"), manifest_text.as_bytes())?;
    Ok(())
}

/// Land the bytes via a temporary sibling plus rename, so a crash can never
/// leave a half-written artifact at the final path.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let file_name = path
        .file_name()
        .and_then(|n| n.to_str())
        .context("artifact path has no file name")?;
    let tmp = path.with_file_name(format!("{file_name}.tmp"));
    std::fs::write(&tmp, bytes)
        .with_context(|| format!("writing temporary file {}", tmp.display()))?;
    std::fs::rename(&tmp, path)
        .with_context(|| format!("renaming into place at {}", path.display()))?;
    Ok(())
}

/// Lowercase hex SHA-256, the manifest's config fingerprint.
pub fn sha256_hex(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    digest.iter().map(|b| format!("{b:02x}")).collect()
}
