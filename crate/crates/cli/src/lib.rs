//! Batch runner for the qpulse experiments: strict JSON configs in, CSV artifacts and a
//! `manifest.json` out.

use std::path::{Path, PathBuf};
use std::time::Instant;

use qpulse_core::io::write_atomic;
use serde_json::json;

pub mod config;
pub mod error;
pub mod experiments;
pub mod manifest;

pub use config::{RunConfig, Units, OUTPUT_DIR_ENV};
pub use error::{CliError, CliResult};

use manifest::{ArtifactRecord, Manifest};

/// Where a run wrote its files.
#[derive(Debug, Clone)]
pub struct RunReport {
    pub output_dir: PathBuf,
    pub manifest: Manifest,
}

pub fn run_config_file(path: &Path) -> CliResult<RunReport> {
    run_config(&RunConfig::load(path)?)
}

/// Runs one experiment and writes its artifacts and manifest, each atomically.
pub fn run_config(cfg: &RunConfig) -> CliResult<RunReport> {
    let experiment = experiments::find(&cfg.experiment).ok_or_else(|| {
        CliError::config(
            "experiment",
            format!(
                "unknown experiment {:?}; `qpulse list` shows the registered names",
                cfg.experiment
            ),
        )
    })?;
    let started = Instant::now();
    let out = (experiment.run)(cfg)?;
    let wall_time_s = started.elapsed().as_secs_f64();

    let dir = cfg.resolved_output_dir();
    std::fs::create_dir_all(&dir)?;
    let mut artifacts = Vec::with_capacity(out.artifacts.len());
    for (name, contents) in &out.artifacts {
        write_atomic(&dir.join(name), contents.as_bytes())?;
        artifacts.push(ArtifactRecord::new(name, contents.as_bytes()));
    }
    let manifest = Manifest {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        core_version: qpulse_core::VERSION,
        experiment: cfg.experiment.clone(),
        units: cfg.units.to_string(),
        unit_convention: cfg.units.describe(),
        seed: cfg.seed,
        config: cfg.clone(),
        wall_time_s,
        artifacts,
        summary: out.summary,
        notes: out.notes,
    };
    let text =
        serde_json::to_string_pretty(&manifest).map_err(|e| CliError::Numerical(e.to_string()))?;
    write_atomic(&dir.join("manifest.json"), format!("{text}\n").as_bytes())?;
    Ok(RunReport {
        output_dir: dir,
        manifest,
    })
}

pub fn list_text() -> String {
    let mut s = String::new();
    for e in experiments::registry() {
        s.push_str(&format!("{:<20} {}\n", e.name, e.description));
        for (key, help) in e.parameters {
            s.push_str(&format!("{:<22} {key}: {help}\n", ""));
        }
    }
    s
}

pub fn list_json() -> serde_json::Value {
    let entries: Vec<_> = experiments::registry()
        .into_iter()
        .map(|e| {
            let params: serde_json::Map<_, _> = e
                .parameters
                .iter()
                .map(|(k, v)| (k.to_string(), json!(v)))
                .collect();
            json!({"name": e.name, "description": e.description, "parameters": params})
        })
        .collect();
    json!({ "experiments": entries })
}
