//! Run provenance: every output file records the manifest that produced it,
//! embedded under a "manifest" key for JSON outputs and as a sidecar
//! `<file>.manifest.json` for CSV outputs.

use std::collections::BTreeMap;
use std::path::Path;
use std::time::Instant;

use serde::Serialize;

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub params_path: Option<String>,
    pub options: BTreeMap<String, String>,
    pub seeds: Vec<u64>,
    pub outputs: Vec<String>,
    pub version: String,
    pub duration_seconds: f64,
}

pub struct ManifestBuilder {
    manifest: RunManifest,
    started: Instant,
}

impl ManifestBuilder {
    pub fn new(command: &str) -> Self {
        Self {
            manifest: RunManifest {
                command: command.to_string(),
                params_path: None,
                options: BTreeMap::new(),
                seeds: Vec::new(),
                outputs: Vec::new(),
                version: env!("CARGO_PKG_VERSION").to_string(),
                duration_seconds: 0.0,
            },
            started: Instant::now(),
        }
    }

    pub fn params_path(mut self, p: &Path) -> Self {
        self.manifest.params_path = Some(p.display().to_string());
        self
    }

    pub fn option(mut self, key: &str, value: impl ToString) -> Self {
        self.manifest.options.insert(key.into(), value.to_string());
        self
    }

    pub fn seed(mut self, s: u64) -> Self {
        self.manifest.seeds.push(s);
        self
    }

    pub fn output(mut self, p: &Path) -> Self {
        self.manifest.outputs.push(p.display().to_string());
        self
    }

    pub fn finish(mut self) -> RunManifest {
        self.manifest.duration_seconds = self.started.elapsed().as_secs_f64();
        self.manifest
    }
}

/// Writes `<file>.manifest.json` next to a non-JSON output.
pub fn write_sidecar(manifest: &RunManifest, file: &Path) -> std::io::Result<()> {
    let side = sidecar_path(file);
    std::fs::write(&side, serde_json::to_string_pretty(manifest).expect("manifest json"))
}

pub fn sidecar_path(file: &Path) -> std::path::PathBuf {
    let mut name = file.as_os_str().to_os_string();
    name.push(".manifest.json");
    std::path::PathBuf::from(name)
}
