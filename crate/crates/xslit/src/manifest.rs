use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::io::write_json;

pub const MANIFEST_FILE: &str = "manifest.json";

/// Record of one run, written next to its outputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub subcommand: String,
    /// Input files by role (`camera`, `scene`, ...).
    pub inputs: BTreeMap<String, String>,
    pub config_paths: Vec<String>,
    pub seed: Option<u64>,
    /// Resolved parameters of the run.
    pub settings: serde_json::Value,
    pub outputs: Vec<String>,
    pub tool_version: String,
    pub wall_time_s: f64,
}

/// Collects manifest fields while a command runs.
#[derive(Debug)]
pub struct ManifestBuilder {
    started: Instant,
    manifest: RunManifest,
}

fn display(p: &Path) -> String {
    p.display().to_string()
}

impl ManifestBuilder {
    pub fn new(subcommand: &str) -> Self {
        Self {
            started: Instant::now(),
            manifest: RunManifest {
                subcommand: subcommand.to_owned(),
                inputs: BTreeMap::new(),
                config_paths: Vec::new(),
                seed: None,
                settings: serde_json::Value::Null,
                outputs: Vec::new(),
                tool_version: env!("CARGO_PKG_VERSION").to_owned(),
                wall_time_s: 0.0,
            },
        }
    }

    pub fn input(&mut self, role: &str, path: &Path) -> &mut Self {
        self.manifest.inputs.insert(role.to_owned(), display(path));
        self
    }

    pub fn config(&mut self, path: Option<&Path>) -> &mut Self {
        self.manifest.config_paths.extend(path.map(display));
        self
    }

    pub fn seed(&mut self, seed: u64) -> &mut Self {
        self.manifest.seed = Some(seed);
        self
    }

    pub fn settings<T: Serialize>(&mut self, value: &T) -> &mut Self {
        self.manifest.settings = serde_json::to_value(value).expect("serializable settings");
        self
    }

    pub fn output(&mut self, path: &Path) -> &mut Self {
        self.manifest.outputs.push(display(path));
        self
    }

    pub fn outputs(&mut self, paths: &[PathBuf]) -> &mut Self {
        self.manifest.outputs.extend(paths.iter().map(|p| display(p)));
        self
    }

    /// Stamps the wall time and writes the manifest atomically to `path`.
    pub fn finish(mut self, path: &Path) -> Result<RunManifest> {
        self.manifest.wall_time_s = self.started.elapsed().as_secs_f64();
        write_json(path, &self.manifest)?;
        Ok(self.manifest)
    }
}

/// Manifest location for a single-file output: `<file>.manifest.json`.
pub fn sidecar_path(output: &Path) -> PathBuf {
    let mut name = output.file_name().unwrap_or_default().to_os_string();
    name.push(".manifest.json");
    output.with_file_name(name)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn written_next_to_outputs() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("curve.csv");
        assert_eq!(sidecar_path(&out), dir.path().join("curve.csv.manifest.json"));
        let mut b = ManifestBuilder::new("analyze");
        b.input("camera", Path::new("cam.json")).seed(3).output(&out);
        let m = b.finish(&sidecar_path(&out)).unwrap();
        let text = std::fs::read_to_string(sidecar_path(&out)).unwrap();
        let back: RunManifest = serde_json::from_str(&text).unwrap();
        assert_eq!(back, m);
        assert_eq!(back.inputs["camera"], "cam.json");
    }
}
