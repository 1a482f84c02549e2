//! Run manifests: every command writes one next to its primary output so any
//! result can be reproduced bit for bit from the recorded invocation.

use std::collections::BTreeMap;
use std::path::Path;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};

#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct RunManifest {
    pub command: String,
    pub argv: Vec<String>,
    pub version: String,
    pub seed: u64,
    pub parameters: serde_json::Value,
    /// SHA-256 of every input file, keyed by path as given.
    pub input_checksums: BTreeMap<String, String>,
    /// Wall-clock seconds per stage; "total" covers the whole command.
    pub stage_seconds: BTreeMap<String, f64>,
    pub outputs: Vec<String>,
}

impl RunManifest {
    pub fn new(command: &str, seed: u64, parameters: serde_json::Value) -> Self {
        RunManifest {
            command: command.to_string(),
            argv: std::env::args().collect(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            seed,
            parameters,
            input_checksums: BTreeMap::new(),
            stage_seconds: BTreeMap::new(),
            outputs: Vec::new(),
        }
    }

    pub fn checksum_input(&mut self, path: &Path) -> CliResult<()> {
        let bytes = std::fs::read(path)
            .map_err(|e| CliError::io(format!("cannot read {}: {e}", path.display())))?;
        let digest = Sha256::digest(&bytes);
        let hex: String = digest.iter().map(|b| format!("{b:02x}")).collect();
        self.input_checksums
            .insert(path.display().to_string(), hex);
        Ok(())
    }

    pub fn record_output(&mut self, path: &Path) {
        self.outputs.push(path.display().to_string());
    }

    pub fn write(&self, path: &Path) -> CliResult<()> {
        let json = serde_json::to_string_pretty(self)?;
        std::fs::write(path, json)
            .map_err(|e| CliError::io(format!("cannot write {}: {e}", path.display())))
    }

    pub fn read(path: &Path) -> CliResult<RunManifest> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::io(format!("cannot read {}: {e}", path.display())))?;
        Ok(serde_json::from_str(&text)?)
    }
}

/// Records elapsed wall-clock time per named stage.
pub struct StageTimer {
    start: Instant,
    current: Option<(String, Instant)>,
    pub seconds: BTreeMap<String, f64>,
}

impl StageTimer {
    pub fn new() -> Self {
        StageTimer {
            start: Instant::now(),
            current: None,
            seconds: BTreeMap::new(),
        }
    }

    pub fn stage(&mut self, name: &str) {
        self.finish_current();
        self.current = Some((name.to_string(), Instant::now()));
    }

    fn finish_current(&mut self) {
        if let Some((name, t0)) = self.current.take() {
            *self.seconds.entry(name).or_insert(0.0) += t0.elapsed().as_secs_f64();
        }
    }

    pub fn finish(mut self) -> BTreeMap<String, f64> {
        self.finish_current();
        self.seconds
            .insert("total".to_string(), self.start.elapsed().as_secs_f64());
        self.seconds
    }
}

/// Conventional manifest path for a given output file.
pub fn manifest_path_for(output: &Path) -> std::path::PathBuf {
    let mut name = output
        .file_name()
        .map(|s| s.to_string_lossy().to_string())
        .unwrap_or_else(|| "output".to_string());
    name.push_str(".manifest.json");
    output.with_file_name(name)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn manifest_round_trips_losslessly() {
        let mut m = RunManifest::new("estimate", 7, serde_json::json!({"lambda": 0.25}));
        m.stage_seconds.insert("fit".into(), 1.25);
        m.outputs.push("out.triplet".into());
        let path = std::env::temp_dir().join(format!("isee-manifest-{}.json", std::process::id()));
        m.write(&path).unwrap();
        let back = RunManifest::read(&path).unwrap();
        assert_eq!(m, back);
        std::fs::remove_file(&path).ok();
    }

    #[test]
    fn manifest_path_convention() {
        let p = manifest_path_for(Path::new("/tmp/run/est.triplet"));
        assert_eq!(p, Path::new("/tmp/run/est.triplet.manifest.json"));
    }
}
