//! The output directory of one run: CSV and JSON artifacts, a text summary
//! and the manifest.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use anyhow::{Context, Result};
use qmix_core::io::CsvTable;
use serde::Serialize;
use serde_json::json;

use crate::params::Params;

pub struct RunDir {
    root: PathBuf,
    started: Instant,
    artifacts: Vec<String>,
    summary: Vec<String>,
    seeds: Vec<u64>,
}

impl RunDir {
    pub fn create(root: &Path) -> Result<Self> {
        fs::create_dir_all(root).with_context(|| format!("creating {}", root.display()))?;
        Ok(Self {
            root: root.to_path_buf(),
            started: Instant::now(),
            artifacts: Vec::new(),
            summary: Vec::new(),
            seeds: Vec::new(),
        })
    }

    fn target(&mut self, name: &str) -> Result<PathBuf> {
        let path = self.root.join(name);
        if let Some(dir) = path.parent() {
            fs::create_dir_all(dir)?;
        }
        self.artifacts.push(name.to_string());
        Ok(path)
    }

    pub fn csv(&mut self, name: &str, table: &CsvTable) -> Result<()> {
        let path = self.target(name)?;
        table.write(&path).with_context(|| format!("writing {}", path.display()))
    }

    pub fn json(&mut self, name: &str, value: &impl Serialize) -> Result<()> {
        let path = self.target(name)?;
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        fs::write(&path, text).with_context(|| format!("writing {}", path.display()))
    }

    pub fn line(&mut self, text: impl Into<String>) {
        self.summary.push(text.into());
    }

    pub fn seed(&mut self, seed: u64) {
        self.seeds.push(seed);
    }

    /// Writes `summary.txt` and `manifest.json`; timestamps only go in the manifest.
    pub fn finish(mut self, command: &str, params: &Params, status: &str) -> Result<()> {
        let mut summary = self.summary.join("\n");
        summary.push('\n');
        let path = self.target("summary.txt")?;
        fs::write(path, summary)?;
        let started_unix = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs_f64())
            .unwrap_or(0.0)
            - self.started.elapsed().as_secs_f64();
        let manifest = json!({
            "command": command,
            "config": params.as_map(),
            "seeds": self.seeds,
            "version": env!("CARGO_PKG_VERSION"),
            "status": status,
            "started_unix": started_unix,
            "wall_time_s": self.started.elapsed().as_secs_f64(),
            "artifacts": self.artifacts,
        });
        let text = serde_json::to_string_pretty(&manifest)? + "\n";
        fs::write(self.root.join("manifest.json"), text)?;
        Ok(())
    }
}
