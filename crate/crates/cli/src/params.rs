//! Flat key=value parameters: a config file merged with command-line flags,
//! flags winning.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::path::Path;
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};

pub const KEYS: &[&str] = &[
    "chain", "marked", "n", "p", "s", "j", "epsilon", "seeds", "master_seed", "sizes", "t_max",
    "trials", "suite", "out",
];

#[derive(Debug, Clone, Default)]
pub struct Params {
    values: BTreeMap<String, String>,
}

fn normalize(key: &str) -> String {
    key.trim().replace('-', "_")
}

impl Params {
    pub fn parse_config(text: &str) -> Result<Self> {
        let mut values = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| anyhow!("config line {}: expected key=value", lineno + 1))?;
            let key = normalize(k);
            if !KEYS.contains(&key.as_str()) {
                bail!("config line {}: unknown key {key:?}", lineno + 1);
            }
            values.insert(key, v.trim().to_string());
        }
        Ok(Self { values })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        Self::parse_config(&text).with_context(|| format!("in config {}", path.display()))
    }

    pub fn set(&mut self, key: &str, value: impl Display) {
        self.values.insert(normalize(key), value.to_string());
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>>
    where
        T::Err: Display,
    {
        self.raw(key)
            .map(|v| v.parse::<T>().map_err(|e| anyhow!("--{}: {v:?}: {e}", key.replace('_', "-"))))
            .transpose()
    }

    pub fn get_or<T: FromStr>(&self, key: &str, default: T) -> Result<T>
    where
        T::Err: Display,
    {
        Ok(self.get(key)?.unwrap_or(default))
    }

    pub fn require<T: FromStr>(&self, key: &str) -> Result<T>
    where
        T::Err: Display,
    {
        self.get(key)?
            .ok_or_else(|| anyhow!("missing required parameter --{}", key.replace('_', "-")))
    }

    pub fn epsilon(&self, default: f64) -> Result<f64> {
        let eps = self.get_or("epsilon", default)?;
        if !(eps > 0.0 && eps < 1.0) {
            bail!("--epsilon must lie in (0, 1), got {eps}");
        }
        Ok(eps)
    }

    pub fn as_map(&self) -> &BTreeMap<String, String> {
        &self.values
    }
}
