//! Experiment configs: JSON with a versioned `schema` field.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

pub const EXPERIMENT_SCHEMA: &str = "dlab.experiment/1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormalizationTag {
    PerStep,
    Cumulative,
}

/// An environment or algorithm id plus its parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Spec {
    pub id: String,
    #[serde(default)]
    pub params: Map<String, Value>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema: String,
    pub name: String,
    pub env: Spec,
    pub algo: Spec,
    pub horizon: usize,
    pub seeds: Vec<u64>,
    pub normalization: NormalizationTag,
    /// Stream tag separating this experiment's randomness from others run
    /// with the same seeds. Defaults to a hash of `name`.
    #[serde(default)]
    pub experiment: Option<u64>,
    #[serde(default)]
    pub out: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let v: Value = serde_json::from_str(text).context("config is not valid JSON")?;
        match v.get("schema").and_then(Value::as_str) {
            Some(EXPERIMENT_SCHEMA) => {}
            Some(other) => bail!("unsupported config schema {other:?} (expected {EXPERIMENT_SCHEMA:?})"),
            None => bail!("config has no \"schema\" field (expected {EXPERIMENT_SCHEMA:?})"),
        }
        let cfg: ExperimentConfig = serde_json::from_value(v).context("config does not match the experiment schema")?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::from_json(&text).with_context(|| format!("in {}", path.display()))
    }

    pub fn validate(&self) -> Result<()> {
        if self.horizon == 0 {
            bail!("horizon must be at least 1");
        }
        if self.seeds.is_empty() {
            bail!("seed list is empty");
        }
        let distinct: BTreeSet<u64> = self.seeds.iter().copied().collect();
        if distinct.len() != self.seeds.len() {
            bail!("seeds must be distinct");
        }
        Ok(())
    }

    pub fn experiment_tag(&self) -> u64 {
        self.experiment.unwrap_or_else(|| fnv1a(self.name.as_bytes()))
    }
}

/// 64-bit FNV-1a, stable across platforms and releases.
pub fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// Parameter reader that rejects keys nobody asked for.
pub struct Params<'a> {
    owner: &'a str,
    map: &'a Map<String, Value>,
    used: BTreeSet<&'static str>,
}

impl<'a> Params<'a> {
    pub fn new(owner: &'a str, map: &'a Map<String, Value>) -> Self {
        Params { owner, map, used: BTreeSet::new() }
    }

    fn get(&mut self, key: &'static str) -> Option<&'a Value> {
        self.used.insert(key);
        self.map.get(key)
    }

    pub fn f64_or(&mut self, key: &'static str, default: f64) -> Result<f64> {
        match self.get(key) {
            None => Ok(default),
            Some(v) => v.as_f64().with_context(|| format!("{}: {key} must be a number", self.owner)),
        }
    }

    pub fn opt_f64(&mut self, key: &'static str) -> Result<Option<f64>> {
        match self.get(key) {
            None | Some(Value::Null) => Ok(None),
            Some(v) => v.as_f64().map(Some).with_context(|| format!("{}: {key} must be a number", self.owner)),
        }
    }

    pub fn usize_or(&mut self, key: &'static str, default: usize) -> Result<usize> {
        match self.get(key) {
            None => Ok(default),
            Some(v) => v.as_u64().map(|x| x as usize).with_context(|| format!("{}: {key} must be a nonnegative integer", self.owner)),
        }
    }

    pub fn usize(&mut self, key: &'static str) -> Result<usize> {
        let owner = self.owner;
        let v = self.get(key).with_context(|| format!("{owner}: missing {key}"))?;
        v.as_u64().map(|x| x as usize).with_context(|| format!("{owner}: {key} must be a nonnegative integer"))
    }

    pub fn f64_vec(&mut self, key: &'static str) -> Result<Vec<f64>> {
        let owner = self.owner;
        let v = self.get(key).with_context(|| format!("{owner}: missing {key}"))?;
        serde_json::from_value(v.clone()).with_context(|| format!("{owner}: {key} must be an array of numbers"))
    }

    /// Error on any parameter that was never read.
    pub fn finish(self) -> Result<()> {
        let extra: Vec<&String> = self.map.keys().filter(|k| !self.used.contains(k.as_str())).collect();
        if !extra.is_empty() {
            let known: Vec<&str> = self.used.iter().copied().collect();
            bail!("{}: unknown parameter(s) {:?}; accepted: {:?}", self.owner, extra, known);
        }
        Ok(())
    }
}
