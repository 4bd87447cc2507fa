//! Weight files: one `slot = value` line per energy slot plus `intercept`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{slot_names, N_SLOTS};

#[derive(Debug, Error)]
pub enum WeightError {
    #[error("weight file line {line}: {reason}")]
    MalformedWeightFile { line: usize, reason: String },
    #[error("weight file has no entry for slot {0}")]
    MissingSlot(String),
    #[error("cannot read weight file {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightSet {
    /// One weight per slot, in slot order.
    pub values: Vec<f64>,
    pub intercept: f64,
    /// False for the built-in unit weights.
    pub fitted: bool,
}

/// Unit weights and zero intercept; reports flag these as unfitted.
pub fn default_weights() -> WeightSet {
    WeightSet {
        values: vec![1.0; N_SLOTS],
        intercept: 0.0,
        fitted: false,
    }
}

impl WeightSet {
    pub fn get(&self, slot: &str) -> Option<f64> {
        if slot == "intercept" {
            return Some(self.intercept);
        }
        slot_names().iter().position(|s| s == slot).map(|i| self.values[i])
    }

    /// Serialized form; parsing it back reproduces the set exactly.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (name, w) in slot_names().iter().zip(&self.values) {
            let _ = writeln!(out, "{name} = {w:?}");
        }
        let _ = writeln!(out, "intercept = {:?}", self.intercept);
        out
    }

    pub fn scaled(&self, alpha: f64) -> Self {
        Self {
            values: self.values.iter().map(|w| w * alpha).collect(),
            ..self.clone()
        }
    }
}

pub fn parse_weights(text: &str) -> Result<WeightSet, WeightError> {
    let names = slot_names();
    let mut seen: BTreeMap<String, f64> = BTreeMap::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let bad = |reason: &str| WeightError::MalformedWeightFile {
            line: n + 1,
            reason: reason.to_string(),
        };
        let (key, value) = line.split_once('=').ok_or_else(|| bad("expected `key = value`"))?;
        let key = key.trim();
        if key != "intercept" && !names.iter().any(|s| s == key) {
            return Err(bad(&format!("unknown slot `{key}`")));
        }
        let value: f64 = value.trim().parse().map_err(|_| bad("value is not a number"))?;
        if !value.is_finite() {
            return Err(bad("value is not finite"));
        }
        if seen.insert(key.to_string(), value).is_some() {
            return Err(bad(&format!("duplicate slot `{key}`")));
        }
    }
    let mut values = Vec::with_capacity(N_SLOTS);
    for name in names.iter().map(String::as_str).chain(["intercept"]) {
        values.push(
            *seen
                .get(name)
                .ok_or_else(|| WeightError::MissingSlot(name.to_string()))?,
        );
    }
    let intercept = values.pop().expect("intercept pushed last");
    Ok(WeightSet {
        values,
        intercept,
        fitted: true,
    })
}

pub fn load_weights(path: &Path) -> Result<WeightSet, WeightError> {
    let text = std::fs::read_to_string(path).map_err(|source| WeightError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_weights(&text)
}
