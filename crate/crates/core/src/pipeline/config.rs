//! Run configuration, loadable from TOML. Every field has a default.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::PipelineError;
use crate::aa_score::{default_weights, load_weights, WeightSet, DEFAULT_INTERFACE_CUTOFF};
use crate::compass::{FavorabilityThresholds, LanMseParams};
use crate::perception::DEFAULT_POCKET_CUTOFF;
use crate::pose_check::{DEFAULT_MAX_ITER, DEFAULT_SCALE_14, DEFAULT_TOLERANCE};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Cutoffs {
    /// Residues with an atom this close to the ligand form the pocket.
    pub pocket: f64,
    /// Distance limit of the electrostatic and vdW pair sums.
    pub interface: f64,
}

impl Default for Cutoffs {
    fn default() -> Self {
        Self {
            pocket: DEFAULT_POCKET_CUTOFF,
            interface: DEFAULT_INTERFACE_CUTOFF,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StrainSettings {
    pub max_iter: usize,
    /// kcal/mol per degree.
    pub tolerance: f64,
    pub scale_14: f64,
}

impl Default for StrainSettings {
    fn default() -> Self {
        Self {
            max_iter: DEFAULT_MAX_ITER,
            tolerance: DEFAULT_TOLERANCE,
            scale_14: DEFAULT_SCALE_14,
        }
    }
}

/// A pose exceeding any of these stops redocking outright.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HardLimits {
    pub affinity: f64,
    pub strain: f64,
    pub clashes: f64,
}

impl Default for HardLimits {
    fn default() -> Self {
        Self {
            affinity: 100.0,
            strain: 50.0,
            clashes: 100.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RedockSettings {
    /// Largest number of poses assessed.
    pub max_iter: usize,
    pub base_seed: u64,
    pub hard_limits: HardLimits,
}

impl Default for RedockSettings {
    fn default() -> Self {
        Self {
            max_iter: 5,
            base_seed: 0,
            hard_limits: HardLimits::default(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    /// Weight file; `None` selects the unfitted unit weights.
    pub weights: Option<PathBuf>,
    pub format: OutputFormat,
    /// Audit worker threads; `None` uses every core.
    pub jobs: Option<usize>,
    pub his_cationic: bool,
    pub thresholds: FavorabilityThresholds,
    pub lan_mse: LanMseParams,
    pub cutoffs: Cutoffs,
    pub strain: StrainSettings,
    pub redock: RedockSettings,
}

impl Config {
    pub fn from_toml(text: &str) -> Result<Self, PipelineError> {
        let cfg: Config = toml::from_str(text).map_err(|e| PipelineError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, PipelineError> {
        let text = std::fs::read_to_string(path).map_err(|source| PipelineError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_toml(&text)
    }

    pub fn validate(&self) -> Result<(), PipelineError> {
        let bad = |what: &str| Err(PipelineError::Config(what.to_string()));
        let positive = |x: f64| x.is_finite() && x > 0.0;
        if !positive(self.cutoffs.pocket) || !positive(self.cutoffs.interface) {
            return bad("cutoffs must be positive and finite");
        }
        if self.strain.max_iter == 0 || !positive(self.strain.tolerance) {
            return bad("strain.max_iter must be >= 1 and strain.tolerance > 0");
        }
        if !(self.strain.scale_14.is_finite() && (0.0..=1.0).contains(&self.strain.scale_14)) {
            return bad("strain.scale_14 must lie in [0, 1]");
        }
        if self.redock.max_iter == 0 {
            return bad("redock.max_iter must be >= 1");
        }
        if self.jobs == Some(0) {
            return bad("jobs must be >= 1");
        }
        let t = &self.thresholds;
        let h = &self.redock.hard_limits;
        if ![
            t.max_affinity,
            t.max_strain,
            t.max_clashes,
            h.affinity,
            h.strain,
            h.clashes,
        ]
        .iter()
        .all(|v| v.is_finite())
        {
            return bad("thresholds and hard limits must be finite");
        }
        self.lan_mse
            .validate()
            .map_err(|e| PipelineError::Config(e.to_string()))
    }

    /// SHA-256 of the canonical JSON form, hex encoded.
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_vec(self).expect("config serializes");
        hex::encode(Sha256::digest(&canonical))
    }

    /// Weights named by the config, or the unit defaults when none is set.
    /// A named file that cannot be read is an error.
    pub fn resolve_weights(&self) -> Result<WeightSet, PipelineError> {
        match &self.weights {
            Some(path) => Ok(load_weights(path)?),
            None => Ok(default_weights()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_toml_gives_defaults() {
        let c = Config::from_toml("").unwrap();
        assert_eq!(c, Config::default());
        assert_eq!(c.redock.max_iter, 5);
        assert_eq!(c.redock.hard_limits.clashes, 100.0);
        assert_eq!(c.cutoffs.pocket, 8.0);
    }

    #[test]
    fn sections_override() {
        let c = Config::from_toml(
            "jobs = 2\nformat = \"csv\"\n[thresholds]\nmax_strain = 7.5\n[redock]\nmax_iter = 3\n[redock.hard_limits]\nclashes = 50\n",
        )
        .unwrap();
        assert_eq!(c.jobs, Some(2));
        assert_eq!(c.format, OutputFormat::Csv);
        assert_eq!(c.thresholds.max_strain, 7.5);
        assert_eq!(c.thresholds.max_affinity, 0.0);
        assert_eq!(c.redock.max_iter, 3);
        assert_eq!(c.redock.hard_limits.clashes, 50.0);
    }

    #[test]
    fn invalid_values_rejected() {
        assert!(Config::from_toml("bogus = 1").is_err());
        assert!(Config::from_toml("[cutoffs]\npocket = -1.0").is_err());
        assert!(Config::from_toml("[redock]\nmax_iter = 0").is_err());
        assert!(Config::from_toml("[lan_mse]\nbuffer_low = 0.9").is_err());
        assert!(Config::from_toml("jobs = 0").is_err());
    }

    #[test]
    fn hash_tracks_content() {
        let a = Config::default();
        let mut b = a.clone();
        assert_eq!(a.hash(), b.hash());
        assert_eq!(a.hash().len(), 64);
        b.thresholds.max_clashes = 6.0;
        assert_ne!(a.hash(), b.hash());
    }

    #[test]
    fn missing_weight_file_is_error() {
        let c = Config {
            weights: Some("/nonexistent/weights.txt".into()),
            ..Config::default()
        };
        assert!(matches!(c.resolve_weights(), Err(PipelineError::Weights(_))));
        assert!(!Config::default().resolve_weights().unwrap().fitted);
    }
}
