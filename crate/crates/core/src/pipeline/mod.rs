//! End-to-end workflows: single-pair assessment, dataset audit and the
//! recursive redocking loop.

mod assess;
mod audit;
pub mod backend;
mod config;
mod redock;

use std::fmt;

use thiserror::Error;

use crate::aa_score::WeightError;
use crate::chem::ChemError;
use crate::perception::PerceptionError;
use crate::pose_check::ForceFieldError;

pub use assess::{
    assess_pair, assess_structures, AssessmentReport, FingerprintSummary, Provenance, SlotValue, REPORT_SCHEMA,
};
pub use audit::{
    audit_dataset, audit_pairs, discover_pairs, triples_csv, AuditRow, AuditSummary, FeatureStats, HistogramBin,
    PairFailure, PairInput, AUDIT_FILTER_LIMIT, AUDIT_SCHEMA, HISTOGRAM_BINS,
};
pub use backend::{BackendError, DockingBackend};
pub use config::{Config, Cutoffs, HardLimits, OutputFormat, RedockSettings, StrainSettings};
pub use redock::{
    exceeds_hard_limits, recursive_redock, redock_loop, RedockOutcome, RedockStep, RedockVerdict, StepDecision,
    TRACE_SCHEMA,
};

/// Processing stage that produced an error.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Parse,
    Pocket,
    Perception,
    Strain,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stage::Parse => "parse",
            Stage::Pocket => "pocket",
            Stage::Perception => "perception",
            Stage::Strain => "strain",
        })
    }
}

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("parse stage failed for {path}: {source}")]
    Parse {
        path: String,
        #[source]
        source: ChemError,
    },
    #[error("{stage} stage failed: {source}")]
    Perception {
        stage: Stage,
        #[source]
        source: PerceptionError,
    },
    #[error("strain stage failed: {0}")]
    Strain(#[from] ForceFieldError),
    #[error(transparent)]
    Weights(#[from] WeightError),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("no protein-ligand pairs found under {0}")]
    EmptyDataset(String),
    #[error("docking backend failed at iteration {iteration}: {source}")]
    Backend {
        iteration: usize,
        #[source]
        source: BackendError,
    },
    #[error("i/o failure on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl PipelineError {
    /// Stage name for per-pair failure logs, when the error came from one.
    pub fn stage(&self) -> Option<Stage> {
        match self {
            PipelineError::Parse { .. } => Some(Stage::Parse),
            PipelineError::Perception { stage, .. } => Some(*stage),
            PipelineError::Strain(_) => Some(Stage::Strain),
            _ => None,
        }
    }
}
