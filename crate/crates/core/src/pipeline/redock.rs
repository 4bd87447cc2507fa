//! Recursive redocking: assess a pose, accept it if favorable, give up on
//! hopeless poses or after `max_iter` assessments, otherwise ask the
//! backend for another pose.

use serde::{Deserialize, Serialize};

use super::backend::{BackendError, DockingBackend};
use super::{assess_structures, AssessmentReport, Config, HardLimits, PipelineError, RedockSettings};
use crate::aa_score::WeightSet;
use crate::chem::MolecularStructure;
use crate::compass::{classify_favorability, FavorabilityThresholds, PcbTriple};

pub const TRACE_SCHEMA: &str = "compass.redock/1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RedockVerdict {
    Favorable,
    HardFail,
    Exhausted,
}

/// What the loop decided after assessing one pose.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepDecision {
    Favorable,
    HardFail,
    Exhausted,
    Refine,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RedockStep {
    pub iteration: usize,
    pub pose_id: String,
    /// Seed the backend used to produce this pose; `None` for the input pose.
    pub seed: Option<u64>,
    pub triple: PcbTriple,
    pub decision: StepDecision,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RedockOutcome<P> {
    #[serde(skip)]
    pub pose: P,
    pub schema: String,
    pub verdict: RedockVerdict,
    pub trace: Vec<RedockStep>,
}

pub fn exceeds_hard_limits(t: &PcbTriple, limits: &HardLimits) -> bool {
    t.binding_affinity > limits.affinity || t.strain_energy > limits.strain || t.clash_count as f64 > limits.clashes
}

/// The loop over an abstract pose type.
///
/// `evaluate` scores a pose; `propose` produces the next pose from the
/// current one and a seed (`base_seed + iteration`).
pub fn redock_loop<P, E, D>(
    initial: P,
    mut evaluate: E,
    mut propose: D,
    thresholds: &FavorabilityThresholds,
    settings: &RedockSettings,
) -> Result<RedockOutcome<P>, PipelineError>
where
    E: FnMut(&P) -> Result<PcbTriple, PipelineError>,
    D: FnMut(&P, u64) -> Result<P, BackendError>,
{
    let mut pose = initial;
    let mut trace = Vec::new();
    let mut seed = None;
    for iteration in 0.. {
        let triple = evaluate(&pose)?;
        let decision = if classify_favorability(&triple, thresholds).is_favorable() {
            StepDecision::Favorable
        } else if exceeds_hard_limits(&triple, &settings.hard_limits) {
            StepDecision::HardFail
        } else if iteration + 1 >= settings.max_iter {
            StepDecision::Exhausted
        } else {
            StepDecision::Refine
        };
        trace.push(RedockStep {
            iteration,
            pose_id: format!("pose_{iteration}"),
            seed,
            triple,
            decision,
        });
        let verdict = match decision {
            StepDecision::Favorable => RedockVerdict::Favorable,
            StepDecision::HardFail => RedockVerdict::HardFail,
            StepDecision::Exhausted => RedockVerdict::Exhausted,
            StepDecision::Refine => {
                let s = settings.base_seed.wrapping_add(iteration as u64);
                pose = propose(&pose, s).map_err(|source| PipelineError::Backend { iteration, source })?;
                seed = Some(s);
                continue;
            }
        };
        return Ok(RedockOutcome {
            pose,
            schema: TRACE_SCHEMA.to_string(),
            verdict,
            trace,
        });
    }
    unreachable!("the loop returns by max_iter")
}

/// Redocks a ligand against a protein, starting from the given pose.
/// Returns the outcome and the assessment of the final pose.
pub fn recursive_redock(
    protein: &MolecularStructure,
    ligand: &MolecularStructure,
    backend: &mut dyn DockingBackend,
    config: &Config,
    weights: &WeightSet,
) -> Result<(RedockOutcome<MolecularStructure>, AssessmentReport), PipelineError> {
    if config.redock.max_iter == 0 {
        return Err(PipelineError::Config("redock.max_iter must be >= 1".into()));
    }
    let mut last: Option<AssessmentReport> = None;
    let outcome = redock_loop(
        ligand.clone(),
        |pose| {
            let report = assess_structures(protein, pose, config, weights)?;
            let triple = report.triple;
            last = Some(report);
            Ok(triple)
        },
        |pose, seed| {
            let coords = backend.dock(protein, pose, seed)?;
            if coords.len() != pose.len() {
                return Err(BackendError::Topology(format!(
                    "{} atoms in, {} coordinates out",
                    pose.len(),
                    coords.len()
                )));
            }
            Ok(pose.with_positions(&coords))
        },
        &config.thresholds,
        &config.redock,
    )?;
    Ok((outcome, last.expect("at least one pose is assessed")))
}
