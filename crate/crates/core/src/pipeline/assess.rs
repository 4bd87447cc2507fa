use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{Config, PipelineError, Stage};
use crate::aa_score::{binding_affinity, compute_components, ScoringParams, WeightSet};
use crate::chem::{parse_structure, MolecularStructure};
use crate::compass::{classify_favorability, Favorability, PcbTriple};
use crate::interactions::{detect_all, fingerprint, Interaction, InteractionKind};
use crate::perception::{extract_pocket, split_chain_parts, PerceivedStructure, TaggingOptions};
use crate::pose_check::{build_force_field_with, count_clashes, strain_of, ClashReport, StrainResult};

/// Version tag written into every report.
pub const REPORT_SCHEMA: &str = "compass.report/1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlotValue {
    pub slot: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FingerprintSummary {
    pub residues: Vec<String>,
    pub kinds: Vec<InteractionKind>,
    /// Bits as hex, most significant first.
    pub hex: String,
    pub on_bits: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub protein_path: Option<String>,
    pub ligand_path: Option<String>,
    pub protein_sha256: Option<String>,
    pub ligand_sha256: Option<String>,
    pub config_hash: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssessmentReport {
    pub schema: String,
    /// Affinity, reported (non-negative) strain, clash count.
    pub triple: PcbTriple,
    pub favorability: Favorability,
    pub weights_fitted: bool,
    /// Non-zero affinity slots in slot order.
    pub components: Vec<SlotValue>,
    pub strain: StrainResult,
    pub clashes: ClashReport,
    pub pocket_residues: Vec<String>,
    pub interactions: Vec<Interaction>,
    pub fingerprint: FingerprintSummary,
    pub warnings: Vec<String>,
    pub provenance: Provenance,
}

fn perceive(mol: &MolecularStructure, opts: TaggingOptions) -> Result<PerceivedStructure, PipelineError> {
    PerceivedStructure::new(mol, opts).map_err(|source| PipelineError::Perception {
        stage: Stage::Perception,
        source,
    })
}

/// Scores an in-memory complex. Provenance carries only the config hash.
pub fn assess_structures(
    protein: &MolecularStructure,
    ligand: &MolecularStructure,
    config: &Config,
    weights: &WeightSet,
) -> Result<AssessmentReport, PipelineError> {
    let pocket =
        extract_pocket(protein, ligand, config.cutoffs.pocket).map_err(|source| PipelineError::Perception {
            stage: Stage::Pocket,
            source,
        })?;
    let opts = TaggingOptions {
        his_cationic: config.his_cationic,
    };
    let p = perceive(&pocket, opts)?;
    let l = perceive(ligand, opts)?;

    let interactions = detect_all(&p, &l);
    let fp = fingerprint(&interactions, &p.mol);
    let params = ScoringParams {
        interface_cutoff: config.cutoffs.interface,
    };
    let components = compute_components(&p, &l, &split_chain_parts(&p.mol), &params);
    let affinity = binding_affinity(&components, weights);

    let clashes = count_clashes(&pocket, ligand);
    let ff = build_force_field_with(ligand, config.strain.scale_14)?;
    let strain = strain_of(
        &ff,
        &ligand.positions(),
        config.strain.max_iter,
        config.strain.tolerance,
    )?;

    let triple = PcbTriple::new(affinity, strain.reported(), clashes.count as u32);
    let mut warnings = Vec::new();
    if !weights.fitted {
        warnings.push("affinity uses unfitted unit weights; values are not calibrated kcal/mol".to_string());
    }
    if !strain.converged {
        warnings.push(format!(
            "strain relaxation did not converge in {} iterations",
            strain.iterations
        ));
    }
    if strain.strain < 0.0 {
        warnings.push(format!("negative raw strain {:e} reported as 0", strain.strain));
    }

    Ok(AssessmentReport {
        schema: REPORT_SCHEMA.to_string(),
        favorability: classify_favorability(&triple, &config.thresholds),
        triple,
        weights_fitted: weights.fitted,
        components: components
            .nonzero_slots()
            .into_iter()
            .map(|(slot, value)| SlotValue { slot, value })
            .collect(),
        strain,
        clashes,
        pocket_residues: pocket.residues.iter().map(|r| r.label()).collect(),
        interactions,
        fingerprint: FingerprintSummary {
            hex: fp.to_hex(),
            on_bits: fp.count_ones(),
            residues: fp.layout.residues,
            kinds: fp.layout.kinds,
        },
        warnings,
        provenance: Provenance {
            config_hash: config.hash(),
            ..Provenance::default()
        },
    })
}

fn read_input(path: &Path) -> Result<(MolecularStructure, String), PipelineError> {
    let bytes = std::fs::read(path).map_err(|source| PipelineError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let mol = parse_structure(&bytes, path).map_err(|source| PipelineError::Parse {
        path: path.display().to_string(),
        source,
    })?;
    Ok((mol, hex::encode(Sha256::digest(&bytes))))
}

/// Reads and scores one protein-ligand pair.
pub fn assess_pair(
    protein_path: &Path,
    ligand_path: &Path,
    config: &Config,
    weights: &WeightSet,
) -> Result<AssessmentReport, PipelineError> {
    let (protein, protein_sha) = read_input(protein_path)?;
    let (ligand, ligand_sha) = read_input(ligand_path)?;
    let mut report = assess_structures(&protein, &ligand, config, weights)?;
    report.provenance.protein_path = Some(protein_path.display().to_string());
    report.provenance.ligand_path = Some(ligand_path.display().to_string());
    report.provenance.protein_sha256 = Some(protein_sha);
    report.provenance.ligand_sha256 = Some(ligand_sha);
    Ok(report)
}
