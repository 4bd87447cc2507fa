//! Chemical perception on parsed structures.

mod charges;
mod rings;
mod tags;
mod topology;

use thiserror::Error;

pub use charges::{
    assign_charges, assign_gasteiger_charges, assign_template_charges, parse_charge_template, GASTEIGER_ITERATIONS,
};
pub use rings::{max_plane_deviation, perceive_rings, Ring, MAX_RING_SIZE, PLANARITY_TOLERANCE};
pub use tags::{tag_pharmacophores, tag_pharmacophores_with, AtomTags, PharmacophoreTags, TaggingOptions};
pub use topology::{
    connectivity, count_rotatable_bonds, extract_pocket, pocket_residues, rotatable_bonds, split_chain_parts,
    ChainLabel, ChainPart, BOND_TOLERANCE, DEFAULT_POCKET_CUTOFF, MAIN_CHAIN_NAMES,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PerceptionError {
    #[error("no charge parameters for element {0}")]
    MissingParameters(String),
    #[error("no protein residue within {cutoff} A of the ligand")]
    EmptyPocket { cutoff: f64 },
    #[error("pocket cutoff must be positive and finite, got {0}")]
    InvalidCutoff(f64),
    #[error("malformed charge template line {line}")]
    MalformedTemplate { line: usize },
}

/// A structure with charges, pharmacophore tags and rings attached.
#[derive(Debug, Clone, PartialEq)]
pub struct PerceivedStructure {
    pub mol: crate::chem::MolecularStructure,
    pub tags: PharmacophoreTags,
    pub rings: Vec<Ring>,
}

impl PerceivedStructure {
    pub fn new(mol: &crate::chem::MolecularStructure, opts: TaggingOptions) -> Result<Self, PerceptionError> {
        let mol = assign_charges(mol)?;
        let tags = tag_pharmacophores_with(&mol, opts);
        let rings = perceive_rings(&mol);
        Ok(Self { mol, tags, rings })
    }
}
