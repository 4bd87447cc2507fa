//! Connectivity-derived properties: inferred protein bonds, rotatable bonds,
//! main/side-chain labels, binding pocket.

use serde::{Deserialize, Serialize};

use super::PerceptionError;
use crate::chem::{AtomId, BondOrder, Element, MolecularStructure, ResidueIndex, ResidueKind};
use crate::geometry::{pairs_within, SpatialGrid};

/// Added to the covalent-radius sum when inferring bonds from distances.
pub const BOND_TOLERANCE: f64 = 0.45;
const INFERENCE_CUTOFF: f64 = 3.3;

/// Neighbor lists: the bond table when present, otherwise bonds inferred
/// from covalent radii (metals and waters never bond).
pub fn connectivity(mol: &MolecularStructure) -> Vec<Vec<AtomId>> {
    if !mol.bonds.is_empty() || mol.residues.is_empty() {
        return mol.adjacency();
    }
    let positions = mol.positions();
    let mut adj = vec![Vec::new(); mol.atoms.len()];
    let skip = |i: AtomId| {
        mol.atoms[i].element.is_metal()
            || matches!(
                mol.residue_of(i).map(|r| r.kind),
                Some(ResidueKind::Metal | ResidueKind::Water)
            )
    };
    let grid = SpatialGrid::build(&positions, INFERENCE_CUTOFF);
    let pairs = pairs_within(&grid, &positions, INFERENCE_CUTOFF).expect("cutoff equals cell size");
    for p in pairs {
        let (i, j) = (p.query_index, p.grid_index);
        if i >= j || skip(i) || skip(j) {
            continue;
        }
        let (a, b) = (&mol.atoms[i], &mol.atoms[j]);
        if a.is_hydrogen && b.is_hydrogen {
            continue;
        }
        let limit = a.element.covalent_radius() + b.element.covalent_radius() + BOND_TOLERANCE;
        if p.distance < limit {
            adj[i].push(j);
            adj[j].push(i);
        }
    }
    for l in &mut adj {
        l.sort_unstable();
    }
    adj
}

fn heavy_degree(mol: &MolecularStructure, adj: &[Vec<AtomId>], i: AtomId) -> usize {
    adj[i].iter().filter(|&&j| !mol.atoms[j].is_hydrogen).count()
}

/// Carbon carrying a double bond to O or S.
fn is_carbonyl_carbon(mol: &MolecularStructure, adj: &[Vec<AtomId>], c: AtomId) -> bool {
    mol.atoms[c].element == Element::C
        && adj[c].iter().any(|&o| {
            matches!(mol.atoms[o].element, Element::O | Element::S)
                && mol.bond_between(c, o).is_some_and(|b| b.order == BondOrder::Double)
        })
}

/// Indices of rotatable bonds: single, acyclic, both endpoints bonded to at
/// least one other heavy atom, amide C-N excluded.
pub fn rotatable_bonds(mol: &MolecularStructure) -> Vec<usize> {
    let adj = mol.adjacency();
    mol.bonds
        .iter()
        .enumerate()
        .filter(|(_, b)| {
            let (a, c) = (b.atom_a, b.atom_b);
            if b.order != BondOrder::Single || b.in_ring {
                return false;
            }
            if mol.atoms[a].is_hydrogen || mol.atoms[c].is_hydrogen {
                return false;
            }
            if heavy_degree(mol, &adj, a) < 2 || heavy_degree(mol, &adj, c) < 2 {
                return false;
            }
            let amide = |x: AtomId, y: AtomId| mol.atoms[y].element == Element::N && is_carbonyl_carbon(mol, &adj, x);
            !(amide(a, c) || amide(c, a))
        })
        .map(|(k, _)| k)
        .collect()
}

pub fn count_rotatable_bonds(mol: &MolecularStructure) -> usize {
    rotatable_bonds(mol).len()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChainLabel {
    MainChain,
    SideChain,
}

pub const MAIN_CHAIN_NAMES: [&str; 7] = ["N", "CA", "C", "O", "OXT", "H", "HA"];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainPart {
    pub labels: Vec<ChainLabel>,
}

impl ChainPart {
    pub fn label(&self, atom: AtomId) -> ChainLabel {
        self.labels[atom]
    }
}

pub fn split_chain_parts(protein: &MolecularStructure) -> ChainPart {
    let labels = protein
        .atoms
        .iter()
        .map(|a| {
            if MAIN_CHAIN_NAMES.contains(&a.name.as_str()) {
                ChainLabel::MainChain
            } else {
                ChainLabel::SideChain
            }
        })
        .collect();
    ChainPart { labels }
}

pub const DEFAULT_POCKET_CUTOFF: f64 = 8.0;

/// Residues with at least one atom within `cutoff` of any ligand atom, in
/// protein order.
pub fn pocket_residues(
    protein: &MolecularStructure,
    ligand: &MolecularStructure,
    cutoff: f64,
) -> Result<Vec<ResidueIndex>, PerceptionError> {
    if !cutoff.is_finite() || cutoff <= 0.0 {
        return Err(PerceptionError::InvalidCutoff(cutoff));
    }
    let grid = SpatialGrid::build(&protein.positions(), cutoff);
    let pairs = pairs_within(&grid, &ligand.positions(), cutoff).expect("cutoff equals cell size");
    let mut keep = vec![false; protein.residues.len()];
    for p in pairs {
        if let Some(r) = protein.atoms[p.grid_index].residue {
            keep[r] = true;
        }
    }
    let out: Vec<ResidueIndex> = (0..keep.len()).filter(|&r| keep[r]).collect();
    if out.is_empty() {
        return Err(PerceptionError::EmptyPocket { cutoff });
    }
    Ok(out)
}

/// Whole residues near the ligand, as a new structure.
pub fn extract_pocket(
    protein: &MolecularStructure,
    ligand: &MolecularStructure,
    cutoff: f64,
) -> Result<MolecularStructure, PerceptionError> {
    Ok(protein.select_residues(&pocket_residues(protein, ligand, cutoff)?))
}
