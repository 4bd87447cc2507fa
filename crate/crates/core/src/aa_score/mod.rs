//! Empirical binding-affinity scoring, resolved per amino-acid type and
//! main/side chain.

pub mod kernels;
mod weights;

use serde::{Deserialize, Serialize};

use crate::chem::{ResidueKind, AMINO_ACIDS};
use crate::interactions::{
    detect_hbonds, detect_hydrophobic, detect_metal, detect_pi_cation, detect_pi_stacking, interface_pairs, Site,
};
use crate::perception::{count_rotatable_bonds, split_chain_parts, ChainLabel, ChainPart, PerceivedStructure};
use kernels::{electrostatic_term, hbond_kernel, hydrophobic_kernel, metal_kernel, vdw_kernel};

pub use weights::{default_weights, load_weights, parse_weights, WeightError, WeightSet};

/// Default distance limit for electrostatic and vdW pair sums.
pub const DEFAULT_INTERFACE_CUTOFF: f64 = 10.0;

/// Per-class slot prefixes, in slot order.
pub const PAIR_CLASSES: [&str; 3] = ["hb", "ele", "vdw"];
pub const SCALAR_SLOTS: [&str; 5] = ["hydrophobic", "pi_pi", "pi_cation", "metal", "rot"];
pub const N_SLOTS: usize = PAIR_CLASSES.len() * AMINO_ACIDS.len() * 2 + SCALAR_SLOTS.len();

/// Slot names: `{hb,ele,vdw}_{main,side}_{AA}` then the scalar terms.
pub fn slot_names() -> Vec<String> {
    let mut names = Vec::with_capacity(N_SLOTS);
    for class in PAIR_CLASSES {
        for aa in AMINO_ACIDS {
            for part in ["main", "side"] {
                names.push(format!("{class}_{part}_{aa}"));
            }
        }
    }
    names.extend(SCALAR_SLOTS.iter().map(|s| s.to_string()));
    names
}

/// Energy terms indexed `[amino acid][0 = main, 1 = side]`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct EnergyComponents {
    pub hbond: [[f64; 2]; 20],
    pub electrostatic: [[f64; 2]; 20],
    pub vdw: [[f64; 2]; 20],
    pub hydrophobic: f64,
    pub pi_pi: f64,
    pub pi_cation: f64,
    pub metal: f64,
    pub n_rot: usize,
}

impl EnergyComponents {
    /// Values in [`slot_names`] order.
    pub fn slot_values(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(N_SLOTS);
        for table in [&self.hbond, &self.electrostatic, &self.vdw] {
            for row in table {
                v.extend_from_slice(row);
            }
        }
        v.extend([
            self.hydrophobic,
            self.pi_pi,
            self.pi_cation,
            self.metal,
            self.n_rot as f64,
        ]);
        v
    }

    /// Slot name/value pairs with non-zero values, for reports.
    pub fn nonzero_slots(&self) -> Vec<(String, f64)> {
        slot_names()
            .into_iter()
            .zip(self.slot_values())
            .filter(|(_, v)| *v != 0.0)
            .collect()
    }

    pub fn is_finite(&self) -> bool {
        self.slot_values().iter().all(|v| v.is_finite())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScoringParams {
    pub interface_cutoff: f64,
}

impl Default for ScoringParams {
    fn default() -> Self {
        Self {
            interface_cutoff: DEFAULT_INTERFACE_CUTOFF,
        }
    }
}

fn part_index(label: ChainLabel) -> usize {
    match label {
        ChainLabel::MainChain => 0,
        ChainLabel::SideChain => 1,
    }
}

/// Amino-acid and chain-part bucket of a protein atom in a standard residue.
fn bucket(protein: &PerceivedStructure, chain: &ChainPart, atom: usize) -> Option<(usize, usize)> {
    let res = protein.mol.residue_of(atom)?;
    if res.kind != ResidueKind::StandardAa {
        return None;
    }
    Some((res.amino_acid_index()?, part_index(chain.label(atom))))
}

/// Sums every kernel over the protein-ligand interface.
pub fn compute_components(
    protein: &PerceivedStructure,
    ligand: &PerceivedStructure,
    chain: &ChainPart,
    params: &ScoringParams,
) -> EnergyComponents {
    let mut c = EnergyComponents::default();
    for hb in detect_hbonds(protein, ligand) {
        let Site::Atom(pa) = hb.protein_site else { continue };
        if let Some((aa, part)) = bucket(protein, chain, pa) {
            c.hbond[aa][part] += hbond_kernel(hb.distance);
        }
    }
    for p in interface_pairs(&protein.mol, &ligand.mol, params.interface_cutoff) {
        let (pa, la) = (&protein.mol.atoms[p.grid_index], &ligand.mol.atoms[p.query_index]);
        if pa.is_hydrogen || la.is_hydrogen {
            continue;
        }
        let Some((aa, part)) = bucket(protein, chain, p.grid_index) else {
            continue;
        };
        let (qp, ql) = (pa.partial_charge.unwrap_or(0.0), la.partial_charge.unwrap_or(0.0));
        c.electrostatic[aa][part] += electrostatic_term(qp, ql, p.distance);
        let d0 = pa.element.vdw_radius() + la.element.vdw_radius();
        c.vdw[aa][part] += vdw_kernel(p.distance, d0);
    }
    c.hydrophobic = detect_hydrophobic(protein, ligand)
        .iter()
        .map(|h| hydrophobic_kernel(h.distance, h.d0.expect("hydrophobic contacts carry d0")))
        .sum();
    c.pi_pi = detect_pi_stacking(protein, ligand).len() as f64;
    c.pi_cation = detect_pi_cation(protein, ligand).len() as f64;
    c.metal = detect_metal(protein, ligand)
        .iter()
        .map(|m| metal_kernel(m.distance))
        .sum();
    c.n_rot = count_rotatable_bonds(&ligand.mol);
    c
}

/// Convenience wrapper deriving chain parts from the protein.
pub fn components_for(
    protein: &PerceivedStructure,
    ligand: &PerceivedStructure,
    params: &ScoringParams,
) -> EnergyComponents {
    compute_components(protein, ligand, &split_chain_parts(&protein.mol), params)
}

/// Weighted sum of all slots plus the intercept.
pub fn binding_affinity(components: &EnergyComponents, weights: &WeightSet) -> f64 {
    let dot: f64 = components
        .slot_values()
        .iter()
        .zip(&weights.values)
        .map(|(v, w)| v * w)
        .sum();
    dot + weights.intercept
}
