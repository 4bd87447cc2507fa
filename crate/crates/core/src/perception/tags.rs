//! Donor/acceptor/hydrophobe/charge-center typing.
//!
//! Protein atoms are typed by residue and atom name; ligands by element and
//! bonding environment.

use serde::{Deserialize, Serialize};

use super::topology::connectivity;
use crate::chem::{AtomId, BondOrder, Element, MolecularStructure, ResidueKind};
use crate::Point;

/// N-H distance for synthesized backbone amide hydrogens.
const NH_BOND_LENGTH: f64 = 1.01;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct AtomTags {
    pub hbond_donor: bool,
    /// Hydrogen positions on a donor (explicit or synthesized).
    pub donor_hydrogens: Vec<Point>,
    /// Donor without hydrogen coordinates.
    pub heavy_only_donor: bool,
    pub hbond_acceptor: bool,
    pub hydrophobic: bool,
    pub cation_center: bool,
    pub anion_center: bool,
    pub metal: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PharmacophoreTags {
    pub atoms: Vec<AtomTags>,
    /// Neighbor lists used during typing (bond table or inferred).
    pub neighbors: Vec<Vec<AtomId>>,
}

impl PharmacophoreTags {
    pub fn get(&self, atom: AtomId) -> &AtomTags {
        &self.atoms[atom]
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaggingOptions {
    /// Treat histidine ring nitrogens as cationic.
    pub his_cationic: bool,
}

const SIDE_DONORS: [(&str, &[&str]); 10] = [
    ("ARG", &["NE", "NH1", "NH2"]),
    ("ASN", &["ND2"]),
    ("GLN", &["NE2"]),
    ("HIS", &["ND1", "NE2"]),
    ("LYS", &["NZ"]),
    ("SER", &["OG"]),
    ("THR", &["OG1"]),
    ("TYR", &["OH"]),
    ("TRP", &["NE1"]),
    ("CYS", &["SG"]),
];

const SIDE_ACCEPTORS: [(&str, &[&str]); 9] = [
    ("ASP", &["OD1", "OD2"]),
    ("GLU", &["OE1", "OE2"]),
    ("ASN", &["OD1"]),
    ("GLN", &["OE1"]),
    ("HIS", &["ND1", "NE2"]),
    ("SER", &["OG"]),
    ("THR", &["OG1"]),
    ("TYR", &["OH"]),
    ("MET", &["SD"]),
];

fn named(table: &[(&str, &[&str])], residue: &str, atom: &str) -> bool {
    table.iter().any(|(r, names)| *r == residue && names.contains(&atom))
}

pub fn tag_pharmacophores(mol: &MolecularStructure) -> PharmacophoreTags {
    tag_pharmacophores_with(mol, TaggingOptions::default())
}

pub fn tag_pharmacophores_with(mol: &MolecularStructure, opts: TaggingOptions) -> PharmacophoreTags {
    let neighbors = connectivity(mol);
    let atoms = if mol.residues.is_empty() {
        tag_ligand(mol, &neighbors)
    } else {
        tag_protein(mol, &neighbors, opts)
    };
    PharmacophoreTags { atoms, neighbors }
}

fn explicit_hydrogens(mol: &MolecularStructure, adj: &[Vec<AtomId>], i: AtomId) -> Vec<Point> {
    adj[i]
        .iter()
        .filter(|&&j| mol.atoms[j].is_hydrogen)
        .map(|&j| mol.atoms[j].position)
        .collect()
}

/// C or S, uncharged, bonded only to C, H or S.
fn is_hydrophobic(mol: &MolecularStructure, adj: &[Vec<AtomId>], i: AtomId) -> bool {
    let a = &mol.atoms[i];
    matches!(a.element, Element::C | Element::S)
        && a.formal_charge == 0
        && adj[i].iter().all(|&j| {
            let n = &mol.atoms[j];
            matches!(n.element, Element::C | Element::H | Element::S) && n.formal_charge == 0
        })
}

fn tag_protein(mol: &MolecularStructure, adj: &[Vec<AtomId>], opts: TaggingOptions) -> Vec<AtomTags> {
    let mut tags = vec![AtomTags::default(); mol.atoms.len()];
    for (ri, residue) in mol.residues.iter().enumerate() {
        for &i in &residue.atoms {
            let atom = &mol.atoms[i];
            let t = &mut tags[i];
            match residue.kind {
                ResidueKind::Metal => t.metal = true,
                ResidueKind::Water => {
                    if atom.element == Element::O {
                        t.hbond_donor = true;
                        t.hbond_acceptor = true;
                        t.donor_hydrogens = explicit_hydrogens(mol, adj, i);
                        t.heavy_only_donor = t.donor_hydrogens.is_empty();
                    }
                }
                ResidueKind::OtherHet => t.metal = atom.element.is_metal(),
                ResidueKind::StandardAa => {
                    let (res, name) = (residue.name.as_str(), atom.name.as_str());
                    let backbone_donor = name == "N" && res != "PRO";
                    if backbone_donor || named(&SIDE_DONORS, res, name) {
                        t.hbond_donor = true;
                        t.donor_hydrogens = explicit_hydrogens(mol, adj, i);
                        if t.donor_hydrogens.is_empty() && backbone_donor {
                            if let Some(h) = backbone_amide_h(mol, adj, ri, i) {
                                t.donor_hydrogens.push(h);
                            }
                        }
                        t.heavy_only_donor = t.donor_hydrogens.is_empty();
                    }
                    t.hbond_acceptor = matches!(name, "O" | "OXT") || named(&SIDE_ACCEPTORS, res, name);
                    t.hydrophobic = is_hydrophobic(mol, adj, i);
                    t.cation_center = atom.formal_charge > 0
                        || (res == "LYS" && name == "NZ")
                        || (res == "ARG" && name == "CZ")
                        || (opts.his_cationic && res == "HIS" && matches!(name, "ND1" | "NE2"));
                    t.anion_center = atom.formal_charge < 0
                        || (res == "ASP" && matches!(name, "OD1" | "OD2"))
                        || (res == "GLU" && matches!(name, "OE1" | "OE2"));
                }
            }
        }
    }
    tags
}

/// Backbone amide H along the external bisector of C(i-1)-N-CA, when the
/// preceding carbonyl carbon is bonded.
fn backbone_amide_h(mol: &MolecularStructure, adj: &[Vec<AtomId>], residue: usize, n: AtomId) -> Option<Point> {
    let find = |res: &crate::chem::Residue, name: &str| res.atoms.iter().copied().find(|&a| mol.atoms[a].name == name);
    let ca = find(&mol.residues[residue], "CA")?;
    let c_prev = adj[n]
        .iter()
        .copied()
        .find(|&j| mol.atoms[j].name == "C" && mol.atoms[j].residue != Some(residue))?;
    let pn = mol.atoms[n].position;
    let u = (pn - mol.atoms[c_prev].position).normalized()?;
    let v = (pn - mol.atoms[ca].position).normalized()?;
    Some(pn + (u + v).normalized()? * NH_BOND_LENGTH)
}

fn bond_order_sum(mol: &MolecularStructure, adj: &[Vec<AtomId>], i: AtomId) -> f64 {
    adj[i]
        .iter()
        .filter_map(|&j| mol.bond_between(i, j))
        .map(|b| b.order.as_f64())
        .sum()
}

/// Hydrogens implied by standard valence when the file has no explicit H.
fn implicit_hydrogens(mol: &MolecularStructure, adj: &[Vec<AtomId>], i: AtomId) -> usize {
    let a = &mol.atoms[i];
    let valence: i32 = match a.element {
        Element::N => 3 + a.formal_charge,
        Element::O => 2 + a.formal_charge,
        Element::S => 2,
        Element::C => 4 - a.formal_charge.abs(),
        _ => return 0,
    };
    // aromatic bonds count 1.5
    let used = bond_order_sum(mol, adj, i).round() as i32;
    (valence - used).max(0) as usize
}

fn has_aromatic_bond(mol: &MolecularStructure, adj: &[Vec<AtomId>], i: AtomId) -> bool {
    adj[i]
        .iter()
        .any(|&j| mol.bond_between(i, j).is_some_and(|b| b.order == BondOrder::Aromatic))
}

/// N bonded to a carbon that carries C=O.
fn is_amide_n(mol: &MolecularStructure, adj: &[Vec<AtomId>], n: AtomId) -> bool {
    adj[n].iter().any(|&c| {
        mol.atoms[c].element == Element::C
            && adj[c].iter().any(|&o| {
                mol.atoms[o].element == Element::O
                    && mol.bond_between(c, o).is_some_and(|b| b.order == BondOrder::Double)
            })
    })
}

/// Carboxylate oxygens: two terminal, hydrogen-free oxygens on one carbon.
fn carboxylate_oxygens(mol: &MolecularStructure, adj: &[Vec<AtomId>]) -> Vec<AtomId> {
    let mut out = Vec::new();
    for c in 0..mol.atoms.len() {
        if mol.atoms[c].element != Element::C {
            continue;
        }
        let terminal_o: Vec<AtomId> = adj[c]
            .iter()
            .copied()
            .filter(|&o| mol.atoms[o].element == Element::O && adj[o].len() == 1)
            .collect();
        if terminal_o.len() == 2 {
            out.extend(terminal_o);
        }
    }
    out
}

fn tag_ligand(mol: &MolecularStructure, adj: &[Vec<AtomId>]) -> Vec<AtomTags> {
    let any_h = mol.atoms.iter().any(|a| a.is_hydrogen);
    let carboxylate = carboxylate_oxygens(mol, adj);
    let mut tags = vec![AtomTags::default(); mol.atoms.len()];
    for (i, atom) in mol.atoms.iter().enumerate() {
        let t = &mut tags[i];
        let hs = explicit_hydrogens(mol, adj, i);
        let implicit = if any_h { 0 } else { implicit_hydrogens(mol, adj, i) };
        let carries_h = !hs.is_empty() || implicit > 0;
        if carries_h && matches!(atom.element, Element::N | Element::O | Element::S) {
            t.hbond_donor = true;
            t.heavy_only_donor = hs.is_empty();
            t.donor_hydrogens = hs;
        }
        t.hbond_acceptor = match atom.element {
            Element::O => atom.formal_charge <= 0,
            Element::N => {
                let aromatic = has_aromatic_bond(mol, adj, i);
                let valence_used = bond_order_sum(mol, adj, i).round() as usize + implicit;
                atom.formal_charge <= 0 && !(aromatic && carries_h) && !is_amide_n(mol, adj, i) && valence_used < 4
            }
            _ => false,
        };
        t.hydrophobic = is_hydrophobic(mol, adj, i);
        t.cation_center = atom.formal_charge > 0;
        t.anion_center = atom.formal_charge < 0 || carboxylate.contains(&i);
        t.metal = atom.element.is_metal();
    }
    // a carboxylate oxygen never donates, whatever the valence count implied
    for &o in &carboxylate {
        if tags[o].donor_hydrogens.is_empty() {
            tags[o].hbond_donor = false;
            tags[o].heavy_only_donor = false;
        }
    }
    tags
}
