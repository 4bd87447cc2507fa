//! Protein-ligand interaction detection and residue-level fingerprints.

mod fingerprint;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::aa_score::kernels::{classify_stacking, PI_RANGE_MAX, PI_RANGE_MIN};
use crate::chem::{AtomId, Element, MolecularStructure, ResidueIndex, ResidueKind};
use crate::geometry::{angle, pairs_within, ring_pair_geometry, NeighborPair, SpatialGrid};
use crate::perception::PerceivedStructure;

pub use fingerprint::{fingerprint, tanimoto, FingerprintLayout, InteractionFingerprint};

pub const HBOND_MAX_DISTANCE: f64 = 3.5;
pub const HBOND_MIN_DHA_ANGLE: f64 = 120.0;
pub const HBOND_MIN_XDA_ANGLE: f64 = 90.0;
pub const HYDROPHOBIC_MARGIN: f64 = 2.0;
pub const METAL_MAX_DISTANCE: f64 = 3.0;
pub const SALT_BRIDGE_MAX_DISTANCE: f64 = 4.0;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum InteractionError {
    #[error("fingerprint layouts differ")]
    LayoutMismatch,
    #[error("malformed fingerprint hex")]
    MalformedHex,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InteractionKind {
    HbondDonorP,
    HbondAcceptorP,
    Hydrophobic,
    PiStacking,
    PiCation,
    MetalCoordination,
    SaltBridge,
}

impl InteractionKind {
    pub const ALL: [InteractionKind; 7] = [
        InteractionKind::HbondDonorP,
        InteractionKind::HbondAcceptorP,
        InteractionKind::Hydrophobic,
        InteractionKind::PiStacking,
        InteractionKind::PiCation,
        InteractionKind::MetalCoordination,
        InteractionKind::SaltBridge,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            InteractionKind::HbondDonorP => "hbond_donor_p",
            InteractionKind::HbondAcceptorP => "hbond_acceptor_p",
            InteractionKind::Hydrophobic => "hydrophobic",
            InteractionKind::PiStacking => "pi_stacking",
            InteractionKind::PiCation => "pi_cation",
            InteractionKind::MetalCoordination => "metal_coordination",
            InteractionKind::SaltBridge => "salt_bridge",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StackingClass {
    FaceToFace,
    EdgeToFace,
}

/// Which angle an H-bond was validated with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HbondAngle {
    /// D-H...A at the hydrogen.
    DonorHydrogenAcceptor,
    /// Smallest X-D...A over heavy neighbors X of the donor.
    NeighborDonorAcceptor,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "type", content = "index")]
pub enum Site {
    Atom(AtomId),
    Ring(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Interaction {
    pub kind: InteractionKind,
    pub residue: ResidueIndex,
    pub residue_label: String,
    pub protein_site: Site,
    pub ligand_site: Site,
    pub distance: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub angle: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub angle_kind: Option<HbondAngle>,
    /// Lateral ring offset (stacking).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub offset: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stacking: Option<StackingClass>,
    /// Sum of vdW radii (hydrophobic contacts).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d0: Option<f64>,
}

impl Interaction {
    fn new(
        kind: InteractionKind,
        protein: &MolecularStructure,
        residue: ResidueIndex,
        p: Site,
        l: Site,
        d: f64,
    ) -> Self {
        Self {
            kind,
            residue,
            residue_label: protein.residues[residue].label(),
            protein_site: p,
            ligand_site: l,
            distance: d,
            angle: None,
            angle_kind: None,
            offset: None,
            stacking: None,
            d0: None,
        }
    }

    /// Re-checks the stored geometry against the detection thresholds.
    pub fn satisfies_thresholds(&self) -> bool {
        let d = self.distance;
        if d.is_nan() || d <= 0.0 {
            return false;
        }
        match self.kind {
            InteractionKind::HbondDonorP | InteractionKind::HbondAcceptorP => {
                d <= HBOND_MAX_DISTANCE
                    && match (self.angle_kind, self.angle) {
                        (Some(HbondAngle::DonorHydrogenAcceptor), Some(a)) => a >= HBOND_MIN_DHA_ANGLE,
                        (Some(HbondAngle::NeighborDonorAcceptor), Some(a)) => a >= HBOND_MIN_XDA_ANGLE,
                        (None, None) => true,
                        _ => false,
                    }
            }
            InteractionKind::Hydrophobic => self.d0.is_some_and(|d0| d < d0 + HYDROPHOBIC_MARGIN),
            InteractionKind::PiStacking => match (self.offset, self.angle) {
                (Some(s), Some(a)) => classify_stacking(d, s, a) == self.stacking && self.stacking.is_some(),
                _ => false,
            },
            InteractionKind::PiCation => (PI_RANGE_MIN..=PI_RANGE_MAX).contains(&d),
            InteractionKind::MetalCoordination => d < METAL_MAX_DISTANCE,
            InteractionKind::SaltBridge => d <= SALT_BRIDGE_MAX_DISTANCE,
        }
    }
}

/// Protein atoms eligible for interactions of a residue kind.
fn residue_of_kind(protein: &MolecularStructure, atom: AtomId, kind: ResidueKind) -> Option<ResidueIndex> {
    let r = protein.atoms[atom].residue?;
    (protein.residues[r].kind == kind).then_some(r)
}

/// Protein-ligand atom pairs with distance at most `cutoff`.
pub(crate) fn interface_pairs(
    protein: &MolecularStructure,
    ligand: &MolecularStructure,
    cutoff: f64,
) -> Vec<NeighborPair<f64>> {
    // widen the cell slightly so a pair exactly at the cutoff is reported
    let cell = cutoff + 1e-9;
    let grid = SpatialGrid::build(&protein.positions(), cell);
    pairs_within(&grid, &ligand.positions(), cell)
        .expect("cutoff equals cell size")
        .into_iter()
        .filter(|p| p.distance <= cutoff)
        .collect()
}

/// Best angle for donor `d` toward acceptor `a`, or `None` when no geometry
/// check is possible (isolated donor).
fn hbond_angle(donor: &PerceivedStructure, d: AtomId, acceptor: crate::Point) -> Option<(HbondAngle, f64)> {
    let t = donor.tags.get(d);
    let pd = donor.mol.atoms[d].position;
    if !t.donor_hydrogens.is_empty() {
        let best = t
            .donor_hydrogens
            .iter()
            .filter_map(|h| angle(&pd, h, &acceptor).ok())
            .fold(f64::NEG_INFINITY, f64::max);
        return Some((HbondAngle::DonorHydrogenAcceptor, best));
    }
    let worst = donor.tags.neighbors[d]
        .iter()
        .filter(|&&x| !donor.mol.atoms[x].is_hydrogen)
        .filter_map(|&x| angle(&donor.mol.atoms[x].position, &pd, &acceptor).ok())
        .fold(f64::INFINITY, f64::min);
    worst.is_finite().then_some((HbondAngle::NeighborDonorAcceptor, worst))
}

fn hbond_passes(geom: Option<(HbondAngle, f64)>) -> bool {
    match geom {
        Some((HbondAngle::DonorHydrogenAcceptor, a)) => a >= HBOND_MIN_DHA_ANGLE,
        Some((HbondAngle::NeighborDonorAcceptor, a)) => a >= HBOND_MIN_XDA_ANGLE,
        None => true,
    }
}

pub fn detect_hbonds(protein: &PerceivedStructure, ligand: &PerceivedStructure) -> Vec<Interaction> {
    let mut out = Vec::new();
    for p in interface_pairs(&protein.mol, &ligand.mol, HBOND_MAX_DISTANCE) {
        let (pi, li) = (p.grid_index, p.query_index);
        let Some(res) = residue_of_kind(&protein.mol, pi, ResidueKind::StandardAa) else {
            continue;
        };
        let (pt, lt) = (protein.tags.get(pi), ligand.tags.get(li));
        let mut push = |kind, geom: Option<(HbondAngle, f64)>| {
            if hbond_passes(geom) {
                let mut it = Interaction::new(kind, &protein.mol, res, Site::Atom(pi), Site::Atom(li), p.distance);
                it.angle_kind = geom.map(|g| g.0);
                it.angle = geom.map(|g| g.1);
                out.push(it);
            }
        };
        if pt.hbond_donor && lt.hbond_acceptor {
            push(
                InteractionKind::HbondDonorP,
                hbond_angle(protein, pi, ligand.mol.atoms[li].position),
            );
        }
        if lt.hbond_donor && pt.hbond_acceptor {
            push(
                InteractionKind::HbondAcceptorP,
                hbond_angle(ligand, li, protein.mol.atoms[pi].position),
            );
        }
    }
    out
}

fn max_hydrophobic_radius(mol: &MolecularStructure, tags: &crate::perception::PharmacophoreTags) -> f64 {
    mol.atoms
        .iter()
        .enumerate()
        .filter(|(i, _)| tags.get(*i).hydrophobic)
        .map(|(_, a)| a.element.vdw_radius())
        .fold(0.0, f64::max)
}

pub fn detect_hydrophobic(protein: &PerceivedStructure, ligand: &PerceivedStructure) -> Vec<Interaction> {
    let reach = max_hydrophobic_radius(&protein.mol, &protein.tags) + max_hydrophobic_radius(&ligand.mol, &ligand.tags);
    if reach == 0.0 {
        return Vec::new();
    }
    let mut out = Vec::new();
    for p in interface_pairs(&protein.mol, &ligand.mol, reach + HYDROPHOBIC_MARGIN) {
        let (pi, li) = (p.grid_index, p.query_index);
        let Some(res) = residue_of_kind(&protein.mol, pi, ResidueKind::StandardAa) else {
            continue;
        };
        if !(protein.tags.get(pi).hydrophobic && ligand.tags.get(li).hydrophobic) {
            continue;
        }
        let d0 = protein.mol.atoms[pi].element.vdw_radius() + ligand.mol.atoms[li].element.vdw_radius();
        if p.distance < d0 + HYDROPHOBIC_MARGIN {
            let mut it = Interaction::new(
                InteractionKind::Hydrophobic,
                &protein.mol,
                res,
                Site::Atom(pi),
                Site::Atom(li),
                p.distance,
            );
            it.d0 = Some(d0);
            out.push(it);
        }
    }
    out
}

/// Residue owning a protein ring (all members share it).
fn ring_residue(protein: &MolecularStructure, ring: &crate::perception::Ring) -> Option<ResidueIndex> {
    residue_of_kind(protein, ring.atoms[0], ResidueKind::StandardAa)
}

pub fn detect_pi_stacking(protein: &PerceivedStructure, ligand: &PerceivedStructure) -> Vec<Interaction> {
    let mut out = Vec::new();
    for (pr, p_ring) in protein.rings.iter().enumerate() {
        let Some(res) = ring_residue(&protein.mol, p_ring).filter(|_| p_ring.is_aromatic) else {
            continue;
        };
        for (lr, l_ring) in ligand.rings.iter().enumerate().filter(|(_, r)| r.is_aromatic) {
            let g = ring_pair_geometry(&p_ring.plane(), &l_ring.plane());
            if let Some(class) = classify_stacking(g.center_distance, g.offset, g.normal_angle) {
                let mut it = Interaction::new(
                    InteractionKind::PiStacking,
                    &protein.mol,
                    res,
                    Site::Ring(pr),
                    Site::Ring(lr),
                    g.center_distance,
                );
                it.angle = Some(g.normal_angle);
                it.offset = Some(g.offset);
                it.stacking = Some(class);
                out.push(it);
            }
        }
    }
    out
}

pub fn detect_pi_cation(protein: &PerceivedStructure, ligand: &PerceivedStructure) -> Vec<Interaction> {
    let in_range = |d: f64| (PI_RANGE_MIN..=PI_RANGE_MAX).contains(&d);
    let mut out = Vec::new();
    // protein ring, ligand cation
    for (pr, ring) in protein.rings.iter().enumerate() {
        let Some(res) = ring_residue(&protein.mol, ring).filter(|_| ring.is_aromatic) else {
            continue;
        };
        for (li, atom) in ligand.mol.atoms.iter().enumerate() {
            let d = ring.centroid.distance(&atom.position);
            if ligand.tags.get(li).cation_center && in_range(d) {
                out.push(Interaction::new(
                    InteractionKind::PiCation,
                    &protein.mol,
                    res,
                    Site::Ring(pr),
                    Site::Atom(li),
                    d,
                ));
            }
        }
    }
    // ligand ring, protein cation
    let cations: Vec<(AtomId, ResidueIndex)> = (0..protein.mol.atoms.len())
        .filter(|&i| protein.tags.get(i).cation_center)
        .filter_map(|i| residue_of_kind(&protein.mol, i, ResidueKind::StandardAa).map(|r| (i, r)))
        .collect();
    for (lr, ring) in ligand.rings.iter().enumerate().filter(|(_, r)| r.is_aromatic) {
        for &(pi, res) in &cations {
            let d = ring.centroid.distance(&protein.mol.atoms[pi].position);
            if in_range(d) {
                out.push(Interaction::new(
                    InteractionKind::PiCation,
                    &protein.mol,
                    res,
                    Site::Atom(pi),
                    Site::Ring(lr),
                    d,
                ));
            }
        }
    }
    out
}

pub fn detect_metal(protein: &PerceivedStructure, ligand: &PerceivedStructure) -> Vec<Interaction> {
    let mut out = Vec::new();
    for p in interface_pairs(&protein.mol, &ligand.mol, METAL_MAX_DISTANCE) {
        let (pi, li) = (p.grid_index, p.query_index);
        let Some(res) = residue_of_kind(&protein.mol, pi, ResidueKind::Metal) else {
            continue;
        };
        let coordinating = matches!(ligand.mol.atoms[li].element, Element::N | Element::O | Element::S);
        if coordinating && p.distance < METAL_MAX_DISTANCE {
            out.push(Interaction::new(
                InteractionKind::MetalCoordination,
                &protein.mol,
                res,
                Site::Atom(pi),
                Site::Atom(li),
                p.distance,
            ));
        }
    }
    out
}

pub fn detect_salt_bridges(protein: &PerceivedStructure, ligand: &PerceivedStructure) -> Vec<Interaction> {
    let mut out = Vec::new();
    for p in interface_pairs(&protein.mol, &ligand.mol, SALT_BRIDGE_MAX_DISTANCE) {
        let (pi, li) = (p.grid_index, p.query_index);
        let Some(res) = residue_of_kind(&protein.mol, pi, ResidueKind::StandardAa) else {
            continue;
        };
        let (pt, lt) = (protein.tags.get(pi), ligand.tags.get(li));
        if (pt.cation_center && lt.anion_center) || (pt.anion_center && lt.cation_center) {
            out.push(Interaction::new(
                InteractionKind::SaltBridge,
                &protein.mol,
                res,
                Site::Atom(pi),
                Site::Atom(li),
                p.distance,
            ));
        }
    }
    out
}

/// Every detector, merged in a deterministic order.
pub fn detect_all(protein: &PerceivedStructure, ligand: &PerceivedStructure) -> Vec<Interaction> {
    let mut all = detect_hbonds(protein, ligand);
    all.extend(detect_hydrophobic(protein, ligand));
    all.extend(detect_pi_stacking(protein, ligand));
    all.extend(detect_pi_cation(protein, ligand));
    all.extend(detect_metal(protein, ligand));
    all.extend(detect_salt_bridges(protein, ligand));
    all.sort_by(|a, b| {
        (a.kind, a.residue, a.protein_site, a.ligand_site).cmp(&(b.kind, b.residue, b.protein_site, b.ligand_site))
    });
    all
}
