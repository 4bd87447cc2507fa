//! Heavy-atom steric clashes between a protein and a ligand.

use serde::{Deserialize, Serialize};

use crate::chem::{AtomId, MolecularStructure, ResidueKind, MAX_VDW_RADIUS};
use crate::geometry::{pairs_within, SpatialGrid};
use crate::Point;

/// Allowed overlap below the summed vdW radii.
pub const CLASH_TOLERANCE: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClashPair {
    pub protein_atom: AtomId,
    pub ligand_atom: AtomId,
    pub distance: f64,
    pub threshold: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ClashReport {
    pub count: usize,
    /// Sorted by ligand atom, then protein atom.
    pub pairs: Vec<ClashPair>,
}

pub fn clash_threshold(vdw_a: f64, vdw_b: f64) -> f64 {
    vdw_a + vdw_b - CLASH_TOLERANCE
}

/// Protein atoms eligible for clash checks: heavy atoms outside waters and
/// metal ions.
pub(crate) fn clash_candidates(protein: &MolecularStructure) -> Vec<AtomId> {
    protein
        .heavy_atoms()
        .filter(|(i, _)| {
            !protein
                .residue_of(*i)
                .is_some_and(|r| matches!(r.kind, ResidueKind::Water | ResidueKind::Metal))
        })
        .map(|(i, _)| i)
        .collect()
}

pub fn count_clashes(protein: &MolecularStructure, ligand: &MolecularStructure) -> ClashReport {
    let prot_ids = clash_candidates(protein);
    let lig_ids: Vec<AtomId> = ligand.heavy_atoms().map(|(i, _)| i).collect();
    let prot_pos: Vec<Point> = prot_ids.iter().map(|&i| protein.atoms[i].position).collect();
    let lig_pos: Vec<Point> = lig_ids.iter().map(|&i| ligand.atoms[i].position).collect();
    if prot_pos.is_empty() || lig_pos.is_empty() {
        return ClashReport::default();
    }
    let cutoff = clash_threshold(MAX_VDW_RADIUS, MAX_VDW_RADIUS);
    let grid = SpatialGrid::build(&prot_pos, cutoff);
    let pairs: Vec<ClashPair> = pairs_within(&grid, &lig_pos, cutoff)
        .expect("cutoff equals the cell size")
        .into_iter()
        .filter_map(|p| {
            let (pa, la) = (prot_ids[p.grid_index], lig_ids[p.query_index]);
            let threshold = clash_threshold(
                protein.atoms[pa].element.vdw_radius(),
                ligand.atoms[la].element.vdw_radius(),
            );
            (p.distance < threshold).then_some(ClashPair {
                protein_atom: pa,
                ligand_atom: la,
                distance: p.distance,
                threshold,
            })
        })
        .collect();
    ClashReport {
        count: pairs.len(),
        pairs,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chem::{Atom, Element, SourceFormat};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn carbons(points: &[Point]) -> MolecularStructure {
        let atoms = points
            .iter()
            .enumerate()
            .map(|(i, p)| Atom::new(i as i64 + 1, Element::C, *p))
            .collect();
        MolecularStructure::new(atoms, vec![], vec![], SourceFormat::Sdf).unwrap()
    }

    fn brute_force(p: &MolecularStructure, l: &MolecularStructure) -> usize {
        let mut n = 0;
        for a in p.atoms.iter().filter(|a| !a.is_hydrogen) {
            for b in l.atoms.iter().filter(|b| !b.is_hydrogen) {
                if a.position.distance(&b.position) < clash_threshold(a.element.vdw_radius(), b.element.vdw_radius()) {
                    n += 1;
                }
            }
        }
        n
    }

    #[test]
    fn two_carbon_threshold() {
        let p = carbons(&[Point::zero()]);
        assert_eq!(count_clashes(&p, &carbons(&[Point::new(2.5, 0.0, 0.0)])).count, 1);
        assert_eq!(count_clashes(&p, &carbons(&[Point::new(3.5, 0.0, 0.0)])).count, 0);
        assert_eq!(count_clashes(&p, &carbons(&[Point::new(100.0, 0.0, 0.0)])).count, 0);
        let r = count_clashes(&p, &carbons(&[Point::new(2.5, 0.0, 0.0)]));
        assert!((r.pairs[0].threshold - 2.9).abs() < 1e-12);
    }

    #[test]
    fn hydrogens_ignored() {
        let h = Atom::new(1, Element::H, Point::new(1.0, 0.0, 0.0));
        let l = MolecularStructure::new(vec![h], vec![], vec![], SourceFormat::Sdf).unwrap();
        assert_eq!(count_clashes(&carbons(&[Point::zero()]), &l).count, 0);
    }

    #[test]
    fn grid_matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let elements = [Element::C, Element::N, Element::O, Element::S, Element::H];
        let cloud = |n: usize, rng: &mut ChaCha8Rng| {
            let atoms = (0..n)
                .map(|i| {
                    let p = Point::new(
                        rng.gen_range(0.0..15.0),
                        rng.gen_range(0.0..15.0),
                        rng.gen_range(0.0..15.0),
                    );
                    Atom::new(i as i64, elements[rng.gen_range(0..elements.len())], p)
                })
                .collect();
            MolecularStructure::new(atoms, vec![], vec![], SourceFormat::Sdf).unwrap()
        };
        for _ in 0..10 {
            let p = cloud(300, &mut rng);
            let l = cloud(40, &mut rng);
            let r = count_clashes(&p, &l);
            assert_eq!(r.count, brute_force(&p, &l));
            assert!(r.pairs.iter().all(|c| c.distance < c.threshold));
        }
    }
}
