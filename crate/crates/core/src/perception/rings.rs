//! Ring perception: smallest set of smallest rings for bonded molecules,
//! residue templates for aromatic side chains.

use std::collections::{BTreeSet, VecDeque};

use nalgebra::{Matrix3, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::chem::{AtomId, Element, MolecularStructure, ResidueKind};
use crate::geometry::Plane;
use crate::Point;

/// Largest ring reported.
pub const MAX_RING_SIZE: usize = 8;
/// Maximum atom deviation from the least-squares plane for a ring to count
/// as planar.
pub const PLANARITY_TOLERANCE: f64 = 0.3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ring {
    /// Member atoms in cycle order.
    pub atoms: Vec<AtomId>,
    pub is_aromatic: bool,
    pub centroid: Point,
    /// Unit normal, oriented by the cycle order (right-hand rule).
    pub normal: Point,
}

impl Ring {
    /// Builds a ring from ordered member atoms. Returns `None` for fewer
    /// than three atoms or a degenerate (collinear) cycle.
    pub fn from_cycle(atoms: Vec<AtomId>, positions: &[Point], is_aromatic: bool) -> Option<Self> {
        if atoms.len() < 3 {
            return None;
        }
        let pts: Vec<Point> = atoms.iter().map(|&i| positions[i]).collect();
        let centroid = Point::centroid(&pts)?;
        let normal = newell_normal(&pts).normalized()?;
        Some(Self {
            atoms,
            is_aromatic,
            centroid,
            normal,
        })
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn plane(&self) -> Plane<f64> {
        Plane {
            center: self.centroid,
            normal: self.normal,
        }
    }
}

/// Area-weighted polygon normal (Newell's method); its sign follows the
/// vertex order.
fn newell_normal(pts: &[Point]) -> Point {
    let mut n = Point::zero();
    for (i, p) in pts.iter().enumerate() {
        let q = pts[(i + 1) % pts.len()];
        n.x += (p.y - q.y) * (p.z + q.z);
        n.y += (p.z - q.z) * (p.x + q.x);
        n.z += (p.x - q.x) * (p.y + q.y);
    }
    n
}

/// Largest distance of any point from the least-squares plane.
pub fn max_plane_deviation(pts: &[Point]) -> f64 {
    let Some(c) = Point::centroid(pts) else {
        return 0.0;
    };
    let mut cov = Matrix3::<f64>::zeros();
    for p in pts {
        let d = *p - c;
        let v = nalgebra::Vector3::new(d.x, d.y, d.z);
        cov += v * v.transpose();
    }
    let eig = SymmetricEigen::new(cov);
    let (k, _) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("3x3 has eigenvalues");
    let n = eig.eigenvectors.column(k);
    let normal = Point::new(n[0], n[1], n[2]);
    pts.iter().map(|p| (*p - c).dot(&normal).abs()).fold(0.0, f64::max)
}

/// Rings of a bonded molecule, or template rings for protein residues when
/// the structure carries residues but no bonds.
pub fn perceive_rings(mol: &MolecularStructure) -> Vec<Ring> {
    if mol.bonds.is_empty() && !mol.residues.is_empty() {
        return protein_rings(mol);
    }
    let positions = mol.positions();
    let adj = mol.adjacency();
    let mut rings = Vec::new();
    for cycle in smallest_set_of_smallest_rings(mol.atoms.len(), &adj, mol) {
        if cycle.len() > MAX_RING_SIZE {
            continue;
        }
        let aromatic = ring_is_aromatic(mol, &cycle, &positions);
        if let Some(r) = Ring::from_cycle(cycle, &positions, aromatic) {
            rings.push(r);
        }
    }
    rings
}

fn ring_is_aromatic(mol: &MolecularStructure, cycle: &[AtomId], positions: &[Point]) -> bool {
    let ring_bonds: Vec<_> = (0..cycle.len())
        .filter_map(|i| mol.bond_between(cycle[i], cycle[(i + 1) % cycle.len()]))
        .collect();
    if ring_bonds.iter().all(|b| b.order == crate::chem::BondOrder::Aromatic) {
        return true;
    }
    // geometric fallback: planar ring of C/N/O/S where every carbon carries a
    // multiple bond (heteroatoms may donate a lone pair instead)
    let sp2_capable = cycle.iter().all(|&i| {
        let e = mol.atoms[i].element;
        let has_multiple = mol
            .bonds
            .iter()
            .any(|b| (b.atom_a == i || b.atom_b == i) && b.order.is_multiple());
        match e {
            Element::C => has_multiple,
            Element::N | Element::O | Element::S => true,
            _ => false,
        }
    });
    let multiple_bonds = ring_bonds.iter().filter(|b| b.order.is_multiple()).count();
    if !sp2_capable || multiple_bonds == 0 {
        return false;
    }
    let pts: Vec<Point> = cycle.iter().map(|&i| positions[i]).collect();
    max_plane_deviation(&pts) < PLANARITY_TOLERANCE
}

/// SSSR via shortest cycles through each bond, kept when independent over
/// GF(2) edge space, smallest first.
fn smallest_set_of_smallest_rings(n_atoms: usize, adj: &[Vec<AtomId>], mol: &MolecularStructure) -> Vec<Vec<AtomId>> {
    let ring_bonds: Vec<usize> = (0..mol.bonds.len()).filter(|&k| mol.bonds[k].in_ring).collect();
    if ring_bonds.is_empty() {
        return Vec::new();
    }
    let components = count_components(n_atoms, adj);
    let rank = mol.bonds.len() + components - n_atoms;

    let edge_index = |a: AtomId, b: AtomId| -> usize {
        mol.bonds
            .iter()
            .position(|bond| bond.connects(a, b))
            .expect("cycle edge exists")
    };

    let mut candidates: Vec<Vec<AtomId>> = Vec::new();
    let mut seen: BTreeSet<Vec<AtomId>> = BTreeSet::new();
    for &k in &ring_bonds {
        let b = &mol.bonds[k];
        if let Some(path) = shortest_path_avoiding(adj, b.atom_a, b.atom_b) {
            let cycle = canonical_cycle(path);
            let mut key = cycle.clone();
            key.sort_unstable();
            if seen.insert(key) {
                candidates.push(cycle);
            }
        }
    }
    candidates.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));

    let n_edges = mol.bonds.len();
    let mut basis: Vec<Vec<bool>> = Vec::new();
    let mut chosen = Vec::new();
    for cycle in candidates {
        if chosen.len() == rank {
            break;
        }
        let mut v = vec![false; n_edges];
        for i in 0..cycle.len() {
            v[edge_index(cycle[i], cycle[(i + 1) % cycle.len()])] = true;
        }
        if reduce_independent(&mut basis, v) {
            chosen.push(cycle);
        }
    }
    chosen
}

/// Gaussian elimination over GF(2); pushes `v` and returns true when it is
/// independent of the current basis.
fn reduce_independent(basis: &mut Vec<Vec<bool>>, mut v: Vec<bool>) -> bool {
    for row in basis.iter() {
        let pivot = row.iter().position(|&x| x).expect("basis rows are non-zero");
        if v[pivot] {
            for (a, b) in v.iter_mut().zip(row) {
                *a ^= *b;
            }
        }
    }
    let Some(pivot) = v.iter().position(|&x| x) else {
        return false;
    };
    for row in basis.iter_mut() {
        if row[pivot] {
            for (a, b) in row.iter_mut().zip(&v) {
                *a ^= *b;
            }
        }
    }
    basis.push(v);
    true
}

fn count_components(n: usize, adj: &[Vec<AtomId>]) -> usize {
    let mut seen = vec![false; n];
    let mut count = 0;
    for s in 0..n {
        if seen[s] {
            continue;
        }
        count += 1;
        let mut stack = vec![s];
        seen[s] = true;
        while let Some(v) = stack.pop() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
    }
    count
}

/// Shortest path from `from` to `to` that does not use the direct edge.
fn shortest_path_avoiding(adj: &[Vec<AtomId>], from: AtomId, to: AtomId) -> Option<Vec<AtomId>> {
    let mut prev = vec![usize::MAX; adj.len()];
    let mut queue = VecDeque::new();
    prev[from] = from;
    queue.push_back(from);
    while let Some(v) = queue.pop_front() {
        for &w in &adj[v] {
            if v == from && w == to {
                continue;
            }
            if prev[w] != usize::MAX {
                continue;
            }
            prev[w] = v;
            if w == to {
                let mut path = vec![to];
                let mut cur = to;
                while cur != from {
                    cur = prev[cur];
                    path.push(cur);
                }
                return Some(path);
            }
            queue.push_back(w);
        }
    }
    None
}

/// Rotate so the smallest id leads, walking toward its smaller neighbor.
fn canonical_cycle(mut cycle: Vec<AtomId>) -> Vec<AtomId> {
    let (start, _) = cycle.iter().enumerate().min_by_key(|(_, &a)| a).expect("non-empty");
    cycle.rotate_left(start);
    let n = cycle.len();
    if n > 2 && cycle[n - 1] < cycle[1] {
        cycle[1..].reverse();
    }
    cycle
}

const PROTEIN_RING_TEMPLATES: [(&str, &[&str]); 5] = [
    ("PHE", &["CG", "CD1", "CE1", "CZ", "CE2", "CD2"]),
    ("TYR", &["CG", "CD1", "CE1", "CZ", "CE2", "CD2"]),
    ("TRP", &["CD2", "CE2", "CZ2", "CH2", "CZ3", "CE3"]),
    ("TRP", &["CG", "CD1", "NE1", "CE2", "CD2"]),
    ("HIS", &["CG", "ND1", "CE1", "NE2", "CD2"]),
];

fn protein_rings(mol: &MolecularStructure) -> Vec<Ring> {
    let positions = mol.positions();
    let mut rings = Vec::new();
    for residue in &mol.residues {
        if residue.kind != ResidueKind::StandardAa {
            continue;
        }
        for (name, members) in PROTEIN_RING_TEMPLATES {
            if name != residue.name {
                continue;
            }
            let ids: Option<Vec<AtomId>> = members
                .iter()
                .map(|m| residue.atoms.iter().copied().find(|&i| mol.atoms[i].name == *m))
                .collect();
            if let Some(ring) = ids.and_then(|ids| Ring::from_cycle(ids, &positions, true)) {
                rings.push(ring);
            }
        }
    }
    rings
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chem::{parse_pdb, Atom, Bond, BondOrder, SourceFormat};

    fn hexagon(radius: f64, pucker: f64) -> Vec<Point> {
        (0..6)
            .map(|k| {
                let a = (60.0 * k as f64).to_radians();
                let z = if k % 2 == 0 { pucker } else { -pucker };
                Point::new(radius * a.cos(), radius * a.sin(), z)
            })
            .collect()
    }

    fn ring_mol(pts: &[Point], order: BondOrder) -> MolecularStructure {
        let atoms = pts
            .iter()
            .enumerate()
            .map(|(i, p)| Atom::new(i as i64 + 1, Element::C, *p))
            .collect();
        let bonds = (0..pts.len())
            .map(|i| Bond::new(i, (i + 1) % pts.len(), order))
            .collect();
        MolecularStructure::new(atoms, bonds, vec![], SourceFormat::Sdf).unwrap()
    }

    #[test]
    fn benzene_is_one_aromatic_ring() {
        let rings = perceive_rings(&ring_mol(&hexagon(1.39, 0.0), BondOrder::Aromatic));
        assert_eq!(rings.len(), 1);
        assert!(rings[0].is_aromatic);
        assert_eq!(rings[0].len(), 6);
        assert!((rings[0].normal.norm() - 1.0).abs() < 1e-9);
        assert!(rings[0].centroid.norm() < 1e-12);
    }

    #[test]
    fn kekule_benzene_falls_back_to_geometry() {
        let pts = hexagon(1.39, 0.0);
        let atoms = pts
            .iter()
            .enumerate()
            .map(|(i, p)| Atom::new(i as i64 + 1, Element::C, *p))
            .collect();
        let bonds = (0..6)
            .map(|i| {
                Bond::new(
                    i,
                    (i + 1) % 6,
                    if i % 2 == 0 {
                        BondOrder::Double
                    } else {
                        BondOrder::Single
                    },
                )
            })
            .collect();
        let m = MolecularStructure::new(atoms, bonds, vec![], SourceFormat::Sdf).unwrap();
        assert!(perceive_rings(&m)[0].is_aromatic);
    }

    #[test]
    fn chair_cyclohexane_is_not_aromatic() {
        // D3d chair: C-C 1.53, C-C-C 111.4 degrees
        let d13 = 2.0 * 1.53 * (111.4f64 / 2.0).to_radians().sin();
        let r = d13 / 3f64.sqrt();
        let h = 0.5 * (1.53f64.powi(2) - r * r).sqrt();
        let pts = hexagon(r, h);
        let rings = perceive_rings(&ring_mol(&pts, BondOrder::Single));
        assert_eq!(rings.len(), 1);
        assert!(!rings[0].is_aromatic);
        // the pucker alone sits inside the planarity tolerance
        assert!((max_plane_deviation(&pts) - h).abs() < 1e-9);
        assert!(h < PLANARITY_TOLERANCE);
    }

    #[test]
    fn acyclic_has_no_rings() {
        let atoms = (0..4)
            .map(|i| Atom::new(i, Element::C, Point::new(i as f64 * 1.5, 0.0, 0.0)))
            .collect();
        let bonds = (0..3).map(|i| Bond::new(i, i + 1, BondOrder::Single)).collect();
        let m = MolecularStructure::new(atoms, bonds, vec![], SourceFormat::Sdf).unwrap();
        assert!(perceive_rings(&m).is_empty());
    }

    #[test]
    fn naphthalene_gives_two_rings() {
        // two fused hexagons sharing the 0-1 edge
        let s = 1.4;
        let h = s * 3f64.sqrt() / 2.0;
        let pts = vec![
            Point::new(0.0, s / 2.0, 0.0),
            Point::new(0.0, -s / 2.0, 0.0),
            Point::new(h, -s, 0.0),
            Point::new(2.0 * h, -s / 2.0, 0.0),
            Point::new(2.0 * h, s / 2.0, 0.0),
            Point::new(h, s, 0.0),
            Point::new(-h, -s, 0.0),
            Point::new(-2.0 * h, -s / 2.0, 0.0),
            Point::new(-2.0 * h, s / 2.0, 0.0),
            Point::new(-h, s, 0.0),
        ];
        let atoms = pts
            .iter()
            .enumerate()
            .map(|(i, p)| Atom::new(i as i64, Element::C, *p))
            .collect();
        let edges = [
            (0, 1),
            (1, 2),
            (2, 3),
            (3, 4),
            (4, 5),
            (5, 0),
            (1, 6),
            (6, 7),
            (7, 8),
            (8, 9),
            (9, 0),
        ];
        let bonds = edges
            .iter()
            .map(|&(a, b)| Bond::new(a, b, BondOrder::Aromatic))
            .collect();
        let m = MolecularStructure::new(atoms, bonds, vec![], SourceFormat::Sdf).unwrap();
        let rings = perceive_rings(&m);
        assert_eq!(rings.len(), 2);
        assert!(rings.iter().all(|r| r.len() == 6 && r.is_aromatic));
    }

    #[test]
    fn reversing_order_flips_normal() {
        let pts = hexagon(1.39, 0.0);
        let fwd = Ring::from_cycle((0..6).collect(), &pts, true).unwrap();
        let rev = Ring::from_cycle((0..6).rev().collect(), &pts, true).unwrap();
        assert!((fwd.normal + rev.normal).norm() < 1e-12);
        assert!((fwd.centroid - rev.centroid).norm() < 1e-12);
    }

    #[test]
    fn phenylalanine_template_ring() {
        let text = "\
ATOM      1  CG  PHE A   1       0.000   1.390   0.000  1.00  0.00           C
ATOM      2  CD1 PHE A   1       1.204   0.695   0.000  1.00  0.00           C
ATOM      3  CD2 PHE A   1      -1.204   0.695   0.000  1.00  0.00           C
ATOM      4  CE1 PHE A   1       1.204  -0.695   0.000  1.00  0.00           C
ATOM      5  CE2 PHE A   1      -1.204  -0.695   0.000  1.00  0.00           C
ATOM      6  CZ  PHE A   1       0.000  -1.390   0.000  1.00  0.00           C
";
        let m = parse_pdb(text.as_bytes()).unwrap();
        let rings = perceive_rings(&m);
        assert_eq!(rings.len(), 1);
        assert!(rings[0].is_aromatic);
        assert!(rings[0].centroid.norm() < 1e-9);
        assert!((rings[0].normal.z.abs() - 1.0).abs() < 1e-9);
    }
}
