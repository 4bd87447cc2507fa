//! Partial charges: file-provided, residue templates for proteins, iterative
//! orbital-electronegativity equalization for ligands.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use super::PerceptionError;
use crate::chem::{AtomId, BondOrder, Element, MolecularStructure, ResidueKind};

pub const GASTEIGER_ITERATIONS: usize = 8;

const TEMPLATE_TEXT: &str = include_str!("../../data/residue_charges.txt");

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Hybridization {
    Sp,
    Sp2,
    Sp3,
}

/// Electronegativity polynomial chi(q) = a + b q + c q^2.
#[derive(Debug, Clone, Copy)]
struct Peoe {
    a: f64,
    b: f64,
    c: f64,
}

impl Peoe {
    const fn new(a: f64, b: f64, c: f64) -> Self {
        Self { a, b, c }
    }

    fn chi(&self, q: f64) -> f64 {
        self.a + self.b * q + self.c * q * q
    }

    /// Electronegativity of the cation, used to scale transfers.
    fn chi_plus(&self, element: Element) -> f64 {
        if element == Element::H {
            20.02
        } else {
            self.a + self.b + self.c
        }
    }
}

fn peoe_parameters(element: Element, hyb: Hybridization) -> Option<Peoe> {
    use Hybridization::*;
    let p = match (element.symbol(), hyb) {
        ("H", _) => Peoe::new(7.17, 6.24, -0.56),
        ("C", Sp3) => Peoe::new(7.98, 9.18, 1.88),
        ("C", Sp2) => Peoe::new(8.79, 9.32, 1.51),
        ("C", Sp) => Peoe::new(10.39, 9.45, 0.73),
        ("N", Sp3) => Peoe::new(11.54, 10.82, 1.36),
        ("N", Sp2) => Peoe::new(12.87, 11.15, 0.85),
        ("N", Sp) => Peoe::new(15.68, 11.70, -0.27),
        ("O", Sp3) => Peoe::new(14.18, 12.92, 1.39),
        ("O", _) => Peoe::new(17.07, 13.79, 0.47),
        ("F", _) => Peoe::new(14.66, 13.85, 2.31),
        ("P", _) => Peoe::new(8.90, 8.24, 0.96),
        ("S", Sp3) => Peoe::new(10.14, 9.13, 1.38),
        ("S", _) => Peoe::new(12.00, 9.88, 1.58),
        ("Cl", _) => Peoe::new(11.00, 9.69, 1.35),
        ("Br", _) => Peoe::new(10.08, 8.47, 1.16),
        ("I", _) => Peoe::new(9.90, 7.96, 0.96),
        _ => return None,
    };
    Some(p)
}

fn hybridization(mol: &MolecularStructure, adj: &[Vec<AtomId>], i: AtomId) -> Hybridization {
    let mut best = Hybridization::Sp3;
    for &j in &adj[i] {
        match mol.bond_between(i, j).map(|b| b.order) {
            Some(BondOrder::Triple) => return Hybridization::Sp,
            Some(BondOrder::Double | BondOrder::Aromatic) => best = Hybridization::Sp2,
            _ => {}
        }
    }
    best
}

/// Gasteiger-Marsili charges over the bond graph, starting from formal
/// charges. The total is conserved: every transfer is antisymmetric.
pub fn assign_gasteiger_charges(mol: &MolecularStructure) -> Result<MolecularStructure, PerceptionError> {
    let adj = mol.adjacency();
    let params: Vec<Peoe> = mol
        .atoms
        .iter()
        .enumerate()
        .map(|(i, a)| {
            peoe_parameters(a.element, hybridization(mol, &adj, i))
                .ok_or_else(|| PerceptionError::MissingParameters(a.element.symbol().to_string()))
        })
        .collect::<Result<_, _>>()?;
    let mut q: Vec<f64> = mol.atoms.iter().map(|a| a.formal_charge as f64).collect();
    let mut damping = 1.0;
    for _ in 0..GASTEIGER_ITERATIONS {
        damping *= 0.5;
        let chi: Vec<f64> = params.iter().zip(&q).map(|(p, &qi)| p.chi(qi)).collect();
        let mut dq = vec![0.0; q.len()];
        for b in &mol.bonds {
            let (i, j) = (b.atom_a, b.atom_b);
            // electrons flow toward the more electronegative atom
            let (donor, acceptor) = if chi[j] >= chi[i] { (i, j) } else { (j, i) };
            let plus = params[donor].chi_plus(mol.atoms[donor].element);
            let t = damping * (chi[acceptor] - chi[donor]) / plus;
            dq[donor] += t;
            dq[acceptor] -= t;
        }
        for (qi, d) in q.iter_mut().zip(dq) {
            *qi += d;
        }
    }
    let mut out = mol.clone();
    for (a, qi) in out.atoms.iter_mut().zip(q) {
        a.partial_charge = Some(qi);
    }
    Ok(out)
}

type TemplateTable = BTreeMap<(String, String), f64>;

/// Parses the `residue atom charge` template format.
pub fn parse_charge_template(text: &str) -> Result<TemplateTable, PerceptionError> {
    let mut table = TemplateTable::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split_whitespace().collect();
        let bad = || PerceptionError::MalformedTemplate { line: n + 1 };
        if f.len() != 3 {
            return Err(bad());
        }
        let q: f64 = f[2].parse().map_err(|_| bad())?;
        table.insert((f[0].to_string(), f[1].to_string()), q);
    }
    Ok(table)
}

fn builtin_template() -> &'static TemplateTable {
    static TABLE: OnceLock<TemplateTable> = OnceLock::new();
    TABLE.get_or_init(|| parse_charge_template(TEMPLATE_TEXT).expect("bundled charge template parses"))
}

/// Protein charges from the bundled residue template; metals carry their
/// ionic charge, waters and unknown groups zero.
pub fn assign_template_charges(protein: &MolecularStructure) -> MolecularStructure {
    let table = builtin_template();
    let mut out = protein.clone();
    for atom in &mut out.atoms {
        let Some(r) = atom.residue.map(|r| &protein.residues[r]) else {
            atom.partial_charge = Some(atom.formal_charge as f64);
            continue;
        };
        let q = match r.kind {
            ResidueKind::StandardAa => table
                .get(&(r.name.clone(), atom.name.clone()))
                .or_else(|| table.get(&("*".to_string(), atom.name.clone())))
                .copied()
                .unwrap_or(0.0),
            ResidueKind::Metal => atom.formal_charge as f64,
            ResidueKind::Water | ResidueKind::OtherHet => 0.0,
        };
        atom.partial_charge = Some(q);
    }
    out
}

/// File charges when every atom has one; otherwise templates for residue
/// structures and equalization for bonded molecules.
pub fn assign_charges(mol: &MolecularStructure) -> Result<MolecularStructure, PerceptionError> {
    if mol.atoms.iter().all(|a| a.partial_charge.is_some()) {
        Ok(mol.clone())
    } else if !mol.residues.is_empty() {
        Ok(assign_template_charges(mol))
    } else {
        assign_gasteiger_charges(mol)
    }
}
