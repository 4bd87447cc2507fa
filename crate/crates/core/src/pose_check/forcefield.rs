//! A subset of the Universal Force Field for small organic ligands.
//!
//! Covers harmonic bonds, cosine angle bends, torsions about rotatable
//! bonds and 12-6 van der Waals terms. Inversions and metal centers are not
//! modeled.

use std::collections::{HashMap, VecDeque};
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::chem::{AtomId, BondOrder, Element, MolecularStructure};
use crate::perception::{perceive_rings, rotatable_bonds};
use crate::Point;

const PARAMS: &str = include_str!("../../data/uff_params.txt");

/// Bond and angle force-constant prefactor, kcal/mol * A / e^2.
const UFF_G: f64 = 664.12;
/// Bond-order correction coefficient.
const BO_COEFF: f64 = 0.1332;
pub const DEFAULT_SCALE_14: f64 = 0.5;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ForceFieldError {
    #[error("no force-field parameters for atom {atom} ({element})")]
    MissingParameters { atom: AtomId, element: String },
    #[error("coordinate count {got} does not match atom count {expected}")]
    CoordinateMismatch { expected: usize, got: usize },
}

/// One row of the parameter table.
#[derive(Debug, Clone, PartialEq)]
pub struct UffType {
    pub label: String,
    pub r1: f64,
    /// Natural angle in degrees.
    pub theta0: f64,
    pub x1: f64,
    pub d1: f64,
    pub z1: f64,
    pub v_sp3: f64,
    pub u_sp2: f64,
    pub chi: f64,
}

impl UffType {
    fn hybrid(&self) -> Hybrid {
        let tag = self.label.get(2..).unwrap_or("");
        match tag.chars().next() {
            Some('3') => Hybrid::Sp3,
            Some('2') | Some('R') => Hybrid::Sp2,
            Some('1') => Hybrid::Sp1,
            _ => Hybrid::Other,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Hybrid {
    Sp1,
    Sp2,
    Sp3,
    Other,
}

pub fn uff_table() -> &'static HashMap<String, UffType> {
    static TABLE: OnceLock<HashMap<String, UffType>> = OnceLock::new();
    TABLE.get_or_init(|| {
        PARAMS
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(|l| {
                let f: Vec<&str> = l.split_whitespace().collect();
                let n = |i: usize| f[i].parse::<f64>().expect("numeric UFF parameter");
                let t = UffType {
                    label: f[0].to_string(),
                    r1: n(1),
                    theta0: n(2),
                    x1: n(3),
                    d1: n(4),
                    z1: n(6),
                    v_sp3: n(7),
                    u_sp2: n(8),
                    chi: n(9),
                };
                (t.label.clone(), t)
            })
            .collect()
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BondTerm {
    pub i: AtomId,
    pub j: AtomId,
    pub k: f64,
    pub r0: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AngleTerm {
    pub i: AtomId,
    /// Vertex atom.
    pub j: AtomId,
    pub k: AtomId,
    pub force: f64,
    /// Natural angle in radians.
    pub theta0: f64,
}

impl AngleTerm {
    fn is_linear(&self) -> bool {
        self.theta0 > 179f64.to_radians()
    }
}

/// `E = V/2 * (1 - cos(n phi0) cos(n phi))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TorsionTerm {
    pub atoms: [AtomId; 4],
    pub v: f64,
    pub n: f64,
    /// Equilibrium phase in degrees.
    pub phi0: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NonbondedTerm {
    pub i: AtomId,
    pub j: AtomId,
    pub d0: f64,
    pub depth: f64,
}

/// A rotatable bond and the atoms that turn with it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rotor {
    pub axis: (AtomId, AtomId),
    /// Atoms on the `axis.1` side, which move when the bond turns.
    pub moving: Vec<AtomId>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForceFieldModel {
    pub n_atoms: usize,
    pub atom_types: Vec<String>,
    pub bonds: Vec<BondTerm>,
    pub angles: Vec<AngleTerm>,
    pub torsions: Vec<TorsionTerm>,
    pub nonbonded: Vec<NonbondedTerm>,
    pub rotors: Vec<Rotor>,
}

/// Assigns a parameter label from element, aromaticity and bond orders.
fn type_label(mol: &MolecularStructure, atom: AtomId, aromatic: bool, adj: &[AtomId]) -> Option<&'static str> {
    let orders: Vec<BondOrder> = adj
        .iter()
        .filter_map(|&o| mol.bond_between(atom, o).map(|b| b.order))
        .collect();
    let aromatic = aromatic || orders.contains(&BondOrder::Aromatic);
    let doubles = orders.iter().filter(|o| **o == BondOrder::Double).count();
    let triple = orders.contains(&BondOrder::Triple) || doubles >= 2;
    let e = mol.atoms[atom].element;
    Some(match e.symbol() {
        "H" => "H_",
        "C" if aromatic => "C_R",
        "C" if triple => "C_1",
        "C" if doubles > 0 => "C_2",
        "C" => "C_3",
        "N" if aromatic => "N_R",
        "N" if triple => "N_1",
        "N" if doubles > 0 => "N_2",
        "N" => "N_3",
        "O" if aromatic => "O_R",
        "O" if doubles > 0 => "O_2",
        "O" => "O_3",
        "S" if aromatic => "S_R",
        "S" if doubles > 0 && adj.len() == 1 => "S_2",
        "S" => "S_3+2",
        "P" => "P_3+3",
        "F" => "F_",
        "Cl" => "Cl",
        "Br" => "Br",
        "I" => "I_",
        _ => return None,
    })
}

/// Natural bond length with bond-order and electronegativity corrections.
pub fn natural_bond_length(a: &UffType, b: &UffType, order: f64) -> f64 {
    let r_bo = -BO_COEFF * (a.r1 + b.r1) * order.ln();
    let r_en = a.r1 * b.r1 * (a.chi.sqrt() - b.chi.sqrt()).powi(2) / (a.chi * a.r1 + b.chi * b.r1);
    a.r1 + b.r1 + r_bo - r_en
}

pub fn bond_force_constant(a: &UffType, b: &UffType, r0: f64) -> f64 {
    UFF_G * a.z1 * b.z1 / r0.powi(3)
}

fn angle_force_constant(a: &UffType, c: &UffType, r_ab: f64, r_bc: f64, theta0: f64) -> f64 {
    let cos0 = theta0.cos();
    let r_ac2 = r_ab * r_ab + r_bc * r_bc - 2.0 * r_ab * r_bc * cos0;
    UFF_G * a.z1 * c.z1 / r_ac2.powf(2.5) * (3.0 * r_ab * r_bc * (1.0 - cos0 * cos0) - r_ac2 * cos0)
}

/// Torsion parameters about a bond between atoms of types `b` and `c`.
fn torsion_params(b: &UffType, c: &UffType, eb: Element, ec: Element) -> Option<(f64, f64, f64)> {
    // sp3 oxygen and sulfur use their own barriers and a twofold term
    let group6 = |e: Element| match e.symbol() {
        "O" => Some(2.0f64),
        "S" => Some(6.8),
        _ => None,
    };
    match (b.hybrid(), c.hybrid()) {
        (Hybrid::Sp3, Hybrid::Sp3) => match (group6(eb), group6(ec)) {
            (Some(vb), Some(vc)) => Some(((vb * vc).sqrt(), 2.0, 90.0)),
            _ => Some(((b.v_sp3 * c.v_sp3).sqrt(), 3.0, 180.0)),
        },
        (Hybrid::Sp2, Hybrid::Sp3) | (Hybrid::Sp3, Hybrid::Sp2) => Some((1.0, 6.0, 0.0)),
        (Hybrid::Sp2, Hybrid::Sp2) => Some((5.0 * (b.u_sp2 * c.u_sp2).sqrt(), 2.0, 180.0)),
        _ => None,
    }
}

/// Topological distance up to 3 bonds from `start`.
fn bond_distances(adj: &[Vec<AtomId>], start: AtomId) -> HashMap<AtomId, u8> {
    let mut dist = HashMap::from([(start, 0u8)]);
    let mut queue = VecDeque::from([start]);
    while let Some(a) = queue.pop_front() {
        let d = dist[&a];
        if d == 3 {
            continue;
        }
        for &n in &adj[a] {
            dist.entry(n).or_insert_with(|| {
                queue.push_back(n);
                d + 1
            });
        }
    }
    dist
}

/// Atoms reachable from `from` without crossing the bond `from`-`blocked`.
fn side_of(adj: &[Vec<AtomId>], from: AtomId, blocked: AtomId) -> Vec<AtomId> {
    let mut seen = vec![false; adj.len()];
    seen[from] = true;
    seen[blocked] = true;
    let mut stack = vec![from];
    let mut out = Vec::new();
    while let Some(a) = stack.pop() {
        out.push(a);
        for &n in &adj[a] {
            if !seen[n] {
                seen[n] = true;
                stack.push(n);
            }
        }
    }
    out.sort_unstable();
    out
}

pub fn build_force_field(mol: &MolecularStructure) -> Result<ForceFieldModel, ForceFieldError> {
    build_force_field_with(mol, DEFAULT_SCALE_14)
}

pub fn build_force_field_with(mol: &MolecularStructure, scale_14: f64) -> Result<ForceFieldModel, ForceFieldError> {
    let table = uff_table();
    let adj = mol.adjacency();
    let n = mol.len();
    let rings = perceive_rings(mol);
    let mut aromatic_ring_of: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (r, ring) in rings.iter().enumerate().filter(|(_, r)| r.is_aromatic) {
        for &a in &ring.atoms {
            aromatic_ring_of[a].push(r);
        }
    }

    let mut types: Vec<&UffType> = Vec::with_capacity(n);
    for i in 0..n {
        let label = type_label(mol, i, !aromatic_ring_of[i].is_empty(), &adj[i]);
        let t = label
            .and_then(|l| table.get(l))
            .ok_or_else(|| ForceFieldError::MissingParameters {
                atom: i,
                element: mol.atoms[i].element.symbol().to_string(),
            })?;
        types.push(t);
    }

    let bond_order = |a: AtomId, b: AtomId| -> f64 {
        let shared = aromatic_ring_of[a].iter().any(|r| aromatic_ring_of[b].contains(r));
        if shared {
            1.5
        } else {
            mol.bond_between(a, b).map_or(1.0, |bd| bd.order.as_f64())
        }
    };
    let r0_of = |a: AtomId, b: AtomId| natural_bond_length(types[a], types[b], bond_order(a, b));

    let bonds = mol
        .bonds
        .iter()
        .map(|b| {
            let r0 = r0_of(b.atom_a, b.atom_b);
            BondTerm {
                i: b.atom_a,
                j: b.atom_b,
                k: bond_force_constant(types[b.atom_a], types[b.atom_b], r0),
                r0,
            }
        })
        .collect();

    let mut angles = Vec::new();
    for j in 0..n {
        for (x, &i) in adj[j].iter().enumerate() {
            for &k in &adj[j][x + 1..] {
                let theta0 = types[j].theta0.to_radians();
                let force = angle_force_constant(types[i], types[k], r0_of(i, j), r0_of(j, k), theta0);
                angles.push(AngleTerm { i, j, k, force, theta0 });
            }
        }
    }

    let mut torsions = Vec::new();
    let mut rotors = Vec::new();
    for bi in rotatable_bonds(mol) {
        let (b, c) = (mol.bonds[bi].atom_a, mol.bonds[bi].atom_b);
        let moving = side_of(&adj, c, b);
        rotors.push(Rotor { axis: (b, c), moving });
        let Some((v, nper, phi0)) = torsion_params(types[b], types[c], mol.atoms[b].element, mol.atoms[c].element)
        else {
            continue;
        };
        let quads: Vec<[AtomId; 4]> = adj[b]
            .iter()
            .filter(|&&a| a != c)
            .flat_map(|&a| {
                adj[c]
                    .iter()
                    .filter(move |&&d| d != b && d != a)
                    .map(move |&d| [a, b, c, d])
            })
            .collect();
        let share = v / quads.len().max(1) as f64;
        torsions.extend(quads.into_iter().map(|atoms| TorsionTerm {
            atoms,
            v: share,
            n: nper,
            phi0,
        }));
    }

    let mut nonbonded = Vec::new();
    for i in 0..n {
        let dist = bond_distances(&adj, i);
        for j in i + 1..n {
            let scale = match dist.get(&j) {
                Some(1) | Some(2) => continue,
                Some(3) => scale_14,
                _ => 1.0,
            };
            nonbonded.push(NonbondedTerm {
                i,
                j,
                d0: (types[i].x1 * types[j].x1).sqrt(),
                depth: scale * (types[i].d1 * types[j].d1).sqrt(),
            });
        }
    }

    Ok(ForceFieldModel {
        n_atoms: n,
        atom_types: types.iter().map(|t| t.label.clone()).collect(),
        bonds,
        angles,
        torsions,
        nonbonded,
        rotors,
    })
}

/// Per-term-class energy totals in kcal/mol.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct EnergyBreakdown {
    pub bond: f64,
    pub angle: f64,
    pub torsion: f64,
    pub nonbonded: f64,
}

impl EnergyBreakdown {
    pub fn total(&self) -> f64 {
        self.bond + self.angle + self.torsion + self.nonbonded
    }
}

impl ForceFieldModel {
    fn check(&self, coords: &[Point]) -> Result<(), ForceFieldError> {
        if coords.len() != self.n_atoms {
            return Err(ForceFieldError::CoordinateMismatch {
                expected: self.n_atoms,
                got: coords.len(),
            });
        }
        Ok(())
    }

    pub fn energy(&self, coords: &[Point]) -> Result<f64, ForceFieldError> {
        Ok(self.breakdown(coords)?.total())
    }

    pub fn breakdown(&self, coords: &[Point]) -> Result<EnergyBreakdown, ForceFieldError> {
        self.check(coords)?;
        Ok(self.evaluate(coords, None))
    }

    /// Total energy and its Cartesian gradient.
    pub fn energy_and_gradient(&self, coords: &[Point]) -> Result<(f64, Vec<Point>), ForceFieldError> {
        self.check(coords)?;
        let mut grad = vec![Point::zero(); self.n_atoms];
        let e = self.evaluate(coords, Some(&mut grad)).total();
        Ok((e, grad))
    }

    fn evaluate(&self, x: &[Point], mut grad: Option<&mut Vec<Point>>) -> EnergyBreakdown {
        let mut out = EnergyBreakdown::default();

        for b in &self.bonds {
            let d = x[b.i] - x[b.j];
            let r = d.norm();
            let dr = r - b.r0;
            out.bond += 0.5 * b.k * dr * dr;
            if let Some(g) = grad.as_deref_mut() {
                if r > 0.0 {
                    let f = d * (b.k * dr / r);
                    g[b.i] += f;
                    g[b.j] -= f;
                }
            }
        }

        for a in &self.angles {
            let (u, v) = (x[a.i] - x[a.j], x[a.k] - x[a.j]);
            let (nu, nv) = (u.norm(), v.norm());
            if nu == 0.0 || nv == 0.0 {
                continue;
            }
            let c = (u.dot(&v) / (nu * nv)).clamp(-1.0, 1.0);
            let de_dc = if a.is_linear() {
                out.angle += a.force * (1.0 + c);
                a.force
            } else {
                let (c0, s0) = (a.theta0.cos(), a.theta0.sin());
                out.angle += a.force * (c - c0).powi(2) / (2.0 * s0 * s0);
                a.force * (c - c0) / (s0 * s0)
            };
            if let Some(g) = grad.as_deref_mut() {
                let (uh, vh) = (u / nu, v / nv);
                let gi = (vh - uh * c) * (de_dc / nu);
                let gk = (uh - vh * c) * (de_dc / nv);
                g[a.i] += gi;
                g[a.k] += gk;
                g[a.j] -= gi + gk;
            }
        }

        for t in &self.torsions {
            let [i, j, k, l] = t.atoms;
            let f = x[i] - x[j];
            let gv = x[j] - x[k];
            let h = x[l] - x[k];
            let a = f.cross(&gv);
            let b = h.cross(&gv);
            let (a2, b2, gn) = (a.norm_squared(), b.norm_squared(), gv.norm());
            if a2 < 1e-12 || b2 < 1e-12 || gn == 0.0 {
                continue;
            }
            // phi in the convention matching the gradient expressions below
            let phi = (b.cross(&a).dot(&gv) / gn).atan2(a.dot(&b));
            let c = (t.n * t.phi0.to_radians()).cos();
            out.torsion += 0.5 * t.v * (1.0 - c * (t.n * phi).cos());
            if let Some(g) = grad.as_deref_mut() {
                let de = 0.5 * t.v * c * t.n * (t.n * phi).sin();
                let gi = a * (-gn / a2);
                let gl = b * (gn / b2);
                let fg = f.dot(&gv) / (a2 * gn);
                let hg = h.dot(&gv) / (b2 * gn);
                let gj = a * (gn / a2) + a * fg - b * hg;
                let gk = b * (-gn / b2) - a * fg + b * hg;
                g[i] += gi * de;
                g[j] += gj * de;
                g[k] += gk * de;
                g[l] += gl * de;
            }
        }

        for p in &self.nonbonded {
            let d = x[p.i] - x[p.j];
            let r = d.norm().max(1e-6);
            let s6 = (p.d0 / r).powi(6);
            out.nonbonded += p.depth * (s6 * s6 - 2.0 * s6);
            if let Some(g) = grad.as_deref_mut() {
                let de_dr = 12.0 * p.depth * (s6 - s6 * s6) / r;
                let f = d * (de_dr / r);
                g[p.i] += f;
                g[p.j] -= f;
            }
        }
        out
    }
}
