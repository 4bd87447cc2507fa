//! Molecular data model and file formats (PDB, SDF V2000, TRIPOS MOL2).

mod element;
mod mol2;
mod pdb;
mod sdf;

use std::collections::HashMap;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::Point;

pub use element::{all_elements, element_info, Element, ElementInfo, MAX_VDW_RADIUS};
pub use mol2::{parse_mol2, write_mol2};
pub use pdb::{complex_pdb_text, parse_pdb, write_complex_pdb, write_pdb};
pub use sdf::{parse_sdf, write_sdf};

pub type AtomId = usize;
pub type ResidueIndex = usize;

#[derive(Debug, Error)]
pub enum ChemError {
    #[error("line {line}: malformed record: {reason}")]
    MalformedRecord { line: usize, reason: String },
    #[error("structure contains no atoms")]
    EmptyStructure,
    #[error("counts mismatch: declared {declared} {what}, found {found}")]
    CountsMismatch {
        what: &'static str,
        declared: usize,
        found: usize,
    },
    #[error("unknown element '{0}'")]
    UnknownElement(String),
    #[error("missing section {0}")]
    MissingSection(&'static str),
    #[error("invalid bond {a}-{b}: {reason}")]
    InvalidBond { a: usize, b: usize, reason: &'static str },
    #[error("unrecognized structure file extension: {0}")]
    UnknownFormat(String),
    #[error("i/o failure on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SourceFormat {
    Pdb,
    Sdf,
    Mol2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BondOrder {
    Single,
    Double,
    Triple,
    Aromatic,
}

impl BondOrder {
    pub fn as_f64(self) -> f64 {
        match self {
            BondOrder::Single => 1.0,
            BondOrder::Double => 2.0,
            BondOrder::Triple => 3.0,
            BondOrder::Aromatic => 1.5,
        }
    }

    pub fn is_multiple(self) -> bool {
        !matches!(self, BondOrder::Single)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    /// Serial number as written in the source file.
    pub serial: i64,
    pub element: Element,
    pub position: Point,
    pub partial_charge: Option<f64>,
    pub formal_charge: i32,
    pub is_hydrogen: bool,
    pub residue: Option<ResidueIndex>,
    pub name: String,
}

impl Atom {
    pub fn new(serial: i64, element: Element, position: Point) -> Self {
        Self {
            serial,
            element,
            position,
            partial_charge: None,
            formal_charge: 0,
            is_hydrogen: element.is_hydrogen(),
            residue: None,
            name: String::new(),
        }
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bond {
    pub atom_a: AtomId,
    pub atom_b: AtomId,
    pub order: BondOrder,
    pub in_ring: bool,
}

impl Bond {
    pub fn new(atom_a: AtomId, atom_b: AtomId, order: BondOrder) -> Self {
        Self {
            atom_a,
            atom_b,
            order,
            in_ring: false,
        }
    }

    pub fn connects(&self, a: AtomId, b: AtomId) -> bool {
        (self.atom_a == a && self.atom_b == b) || (self.atom_a == b && self.atom_b == a)
    }

    /// The endpoint opposite `a`, if `a` is an endpoint.
    pub fn partner(&self, a: AtomId) -> Option<AtomId> {
        if self.atom_a == a {
            Some(self.atom_b)
        } else if self.atom_b == a {
            Some(self.atom_a)
        } else {
            None
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResidueKind {
    StandardAa,
    Metal,
    OtherHet,
    Water,
}

/// The 20 canonical amino-acid codes, in the fixed order used for
/// per-residue-type energy slots.
pub const AMINO_ACIDS: [&str; 20] = [
    "ALA", "ARG", "ASN", "ASP", "CYS", "GLN", "GLU", "GLY", "HIS", "ILE", "LEU", "LYS", "MET", "PHE", "PRO", "SER",
    "THR", "TRP", "TYR", "VAL",
];

const METAL_CODES: [&str; 10] = ["ZN", "CU", "FE", "MG", "MN", "CA", "NA", "K", "NI", "CO"];
const WATER_CODES: [&str; 4] = ["HOH", "WAT", "DOD", "H2O"];

/// Position of a residue name in [`AMINO_ACIDS`].
pub fn amino_acid_index(name: &str) -> Option<usize> {
    AMINO_ACIDS.iter().position(|aa| *aa == name)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Residue {
    pub name: String,
    pub chain: char,
    pub seq_id: i32,
    pub insertion_code: char,
    pub atoms: Vec<AtomId>,
    pub kind: ResidueKind,
    /// Standard residue lacking one of the backbone N, CA, C atoms.
    pub incomplete: bool,
}

impl Residue {
    /// Stable text identity, e.g. `A:LYS42` or `A:SER100B`.
    pub fn label(&self) -> String {
        let mut s = format!("{}:{}{}", self.chain, self.name, self.seq_id);
        if self.insertion_code != ' ' {
            s.push(self.insertion_code);
        }
        s
    }

    pub fn amino_acid_index(&self) -> Option<usize> {
        match self.kind {
            ResidueKind::StandardAa => amino_acid_index(&self.name),
            _ => None,
        }
    }
}

/// Classify a residue from its name and atom count.
pub fn classify_residue(name: &str, n_atoms: usize) -> ResidueKind {
    let name = name.trim();
    if amino_acid_index(name).is_some() {
        ResidueKind::StandardAa
    } else if WATER_CODES.contains(&name) {
        ResidueKind::Water
    } else if n_atoms == 1 && METAL_CODES.contains(&name) {
        ResidueKind::Metal
    } else {
        ResidueKind::OtherHet
    }
}

/// A protein (atoms grouped into residues) or a ligand (atoms plus bonds).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MolecularStructure {
    pub atoms: Vec<Atom>,
    pub bonds: Vec<Bond>,
    pub residues: Vec<Residue>,
    pub source_format: SourceFormat,
}

impl MolecularStructure {
    /// Validates the bond list and marks ring bonds.
    pub fn new(
        atoms: Vec<Atom>,
        mut bonds: Vec<Bond>,
        residues: Vec<Residue>,
        source_format: SourceFormat,
    ) -> Result<Self, ChemError> {
        let n = atoms.len();
        let mut seen = HashMap::new();
        for b in &bonds {
            if b.atom_a == b.atom_b {
                return Err(ChemError::InvalidBond {
                    a: b.atom_a,
                    b: b.atom_b,
                    reason: "self bond",
                });
            }
            if b.atom_a >= n || b.atom_b >= n {
                return Err(ChemError::InvalidBond {
                    a: b.atom_a,
                    b: b.atom_b,
                    reason: "endpoint out of range",
                });
            }
            let key = (b.atom_a.min(b.atom_b), b.atom_a.max(b.atom_b));
            if seen.insert(key, ()).is_some() {
                return Err(ChemError::InvalidBond {
                    a: b.atom_a,
                    b: b.atom_b,
                    reason: "duplicate bond",
                });
            }
        }
        let ring_flags = ring_bond_flags(n, &bonds);
        for (b, in_ring) in bonds.iter_mut().zip(ring_flags) {
            b.in_ring = in_ring;
        }
        Ok(Self {
            atoms,
            bonds,
            residues,
            source_format,
        })
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn positions(&self) -> Vec<Point> {
        self.atoms.iter().map(|a| a.position).collect()
    }

    /// Neighbor lists from the bond table.
    pub fn adjacency(&self) -> Vec<Vec<AtomId>> {
        let mut adj = vec![Vec::new(); self.atoms.len()];
        for b in &self.bonds {
            adj[b.atom_a].push(b.atom_b);
            adj[b.atom_b].push(b.atom_a);
        }
        for l in &mut adj {
            l.sort_unstable();
        }
        adj
    }

    pub fn bond_between(&self, a: AtomId, b: AtomId) -> Option<&Bond> {
        self.bonds.iter().find(|bond| bond.connects(a, b))
    }

    pub fn residue_of(&self, atom: AtomId) -> Option<&Residue> {
        self.atoms[atom].residue.map(|r| &self.residues[r])
    }

    pub fn heavy_atoms(&self) -> impl Iterator<Item = (AtomId, &Atom)> {
        self.atoms.iter().enumerate().filter(|(_, a)| !a.is_hydrogen)
    }

    /// Copy with every position replaced.
    pub fn with_positions(&self, positions: &[Point]) -> Self {
        assert_eq!(
            positions.len(),
            self.atoms.len(),
            "position count must match atom count"
        );
        let mut out = self.clone();
        for (a, p) in out.atoms.iter_mut().zip(positions) {
            a.position = *p;
        }
        out
    }

    /// Sub-structure with the given residues (whole), re-indexed.
    pub fn select_residues(&self, keep: &[ResidueIndex]) -> Self {
        let mut atoms = Vec::new();
        let mut residues = Vec::new();
        let mut remap = HashMap::new();
        for &ri in keep {
            let r = &self.residues[ri];
            let mut ids = Vec::with_capacity(r.atoms.len());
            for &ai in &r.atoms {
                let mut a = self.atoms[ai].clone();
                a.residue = Some(residues.len());
                remap.insert(ai, atoms.len());
                ids.push(atoms.len());
                atoms.push(a);
            }
            residues.push(Residue {
                atoms: ids,
                ..r.clone()
            });
        }
        let bonds = self
            .bonds
            .iter()
            .filter_map(|b| {
                Some(Bond {
                    atom_a: *remap.get(&b.atom_a)?,
                    atom_b: *remap.get(&b.atom_b)?,
                    ..*b
                })
            })
            .collect();
        Self {
            atoms,
            bonds,
            residues,
            source_format: self.source_format,
        }
    }
}

impl fmt::Display for MolecularStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:?} structure: {} atoms, {} bonds, {} residues",
            self.source_format,
            self.atoms.len(),
            self.bonds.len(),
            self.residues.len()
        )
    }
}

/// A bond lies on a ring iff it is not a bridge of the bond graph.
fn ring_bond_flags(n_atoms: usize, bonds: &[Bond]) -> Vec<bool> {
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n_atoms];
    for (k, b) in bonds.iter().enumerate() {
        adj[b.atom_a].push((b.atom_b, k));
        adj[b.atom_b].push((b.atom_a, k));
    }
    let mut disc = vec![usize::MAX; n_atoms];
    let mut low = vec![0usize; n_atoms];
    let mut is_bridge = vec![false; bonds.len()];
    let mut timer = 0;
    // iterative DFS: (vertex, parent edge, next neighbor cursor)
    for root in 0..n_atoms {
        if disc[root] != usize::MAX {
            continue;
        }
        let mut stack = vec![(root, usize::MAX, 0usize)];
        disc[root] = timer;
        low[root] = timer;
        timer += 1;
        while let Some(top) = stack.last_mut() {
            let (v, parent_edge) = (top.0, top.1);
            if top.2 < adj[v].len() {
                let (w, edge) = adj[v][top.2];
                top.2 += 1;
                if edge == parent_edge {
                    continue;
                }
                if disc[w] == usize::MAX {
                    disc[w] = timer;
                    low[w] = timer;
                    timer += 1;
                    stack.push((w, edge, 0));
                } else {
                    low[v] = low[v].min(disc[w]);
                }
            } else {
                stack.pop();
                if let Some(&(u, _, _)) = stack.last() {
                    low[u] = low[u].min(low[v]);
                    if low[v] > disc[u] {
                        is_bridge[parent_edge] = true;
                    }
                }
            }
        }
    }
    is_bridge.into_iter().map(|b| !b).collect()
}

/// Parse a structure file, choosing the format by extension.
pub fn read_structure(path: &Path) -> Result<MolecularStructure, ChemError> {
    let bytes = std::fs::read(path).map_err(|source| ChemError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_structure(&bytes, path)
}

/// Parse in-memory file contents, choosing the format by the extension of
/// `path`.
pub fn parse_structure(bytes: &[u8], path: &Path) -> Result<MolecularStructure, ChemError> {
    let ext = path
        .extension()
        .and_then(|e| e.to_str())
        .map(str::to_ascii_lowercase)
        .unwrap_or_default();
    match ext.as_str() {
        "pdb" | "ent" => parse_pdb(bytes),
        "sdf" | "mol" | "sd" => parse_sdf(bytes),
        "mol2" => parse_mol2(bytes),
        other => Err(ChemError::UnknownFormat(other.to_string())),
    }
}

pub(crate) fn text_of(bytes: &[u8]) -> std::borrow::Cow<'_, str> {
    String::from_utf8_lossy(bytes)
}
