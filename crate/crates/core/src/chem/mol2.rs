//! TRIPOS MOL2 (first molecule only).

use std::fmt::Write as _;

use super::{text_of, Atom, Bond, BondOrder, ChemError, Element, MolecularStructure, SourceFormat};
use crate::Point;

#[derive(Clone, Copy, PartialEq)]
enum Section {
    Other,
    Atom,
    Bond,
}

/// Element from a SYBYL atom type ("C.ar" -> C, "Cl" -> Cl).
fn element_from_sybyl(t: &str) -> Result<Element, ChemError> {
    let base = t.split('.').next().unwrap_or(t);
    Element::from_symbol(base)
}

pub fn parse_mol2(bytes: &[u8]) -> Result<MolecularStructure, ChemError> {
    let text = text_of(bytes);
    let mut section = Section::Other;
    let mut saw_atom_section = false;
    let mut molecules = 0;
    let mut atoms: Vec<Atom> = Vec::new();
    let mut ids = std::collections::HashMap::new();
    let mut raw_bonds: Vec<(usize, i64, i64, String)> = Vec::new();

    for (lineno, line) in text.lines().enumerate() {
        let lineno = lineno + 1;
        let trimmed = line.trim();
        if let Some(tag) = trimmed.strip_prefix("@<TRIPOS>") {
            section = match tag {
                "ATOM" => {
                    saw_atom_section = true;
                    Section::Atom
                }
                "BOND" => Section::Bond,
                "MOLECULE" => {
                    molecules += 1;
                    if molecules > 1 {
                        break;
                    }
                    Section::Other
                }
                _ => Section::Other,
            };
            continue;
        }
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let malformed = |reason: &str| ChemError::MalformedRecord {
            line: lineno,
            reason: reason.to_string(),
        };
        let fields: Vec<&str> = trimmed.split_whitespace().collect();
        match section {
            Section::Atom => {
                if fields.len() < 6 {
                    return Err(malformed("atom record needs at least 6 fields"));
                }
                let id: i64 = fields[0].parse().map_err(|_| malformed("atom id"))?;
                let coord = |i: usize| fields[i].parse::<f64>().ok().filter(|v| v.is_finite());
                let (Some(x), Some(y), Some(z)) = (coord(2), coord(3), coord(4)) else {
                    return Err(malformed("unparsable coordinates"));
                };
                let element = element_from_sybyl(fields[5])?;
                let mut atom = Atom::new(id, element, Point::new(x, y, z)).with_name(fields[1]);
                if let Some(q) = fields.get(8) {
                    atom.partial_charge = Some(q.parse().map_err(|_| malformed("partial charge"))?);
                }
                if ids.insert(id, atoms.len()).is_some() {
                    return Err(malformed("duplicate atom id"));
                }
                atoms.push(atom);
            }
            Section::Bond => {
                if fields.len() < 4 {
                    return Err(malformed("bond record needs 4 fields"));
                }
                let a: i64 = fields[1].parse().map_err(|_| malformed("bond origin"))?;
                let b: i64 = fields[2].parse().map_err(|_| malformed("bond target"))?;
                raw_bonds.push((lineno, a, b, fields[3].to_ascii_lowercase()));
            }
            Section::Other => {}
        }
    }

    if !saw_atom_section {
        return Err(ChemError::MissingSection("@<TRIPOS>ATOM"));
    }
    if atoms.is_empty() {
        return Err(ChemError::EmptyStructure);
    }
    let mut bonds = Vec::with_capacity(raw_bonds.len());
    for (line, a, b, t) in raw_bonds {
        let malformed = |reason: &str| ChemError::MalformedRecord {
            line,
            reason: reason.to_string(),
        };
        let (Some(&ia), Some(&ib)) = (ids.get(&a), ids.get(&b)) else {
            return Err(malformed("bond references a missing atom"));
        };
        let order = match t.as_str() {
            "1" | "am" => BondOrder::Single,
            "2" => BondOrder::Double,
            "3" => BondOrder::Triple,
            "ar" => BondOrder::Aromatic,
            // dummy / unknown / not-connected bonds carry no chemistry
            "du" | "un" | "nc" => continue,
            _ => return Err(malformed("unsupported bond type")),
        };
        bonds.push(Bond::new(ia, ib, order));
    }
    MolecularStructure::new(atoms, bonds, Vec::new(), SourceFormat::Mol2)
}

fn sybyl_type(mol: &MolecularStructure, i: usize, adj: &[Vec<usize>]) -> String {
    let atom = &mol.atoms[i];
    let orders: Vec<BondOrder> = adj[i]
        .iter()
        .filter_map(|&j| mol.bond_between(i, j).map(|b| b.order))
        .collect();
    let sym = atom.element.symbol();
    let suffix = if orders.contains(&BondOrder::Aromatic) {
        "ar"
    } else if orders.contains(&BondOrder::Triple) {
        "1"
    } else if orders.contains(&BondOrder::Double) {
        "2"
    } else {
        "3"
    };
    match sym {
        "C" | "N" | "O" | "S" | "P" => format!("{sym}.{suffix}"),
        _ => sym.to_string(),
    }
}

/// Serialize as a single MOL2 molecule. Atoms without a partial charge are
/// written as 0.0.
pub fn write_mol2(mol: &MolecularStructure, name: &str) -> String {
    let adj = mol.adjacency();
    let mut out = String::new();
    out.push_str("@<TRIPOS>MOLECULE\n");
    let _ = writeln!(out, "{}", if name.is_empty() { "molecule" } else { name });
    let _ = writeln!(out, "{:>5}{:>6}     1     0     0", mol.atoms.len(), mol.bonds.len());
    out.push_str("SMALL\nUSER_CHARGES\n\n@<TRIPOS>ATOM\n");
    for (i, a) in mol.atoms.iter().enumerate() {
        let label = if a.name.is_empty() {
            format!("{}{}", a.element.symbol(), i + 1)
        } else {
            a.name.replace(char::is_whitespace, "_")
        };
        let _ = writeln!(
            out,
            "{:>7} {:<8}{:>10.4}{:>10.4}{:>10.4} {:<6}{:>5}  LIG1  {:>9.4}",
            i + 1,
            label,
            a.position.x,
            a.position.y,
            a.position.z,
            sybyl_type(mol, i, &adj),
            1,
            a.partial_charge.unwrap_or(0.0)
        );
    }
    out.push_str("@<TRIPOS>BOND\n");
    for (k, b) in mol.bonds.iter().enumerate() {
        let t = match b.order {
            BondOrder::Single => "1",
            BondOrder::Double => "2",
            BondOrder::Triple => "3",
            BondOrder::Aromatic => "ar",
        };
        let _ = writeln!(out, "{:>6}{:>6}{:>6} {}", k + 1, b.atom_a + 1, b.atom_b + 1, t);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const WATERISH: &str = "\
@<TRIPOS>MOLECULE
frag
    3     2     1     0     0
SMALL
USER_CHARGES

@<TRIPOS>ATOM
      1 C1          0.0000    0.0000    0.0000 C.ar      1  LIG1      0.1000
      2 C2          1.3900    0.0000    0.0000 C.ar      1  LIG1      0.2456
      3 O3          2.1000    1.1000    0.0000 O.3       1  LIG1     -0.3456
@<TRIPOS>BOND
     1     1     2 ar
     2     2     3 1
";

    #[test]
    fn charges_from_ninth_column() {
        let m = parse_mol2(WATERISH.as_bytes()).unwrap();
        assert_eq!(m.atoms[2].partial_charge, Some(-0.3456));
        assert_eq!(m.atoms[2].element, Element::O);
        assert_eq!(m.atoms[0].name, "C1");
    }

    #[test]
    fn aromatic_bond_type() {
        let m = parse_mol2(WATERISH.as_bytes()).unwrap();
        assert_eq!(m.bonds[0].order, BondOrder::Aromatic);
        assert_eq!(m.bonds[1].order, BondOrder::Single);
    }

    #[test]
    fn missing_atom_section() {
        let text = "@<TRIPOS>MOLECULE\nx\n 0 0\n@<TRIPOS>BOND\n";
        assert!(matches!(parse_mol2(text.as_bytes()), Err(ChemError::MissingSection(_))));
    }

    #[test]
    fn malformed_atom_line() {
        let text = WATERISH.replace("2.1000    1.1000", "2.1000    x.1000");
        assert!(matches!(
            parse_mol2(text.as_bytes()),
            Err(ChemError::MalformedRecord { .. })
        ));
    }

    #[test]
    fn dangling_bond() {
        let text = WATERISH.replace("     2     2     3 1", "     2     2     9 1");
        assert!(matches!(
            parse_mol2(text.as_bytes()),
            Err(ChemError::MalformedRecord { .. })
        ));
    }

    #[test]
    fn writer_round_trip() {
        let m = parse_mol2(WATERISH.as_bytes()).unwrap();
        let back = parse_mol2(write_mol2(&m, "frag").as_bytes()).unwrap();
        assert_eq!(back.atoms.len(), 3);
        assert_eq!(back.bonds, m.bonds);
        for (a, b) in m.atoms.iter().zip(&back.atoms) {
            assert_eq!(a.element, b.element);
            assert_eq!(a.partial_charge, b.partial_charge);
            assert!(a.position.distance(&b.position) < 1e-4);
        }
    }
}
