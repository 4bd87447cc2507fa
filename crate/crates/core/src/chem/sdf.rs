//! MDL SDF / molfile V2000 connection tables (first record only).

use std::fmt::Write as _;

use super::{text_of, Atom, Bond, BondOrder, ChemError, Element, MolecularStructure, SourceFormat};
use crate::Point;

fn fixed_int(line: &str, from: usize, to: usize) -> Option<i64> {
    line.get(from..to.min(line.len()))?.trim().parse().ok()
}

fn is_terminator(line: &str) -> bool {
    line.starts_with("M  ") || line.starts_with("$$$$")
}

/// Coordinates and symbol of an atom-block line, if it looks like one.
fn atom_fields(line: &str) -> Option<(f64, f64, f64, &str)> {
    let mut it = line.split_whitespace();
    let mut coord = || {
        let t = it.next()?;
        if !t.contains('.') {
            return None;
        }
        t.parse::<f64>().ok().filter(|v| v.is_finite())
    };
    let (x, y, z) = (coord()?, coord()?, coord()?);
    let sym = it.next()?;
    Some((x, y, z, sym))
}

fn charge_code(code: i64) -> i32 {
    match code {
        1 => 3,
        2 => 2,
        3 => 1,
        5 => -1,
        6 => -2,
        7 => -3,
        _ => 0,
    }
}

pub fn parse_sdf(bytes: &[u8]) -> Result<MolecularStructure, ChemError> {
    let text = text_of(bytes);
    let lines: Vec<&str> = text.lines().collect();
    if lines.iter().all(|l| l.trim().is_empty()) {
        return Err(ChemError::EmptyStructure);
    }
    let counts_line = lines.get(3).ok_or(ChemError::MalformedRecord {
        line: lines.len(),
        reason: "missing counts line".into(),
    })?;
    let malformed = |line: usize, reason: &str| ChemError::MalformedRecord {
        line: line + 1,
        reason: reason.to_string(),
    };
    if counts_line.contains("V3000") {
        return Err(malformed(3, "V3000 connection tables are not supported"));
    }
    let (n_atoms, n_bonds) = match (fixed_int(counts_line, 0, 3), fixed_int(counts_line, 3, 6)) {
        (Some(a), Some(b)) => (a, b),
        _ => {
            let mut it = counts_line.split_whitespace().map(|t| t.parse::<i64>());
            match (it.next(), it.next()) {
                (Some(Ok(a)), Some(Ok(b))) => (a, b),
                _ => return Err(malformed(3, "unparsable counts line")),
            }
        }
    };
    if n_atoms < 0 || n_bonds < 0 {
        return Err(malformed(3, "negative counts"));
    }
    let (n_atoms, n_bonds) = (n_atoms as usize, n_bonds as usize);

    let mut atoms = Vec::with_capacity(n_atoms);
    for k in 0..n_atoms {
        let idx = 4 + k;
        let mismatch = ChemError::CountsMismatch {
            what: "atoms",
            declared: n_atoms,
            found: k,
        };
        let line = match lines.get(idx) {
            Some(l) if !is_terminator(l) => *l,
            _ => return Err(mismatch),
        };
        let Some((x, y, z, sym)) = atom_fields(line) else {
            return Err(mismatch);
        };
        let element = Element::from_symbol(sym)?;
        let mut atom = Atom::new(k as i64 + 1, element, Point::new(x, y, z));
        if let Some(code) = fixed_int(line, 36, 39) {
            atom.formal_charge = charge_code(code);
        }
        atoms.push(atom);
    }
    let bond_start = 4 + n_atoms;
    if let Some(next) = lines.get(bond_start) {
        if atom_fields(next).is_some() {
            return Err(ChemError::CountsMismatch {
                what: "atoms",
                declared: n_atoms,
                found: n_atoms + 1,
            });
        }
    }

    let mut bonds = Vec::with_capacity(n_bonds);
    for k in 0..n_bonds {
        let idx = bond_start + k;
        let line = match lines.get(idx) {
            Some(l) if !is_terminator(l) => *l,
            _ => {
                return Err(ChemError::CountsMismatch {
                    what: "bonds",
                    declared: n_bonds,
                    found: k,
                })
            }
        };
        let fixed = (fixed_int(line, 0, 3), fixed_int(line, 3, 6), fixed_int(line, 6, 9));
        let (a, b, t) = match fixed {
            (Some(a), Some(b), Some(t)) => (a, b, t),
            _ => {
                let v: Vec<i64> = line.split_whitespace().take(3).filter_map(|t| t.parse().ok()).collect();
                if v.len() != 3 {
                    return Err(malformed(idx, "unparsable bond line"));
                }
                (v[0], v[1], v[2])
            }
        };
        if a < 1 || b < 1 || a as usize > n_atoms || b as usize > n_atoms {
            return Err(malformed(idx, "bond references a missing atom"));
        }
        let order = match t {
            1 => BondOrder::Single,
            2 => BondOrder::Double,
            3 => BondOrder::Triple,
            4 => BondOrder::Aromatic,
            _ => return Err(malformed(idx, "unsupported bond type")),
        };
        bonds.push(Bond::new(a as usize - 1, b as usize - 1, order));
    }

    // properties block: M  CHG replaces atom-block charges
    let mut chg_seen = false;
    for (idx, line) in lines.iter().enumerate().skip(bond_start + n_bonds) {
        if line.starts_with("M  END") || line.starts_with("$$$$") {
            break;
        }
        if let Some(rest) = line.strip_prefix("M  CHG") {
            if !chg_seen {
                for a in &mut atoms {
                    a.formal_charge = 0;
                }
                chg_seen = true;
            }
            let v: Vec<i64> = rest.split_whitespace().filter_map(|t| t.parse().ok()).collect();
            let Some((&count, pairs)) = v.split_first() else {
                return Err(malformed(idx, "empty M  CHG entry"));
            };
            if pairs.len() != 2 * count as usize {
                return Err(malformed(idx, "M  CHG pair count mismatch"));
            }
            for pair in pairs.chunks(2) {
                let a = pair[0];
                if a < 1 || a as usize > n_atoms {
                    return Err(malformed(idx, "M  CHG references a missing atom"));
                }
                atoms[a as usize - 1].formal_charge = pair[1] as i32;
            }
        }
    }

    if atoms.is_empty() {
        return Err(ChemError::EmptyStructure);
    }
    MolecularStructure::new(atoms, bonds, Vec::new(), SourceFormat::Sdf)
}

/// Serialize as a single V2000 record terminated by `$$$$`.
pub fn write_sdf(mol: &MolecularStructure, title: &str) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{}", title.lines().next().unwrap_or(""));
    out.push_str("  compass\n\n");
    let _ = writeln!(
        out,
        "{:>3}{:>3}  0  0  0  0  0  0  0  0999 V2000",
        mol.atoms.len(),
        mol.bonds.len()
    );
    for a in &mol.atoms {
        let p = a.position;
        let _ = writeln!(
            out,
            "{:>10.4}{:>10.4}{:>10.4} {:<3} 0  0  0  0  0  0  0  0  0  0  0  0",
            p.x,
            p.y,
            p.z,
            a.element.symbol()
        );
    }
    for b in &mol.bonds {
        let t = match b.order {
            BondOrder::Single => 1,
            BondOrder::Double => 2,
            BondOrder::Triple => 3,
            BondOrder::Aromatic => 4,
        };
        let _ = writeln!(out, "{:>3}{:>3}{:>3}  0", b.atom_a + 1, b.atom_b + 1, t);
    }
    let charged: Vec<(usize, i32)> = mol
        .atoms
        .iter()
        .enumerate()
        .filter(|(_, a)| a.formal_charge != 0)
        .map(|(i, a)| (i + 1, a.formal_charge))
        .collect();
    for chunk in charged.chunks(8) {
        let _ = write!(out, "M  CHG{:>3}", chunk.len());
        for (i, q) in chunk {
            let _ = write!(out, " {i:>3} {q:>3}");
        }
        out.push('\n');
    }
    out.push_str("M  END\n$$$$\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const DIATOMIC: &str = "\
co
  test

  2  1  0  0  0  0  0  0  0  0999 V2000
    0.0000    0.0000    0.0000 C   0  0  0  0  0  0  0  0  0  0  0  0
    1.1280    0.0000    0.0000 O   0  0  0  0  0  0  0  0  0  0  0  0
  1  2  1  0
M  END
$$$$
";

    #[test]
    fn minimal_block() {
        let m = parse_sdf(DIATOMIC.as_bytes()).unwrap();
        assert_eq!(m.atoms.len(), 2);
        assert_eq!(m.bonds.len(), 1);
        assert_eq!(m.bonds[0].order, BondOrder::Single);
        assert_eq!(m.atoms[1].element, Element::O);
    }

    #[test]
    fn declared_more_atoms_than_present() {
        let text = DIATOMIC.replace("  2  1  0", "  3  1  0");
        assert!(matches!(
            parse_sdf(text.as_bytes()),
            Err(ChemError::CountsMismatch {
                what: "atoms",
                declared: 3,
                ..
            })
        ));
    }

    #[test]
    fn declared_fewer_atoms_than_present() {
        let text = DIATOMIC.replace("  2  1  0", "  1  1  0");
        assert!(matches!(
            parse_sdf(text.as_bytes()),
            Err(ChemError::CountsMismatch { .. })
        ));
    }

    #[test]
    fn missing_bond_lines() {
        let text = DIATOMIC.replace("  2  1  0", "  2  2  0");
        assert!(matches!(
            parse_sdf(text.as_bytes()),
            Err(ChemError::CountsMismatch {
                what: "bonds",
                declared: 2,
                found: 1
            })
        ));
    }

    #[test]
    fn chg_block_sets_formal_charge() {
        let text = DIATOMIC.replace("M  END", "M  CHG  1   1   1\nM  END");
        let m = parse_sdf(text.as_bytes()).unwrap();
        assert_eq!(m.atoms[0].formal_charge, 1);
        assert_eq!(m.atoms[1].formal_charge, 0);
    }

    #[test]
    fn atom_block_charge_code() {
        let text = DIATOMIC.replace(
            "    1.1280    0.0000    0.0000 O   0  0",
            "    1.1280    0.0000    0.0000 O   0  5",
        );
        let m = parse_sdf(text.as_bytes()).unwrap();
        assert_eq!(m.atoms[1].formal_charge, -1);
    }

    #[test]
    fn aromatic_bond_type() {
        let text = DIATOMIC.replace("  1  2  1  0", "  1  2  4  0");
        let m = parse_sdf(text.as_bytes()).unwrap();
        assert_eq!(m.bonds[0].order, BondOrder::Aromatic);
    }

    #[test]
    fn unknown_element() {
        let text = DIATOMIC.replace(" O   0", " Qq  0");
        assert!(matches!(parse_sdf(text.as_bytes()), Err(ChemError::UnknownElement(s)) if s == "Qq"));
    }

    #[test]
    fn writer_round_trip() {
        let mut m = parse_sdf(DIATOMIC.as_bytes()).unwrap();
        m.atoms[0].formal_charge = -1;
        let back = parse_sdf(write_sdf(&m, "co").as_bytes()).unwrap();
        assert_eq!(back.atoms.len(), 2);
        assert_eq!(back.atoms[0].formal_charge, -1);
        assert_eq!(back.bonds, m.bonds);
    }

    #[test]
    fn three_digit_atom_indices() {
        let mut text = String::from("big\n\n\n101100  0  0  0  0  0  0  0  0999 V2000\n");
        for i in 0..101 {
            text.push_str(&format!("{:>10.4}    0.0000    0.0000 C   0  0\n", i as f64 * 1.5));
        }
        for i in 1..=100 {
            text.push_str(&format!("{:>3}{:>3}  1  0\n", i, i + 1));
        }
        text.push_str("M  END\n");
        let m = parse_sdf(text.as_bytes()).unwrap();
        assert_eq!(m.atoms.len(), 101);
        assert_eq!(m.bonds.last().unwrap().atom_b, 100);
    }
}
