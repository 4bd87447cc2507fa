//! Fixed-column PDB reading and writing.

use std::fmt::Write as _;
use std::path::Path;

use super::{
    classify_residue, text_of, Atom, ChemError, Element, MolecularStructure, Residue, ResidueKind, SourceFormat,
};
use crate::Point;

/// 1-based inclusive column slice, tolerant of short lines.
fn columns(line: &str, from: usize, to: usize) -> &str {
    let start = (from - 1).min(line.len());
    let end = to.min(line.len());
    line.get(start..end).unwrap_or("")
}

fn column_char(line: &str, col: usize) -> char {
    line.as_bytes().get(col - 1).map(|&b| b as char).unwrap_or(' ')
}

/// Element from the atom-name field when columns 77-78 are blank.
///
/// A name starting in column 13 (no leading blank) carries a two-letter
/// symbol ("ZN  ", "CL1 "); otherwise the first alphabetic character is
/// the symbol.
fn element_from_name(name_field: &str, res_name: &str) -> Option<Element> {
    let trimmed = name_field.trim();
    let letters: String = trimmed.chars().filter(|c| c.is_ascii_alphabetic()).collect();
    if letters.is_empty() {
        return None;
    }
    let starts_in_13 = !name_field.starts_with(' ') && name_field.len() >= 2;
    if starts_in_13 || trimmed == res_name.trim() {
        if let Some(two) = letters.get(..2) {
            if let Ok(e) = Element::from_symbol(two) {
                return Some(e);
            }
        }
    }
    Element::from_symbol(&letters[..1]).ok()
}

fn parse_charge(field: &str) -> i32 {
    let f = field.trim();
    if f.len() != 2 {
        return 0;
    }
    let (digit, sign) = (f.as_bytes()[0], f.as_bytes()[1]);
    if !digit.is_ascii_digit() {
        return 0;
    }
    let v = (digit - b'0') as i32;
    match sign {
        b'+' => v,
        b'-' => -v,
        _ => 0,
    }
}

/// Parse ATOM/HETATM records of the first model.
pub fn parse_pdb(bytes: &[u8]) -> Result<MolecularStructure, ChemError> {
    let text = text_of(bytes);
    let mut atoms: Vec<Atom> = Vec::new();
    let mut residues: Vec<Residue> = Vec::new();
    let mut current_key: Option<(char, i32, char, String)> = None;

    for (lineno, line) in text.lines().enumerate() {
        let lineno = lineno + 1;
        let record = columns(line, 1, 6);
        if record.starts_with("ENDMDL") {
            break;
        }
        if !(record.starts_with("ATOM") || record.starts_with("HETATM")) {
            continue;
        }
        let malformed = |reason: &str| ChemError::MalformedRecord {
            line: lineno,
            reason: reason.to_string(),
        };
        if line.len() < 54 {
            return Err(malformed("record shorter than the coordinate columns"));
        }
        let alt_loc = column_char(line, 17);
        if alt_loc != ' ' && alt_loc != 'A' {
            continue;
        }
        let coord = |from, to| columns(line, from, to).trim().parse::<f64>();
        let (x, y, z) = match (coord(31, 38), coord(39, 46), coord(47, 54)) {
            (Ok(x), Ok(y), Ok(z)) if x.is_finite() && y.is_finite() && z.is_finite() => (x, y, z),
            _ => return Err(malformed("unparsable coordinates")),
        };
        let serial = columns(line, 7, 11)
            .trim()
            .parse::<i64>()
            .unwrap_or(atoms.len() as i64 + 1);
        let name_field = columns(line, 13, 16);
        let res_name = columns(line, 18, 20).trim().to_string();
        let chain = column_char(line, 22);
        let seq_id = columns(line, 23, 26)
            .trim()
            .parse::<i32>()
            .map_err(|_| malformed("unparsable residue sequence number"))?;
        let icode = column_char(line, 27);
        let element_field = columns(line, 77, 78).trim();
        let element = if element_field.is_empty() {
            element_from_name(name_field, &res_name)
                .ok_or_else(|| ChemError::UnknownElement(name_field.trim().to_string()))?
        } else {
            Element::from_symbol(element_field)?
        };

        let key = (chain, seq_id, icode, res_name.clone());
        if current_key.as_ref() != Some(&key) {
            residues.push(Residue {
                name: res_name,
                chain,
                seq_id,
                insertion_code: icode,
                atoms: Vec::new(),
                kind: ResidueKind::OtherHet,
                incomplete: false,
            });
            current_key = Some(key);
        }
        let residue_index = residues.len() - 1;
        residues[residue_index].atoms.push(atoms.len());

        let mut atom = Atom::new(serial, element, Point::new(x, y, z)).with_name(name_field.trim());
        atom.formal_charge = parse_charge(columns(line, 79, 80));
        atom.residue = Some(residue_index);
        atoms.push(atom);
    }

    if atoms.is_empty() {
        return Err(ChemError::EmptyStructure);
    }
    for r in &mut residues {
        r.kind = classify_residue(&r.name, r.atoms.len());
        if r.kind == ResidueKind::StandardAa {
            let has = |n: &str| r.atoms.iter().any(|&i| atoms[i].name == n);
            r.incomplete = !(has("N") && has("CA") && has("C"));
        }
        if r.kind == ResidueKind::Metal {
            let a = &mut atoms[r.atoms[0]];
            if a.formal_charge == 0 {
                a.formal_charge = a.element.info().ion_charge;
            }
        }
    }
    MolecularStructure::new(atoms, Vec::new(), residues, SourceFormat::Pdb)
}

fn atom_name_field(name: &str, element: Element) -> String {
    if name.len() < 4 && element.symbol().len() == 1 {
        format!(" {name:<3}")
    } else {
        format!("{:<4}", &name[..name.len().min(4)])
    }
}

fn charge_field(q: i32) -> String {
    match q {
        0 => "  ".to_string(),
        q if q > 0 => format!("{}+", q.min(9)),
        q => format!("{}-", (-q).min(9)),
    }
}

#[allow(clippy::too_many_arguments)]
fn push_record(
    out: &mut String,
    record: &str,
    serial: usize,
    atom: &Atom,
    name: &str,
    res_name: &str,
    chain: char,
    seq_id: i32,
    icode: char,
) {
    let p = atom.position;
    let _ = writeln!(
        out,
        "{:<6}{:>5} {} {:>3} {}{:>4}{}   {:>8.3}{:>8.3}{:>8.3}{:>6.2}{:>6.2}          {:>2}{}",
        record,
        serial % 100_000,
        atom_name_field(name, atom.element),
        res_name,
        chain,
        seq_id,
        icode,
        p.x,
        p.y,
        p.z,
        1.0,
        0.0,
        atom.element.symbol().to_ascii_uppercase(),
        charge_field(atom.formal_charge),
    );
}

fn protein_records(out: &mut String, protein: &MolecularStructure, serial: &mut usize) {
    for (i, atom) in protein.atoms.iter().enumerate() {
        let (record, res_name, chain, seq_id, icode) = match atom.residue.map(|r| &protein.residues[r]) {
            Some(r) => {
                let record = if r.kind == ResidueKind::StandardAa {
                    "ATOM"
                } else {
                    "HETATM"
                };
                (record, r.name.as_str(), r.chain, r.seq_id, r.insertion_code)
            }
            None => ("HETATM", "UNK", 'A', 1, ' '),
        };
        let name = if atom.name.is_empty() {
            format!("{}{}", atom.element.symbol().to_ascii_uppercase(), i + 1)
        } else {
            atom.name.clone()
        };
        push_record(out, record, *serial, atom, &name, res_name, chain, seq_id, icode);
        *serial += 1;
    }
}

/// Serialize one structure as PDB text.
pub fn write_pdb(structure: &MolecularStructure) -> String {
    let mut out = String::new();
    let mut serial = 1;
    protein_records(&mut out, structure, &mut serial);
    out.push_str("END\n");
    out
}

/// Protein ATOM records followed by the ligand as HETATM `LIG` in chain Z.
pub fn complex_pdb_text(protein: &MolecularStructure, ligand: &MolecularStructure) -> Result<String, ChemError> {
    if protein.is_empty() || ligand.is_empty() {
        return Err(ChemError::EmptyStructure);
    }
    let mut out = String::new();
    let mut serial = 1;
    protein_records(&mut out, protein, &mut serial);
    out.push_str("TER\n");
    let mut counts = std::collections::HashMap::new();
    for atom in &ligand.atoms {
        let name = if atom.name.is_empty() || atom.name.len() > 4 {
            let c = counts.entry(atom.element).or_insert(0usize);
            *c += 1;
            format!("{}{}", atom.element.symbol().to_ascii_uppercase(), c)
        } else {
            atom.name.clone()
        };
        push_record(&mut out, "HETATM", serial, atom, &name, "LIG", 'Z', 1, ' ');
        serial += 1;
    }
    out.push_str("END\n");
    Ok(out)
}

/// Write the complex to `path`. Empty inputs are rejected before any I/O.
pub fn write_complex_pdb(
    protein: &MolecularStructure,
    ligand: &MolecularStructure,
    path: &Path,
) -> Result<(), ChemError> {
    let text = complex_pdb_text(protein, ligand)?;
    std::fs::write(path, text).map_err(|source| ChemError::Io {
        path: path.display().to_string(),
        source,
    })
}
