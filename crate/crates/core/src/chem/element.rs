//! Element property table.
//!
//! van der Waals radii follow Bondi (1964) where Bondi lists a value; the
//! remaining metals use the Alvarez (2013) set. Covalent radii are Cordero
//! et al. (2008).

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::ChemError;

#[derive(Debug, Clone, PartialEq)]
pub struct ElementInfo {
    pub symbol: &'static str,
    pub atomic_number: u8,
    /// Å
    pub vdw_radius: f64,
    /// Å
    pub covalent_radius: f64,
    pub is_metal: bool,
    /// Pauling electronegativity.
    pub electronegativity: f64,
    /// Usual ionic charge for metal ions; 0 otherwise.
    pub ion_charge: i32,
}

macro_rules! element {
    ($sym:literal, $z:literal, $vdw:literal, $cov:literal, $metal:literal, $en:literal, $ion:literal) => {
        ElementInfo {
            symbol: $sym,
            atomic_number: $z,
            vdw_radius: $vdw,
            covalent_radius: $cov,
            is_metal: $metal,
            electronegativity: $en,
            ion_charge: $ion,
        }
    };
}

static TABLE: [ElementInfo; 24] = [
    element!("H", 1, 1.20, 0.31, false, 2.20, 0),
    element!("B", 5, 1.92, 0.84, false, 2.04, 0),
    element!("C", 6, 1.70, 0.76, false, 2.55, 0),
    element!("N", 7, 1.55, 0.71, false, 3.04, 0),
    element!("O", 8, 1.52, 0.66, false, 3.44, 0),
    element!("F", 9, 1.47, 0.57, false, 3.98, 0),
    element!("Na", 11, 2.27, 1.66, true, 0.93, 1),
    element!("Mg", 12, 1.73, 1.41, true, 1.31, 2),
    element!("Si", 14, 2.10, 1.11, false, 1.90, 0),
    element!("P", 15, 1.80, 1.07, false, 2.19, 0),
    element!("S", 16, 1.80, 1.05, false, 2.58, 0),
    element!("Cl", 17, 1.75, 1.02, false, 3.16, 0),
    element!("K", 19, 2.75, 2.03, true, 0.82, 1),
    element!("Ca", 20, 2.31, 1.76, true, 1.00, 2),
    element!("Mn", 25, 2.00, 1.39, true, 1.55, 2),
    element!("Fe", 26, 2.00, 1.32, true, 1.83, 2),
    element!("Co", 27, 2.00, 1.26, true, 1.88, 2),
    element!("Ni", 28, 1.63, 1.24, true, 1.91, 2),
    element!("Cu", 29, 1.40, 1.32, true, 1.90, 2),
    element!("Zn", 30, 1.39, 1.22, true, 1.65, 2),
    element!("Se", 34, 1.90, 1.20, false, 2.55, 0),
    element!("Br", 35, 1.85, 1.20, false, 2.96, 0),
    element!("I", 53, 1.98, 1.39, false, 2.66, 0),
    element!("Xe", 54, 2.16, 1.40, false, 2.60, 0),
];

/// Largest van der Waals radius in the table.
pub const MAX_VDW_RADIUS: f64 = 2.75;

/// A chemical element known to the property table.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Element(u8);

impl Element {
    pub const H: Element = Element(0);
    pub const C: Element = Element(2);
    pub const N: Element = Element(3);
    pub const O: Element = Element(4);
    pub const S: Element = Element(10);

    /// Case-insensitive symbol lookup ("CL", "cl" and "Cl" all resolve).
    pub fn from_symbol(symbol: &str) -> Result<Self, ChemError> {
        let s = symbol.trim();
        TABLE
            .iter()
            .position(|e| e.symbol.eq_ignore_ascii_case(s))
            .map(|i| Element(i as u8))
            .ok_or_else(|| ChemError::UnknownElement(s.to_string()))
    }

    pub fn info(self) -> &'static ElementInfo {
        &TABLE[self.0 as usize]
    }

    pub fn symbol(self) -> &'static str {
        self.info().symbol
    }

    pub fn atomic_number(self) -> u8 {
        self.info().atomic_number
    }

    pub fn is_hydrogen(self) -> bool {
        self == Element::H
    }

    pub fn is_metal(self) -> bool {
        self.info().is_metal
    }

    pub fn vdw_radius(self) -> f64 {
        self.info().vdw_radius
    }

    pub fn covalent_radius(self) -> f64 {
        self.info().covalent_radius
    }
}

/// Property lookup by symbol.
pub fn element_info(symbol: &str) -> Result<&'static ElementInfo, ChemError> {
    Element::from_symbol(symbol).map(Element::info)
}

pub fn all_elements() -> impl Iterator<Item = Element> {
    (0..TABLE.len() as u8).map(Element)
}

impl fmt::Debug for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

impl FromStr for Element {
    type Err = ChemError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Element::from_symbol(s)
    }
}

impl Serialize for Element {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.symbol())
    }
}

impl<'de> Deserialize<'de> for Element {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Element::from_symbol(&s).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bondi_radii() {
        assert_eq!(element_info("C").unwrap().vdw_radius, 1.70);
        assert_eq!(element_info("N").unwrap().vdw_radius, 1.55);
        assert_eq!(element_info("O").unwrap().vdw_radius, 1.52);
        assert_eq!(element_info("S").unwrap().vdw_radius, 1.80);
        assert_eq!(element_info("H").unwrap().vdw_radius, 1.20);
    }

    #[test]
    fn metals_flagged() {
        assert!(element_info("Zn").unwrap().is_metal);
        for m in ["Cu", "Fe", "Mg", "Mn", "Ca", "Na", "K", "Ni", "Co"] {
            assert!(element_info(m).unwrap().is_metal, "{m}");
        }
        assert!(!element_info("C").unwrap().is_metal);
    }

    #[test]
    fn unknown_symbol() {
        assert!(matches!(element_info("Xx"), Err(ChemError::UnknownElement(s)) if s == "Xx"));
    }

    #[test]
    fn case_insensitive() {
        assert_eq!(Element::from_symbol("CL").unwrap().symbol(), "Cl");
        assert_eq!(Element::from_symbol("zn").unwrap().symbol(), "Zn");
    }

    #[test]
    fn table_is_consistent() {
        let mut max = 0.0f64;
        for e in all_elements() {
            let info = e.info();
            assert!(info.vdw_radius > info.covalent_radius, "{}", info.symbol);
            assert!(info.covalent_radius > 0.0);
            max = max.max(info.vdw_radius);
        }
        assert_eq!(max, MAX_VDW_RADIUS);
        assert_eq!(Element::H.symbol(), "H");
        assert_eq!(Element::C.symbol(), "C");
        assert_eq!(Element::N.symbol(), "N");
        assert_eq!(Element::O.symbol(), "O");
        assert_eq!(Element::S.symbol(), "S");
    }
}
