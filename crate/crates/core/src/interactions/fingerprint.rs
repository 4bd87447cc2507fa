//! Residue x interaction-kind bit vectors.

use serde::{Deserialize, Serialize};

use super::{Interaction, InteractionError, InteractionKind};
use crate::chem::MolecularStructure;

/// Slot `r * kinds.len() + k` holds residue `r`, kind `k`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FingerprintLayout {
    pub residues: Vec<String>,
    pub kinds: Vec<InteractionKind>,
}

impl FingerprintLayout {
    pub fn for_protein(protein: &MolecularStructure) -> Self {
        Self {
            residues: protein.residues.iter().map(|r| r.label()).collect(),
            kinds: InteractionKind::ALL.to_vec(),
        }
    }

    pub fn len(&self) -> usize {
        self.residues.len() * self.kinds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InteractionFingerprint {
    pub layout: FingerprintLayout,
    pub bits: Vec<bool>,
}

impl InteractionFingerprint {
    pub fn zeros(layout: FingerprintLayout) -> Self {
        let bits = vec![false; layout.len()];
        Self { layout, bits }
    }

    pub fn count_ones(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    /// Bits packed most-significant first, padded with zeros to whole bytes.
    pub fn to_hex(&self) -> String {
        let bytes: Vec<u8> = self
            .bits
            .chunks(8)
            .map(|c| {
                c.iter()
                    .enumerate()
                    .fold(0u8, |acc, (i, &b)| acc | ((b as u8) << (7 - i)))
            })
            .collect();
        hex::encode(bytes)
    }

    pub fn from_hex(layout: FingerprintLayout, text: &str) -> Result<Self, InteractionError> {
        let bytes = hex::decode(text).map_err(|_| InteractionError::MalformedHex)?;
        let n = layout.len();
        if bytes.len() != n.div_ceil(8) {
            return Err(InteractionError::MalformedHex);
        }
        let bits = (0..n).map(|i| bytes[i / 8] & (1 << (7 - i % 8)) != 0).collect();
        Ok(Self { layout, bits })
    }
}

pub fn fingerprint(interactions: &[Interaction], protein: &MolecularStructure) -> InteractionFingerprint {
    let mut fp = InteractionFingerprint::zeros(FingerprintLayout::for_protein(protein));
    let width = fp.layout.kinds.len();
    for it in interactions {
        fp.bits[it.residue * width + it.kind.index()] = true;
    }
    fp
}

/// |a and b| / |a or b|; two empty vectors are identical (1.0).
pub fn tanimoto(a: &InteractionFingerprint, b: &InteractionFingerprint) -> Result<f64, InteractionError> {
    if a.layout != b.layout {
        return Err(InteractionError::LayoutMismatch);
    }
    let (mut both, mut either) = (0usize, 0usize);
    for (&x, &y) in a.bits.iter().zip(&b.bits) {
        both += (x && y) as usize;
        either += (x || y) as usize;
    }
    Ok(if either == 0 { 1.0 } else { both as f64 / either as f64 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn layout(n: usize) -> FingerprintLayout {
        FingerprintLayout {
            residues: (0..n).map(|i| format!("A:ALA{i}")).collect(),
            kinds: vec![InteractionKind::HbondDonorP],
        }
    }

    fn fp(bits: &[u8]) -> InteractionFingerprint {
        InteractionFingerprint {
            layout: layout(bits.len()),
            bits: bits.iter().map(|&b| b == 1).collect(),
        }
    }

    #[test]
    fn tanimoto_cases() {
        assert_eq!(tanimoto(&fp(&[1, 0, 1, 1]), &fp(&[1, 0, 1, 1])).unwrap(), 1.0);
        assert_eq!(tanimoto(&fp(&[1, 1, 0, 0]), &fp(&[0, 0, 1, 1])).unwrap(), 0.0);
        assert!((tanimoto(&fp(&[1, 1, 0, 0]), &fp(&[1, 0, 1, 0])).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(tanimoto(&fp(&[0, 0]), &fp(&[0, 0])).unwrap(), 1.0);
        assert_eq!(
            tanimoto(&fp(&[0, 0]), &fp(&[0, 0, 0])),
            Err(InteractionError::LayoutMismatch)
        );
    }

    #[test]
    fn hex_is_msb_first() {
        let f = fp(&[1, 0, 0, 0, 0, 0, 0, 1, 1]);
        assert_eq!(f.to_hex(), "8180");
        assert_eq!(InteractionFingerprint::from_hex(f.layout.clone(), "8180").unwrap(), f);
        assert!(InteractionFingerprint::from_hex(f.layout.clone(), "81").is_err());
    }

    proptest! {
        #[test]
        fn tanimoto_properties(a in proptest::collection::vec(0u8..2, 1..40), seed in any::<u64>()) {
            let b: Vec<u8> = a.iter().enumerate().map(|(i, x)| x ^ ((seed >> (i % 64)) & 1) as u8).collect();
            let (fa, fb) = (fp(&a), fp(&b));
            let ab = tanimoto(&fa, &fb).unwrap();
            prop_assert_eq!(ab, tanimoto(&fb, &fa).unwrap());
            prop_assert!((0.0..=1.0).contains(&ab));
            prop_assert_eq!(tanimoto(&fa, &fa).unwrap(), 1.0);
            prop_assert_eq!(InteractionFingerprint::from_hex(fa.layout.clone(), &fa.to_hex()).unwrap(), fa);
        }
    }
}
