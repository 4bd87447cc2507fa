//! Pose sanity checks: steric clashes against the protein and internal
//! strain of the ligand.

mod clash;
mod forcefield;
mod relax;

pub use clash::{clash_threshold, count_clashes, ClashPair, ClashReport, CLASH_TOLERANCE};
pub use forcefield::{
    build_force_field, build_force_field_with, natural_bond_length, uff_table, AngleTerm, BondTerm, EnergyBreakdown,
    ForceFieldError, ForceFieldModel, NonbondedTerm, Rotor, TorsionTerm, UffType, DEFAULT_SCALE_14,
};
pub use relax::{
    relax, rotate_rotor, strain_energy, strain_of, Relaxation, StrainResult, DEFAULT_MAX_ITER, DEFAULT_TOLERANCE,
};
