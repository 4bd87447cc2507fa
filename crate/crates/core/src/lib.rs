//! Protein-ligand pose assessment.
//!
//! Computes the physico-chemical triple used to judge a docked pose
//! (empirical binding affinity, ligand strain energy, steric clash count),
//! interaction fingerprints, and the log-scaled loss family used to compare
//! predicted against reference triples.

pub mod aa_score;
pub mod chem;
pub mod compass;
pub mod geometry;
pub mod interactions;
pub mod num;
pub mod perception;
pub mod pipeline;
pub mod pose_check;

pub use num::Real;

/// Scalar used by parsed structures and the force field.
pub type Scalar = f64;
/// Cartesian position in Å.
pub type Point = geometry::Vec3<Scalar>;
