//! Distance kernels of the empirical affinity terms.

use crate::interactions::StackingClass;
use crate::Real;

/// Smallest distance used in the Coulomb term.
pub const ELECTROSTATIC_MIN_DISTANCE: f64 = 0.1;
/// vdW distances are clamped from below at this fraction of d0.
pub const VDW_CLAMP_FRACTION: f64 = 0.5;

pub const PI_RANGE_MIN: f64 = 0.5;
pub const PI_RANGE_MAX: f64 = 5.5;
pub const PI_MAX_OFFSET: f64 = 2.0;
pub const FACE_MAX_ANGLE: f64 = 30.0;
pub const EDGE_MIN_ANGLE: f64 = 60.0;

/// Hydrogen-bond strength, 1/0.58 at contact falling off past 2.6 Å.
pub fn hbond_kernel<T: Real>(d: T) -> T {
    let r = d / T::lit(2.6);
    T::one() / (T::one() + r.powi(6)) / T::lit(0.58)
}

/// Hydrophobic contact: 1 up to d0 + 0.5, linear to 0 at d0 + 2.0.
pub fn hydrophobic_kernel<T: Real>(d: T, d0: T) -> T {
    if d <= d0 + T::lit(0.5) {
        T::one()
    } else if d <= d0 + T::lit(2.0) {
        (d0 + T::lit(2.0) - d) / T::lit(1.5)
    } else {
        T::zero()
    }
}

pub fn electrostatic_term<T: Real>(q_m: T, q_n: T, d: T) -> T {
    q_m * q_n / d.max(T::lit(ELECTROSTATIC_MIN_DISTANCE))
}

/// 8-4 Lennard-Jones form with minimum -1 at d0.
pub fn vdw_kernel<T: Real>(d: T, d0: T) -> T {
    let r = d0 / d.max(T::lit(VDW_CLAMP_FRACTION) * d0);
    let r4 = r.powi(4);
    r4 * r4 - T::lit(2.0) * r4
}

/// Metal-ligand coordination: 1 below 2 Å, linear to 0 at 3 Å.
pub fn metal_kernel<T: Real>(d: T) -> T {
    if d < T::lit(2.0) {
        T::one()
    } else if d <= T::lit(3.0) {
        T::lit(3.0) - d
    } else {
        T::zero()
    }
}

pub fn pi_cation_kernel<T: Real>(d: T) -> T {
    if d >= T::lit(PI_RANGE_MIN) && d <= T::lit(PI_RANGE_MAX) {
        T::one()
    } else {
        T::zero()
    }
}

/// Orientation class of a ring pair, from center distance, lateral offset
/// and the folded normal angle in degrees.
pub fn classify_stacking<T: Real>(d: T, offset: T, angle: T) -> Option<StackingClass> {
    if d < T::lit(PI_RANGE_MIN) || d > T::lit(PI_RANGE_MAX) || offset > T::lit(PI_MAX_OFFSET) {
        return None;
    }
    if angle <= T::lit(FACE_MAX_ANGLE) {
        Some(StackingClass::FaceToFace)
    } else if angle >= T::lit(EDGE_MIN_ANGLE) && angle <= T::lit(90.0) {
        Some(StackingClass::EdgeToFace)
    } else {
        None
    }
}

pub fn pi_stacking_kernel<T: Real>(d: T, offset: T, angle: T) -> T {
    if classify_stacking(d, offset, angle).is_some() {
        T::one()
    } else {
        T::zero()
    }
}
