//! Torsion-space relaxation and strain energy.
//!
//! Only rotatable-bond dihedrals move; bond lengths and angles stay at their
//! pose values, so the relaxed energy differs from the pose energy through
//! the torsion and nonbonded terms alone.

use serde::{Deserialize, Serialize};

use super::forcefield::{build_force_field, ForceFieldError, ForceFieldModel, Rotor};
use crate::chem::MolecularStructure;
use crate::Point;

pub const DEFAULT_MAX_ITER: usize = 200;
/// Gradient tolerance in kcal/mol per degree.
pub const DEFAULT_TOLERANCE: f64 = 1e-4;
/// Sufficient-decrease constant of the backtracking line search.
const ARMIJO_C: f64 = 1e-4;
/// Largest single-step rotation of any bond, radians.
const MAX_STEP: f64 = 0.5;
const MAX_BACKTRACKS: usize = 60;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Relaxation {
    pub coords: Vec<Point>,
    pub energy: f64,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StrainResult {
    pub e_pose: f64,
    pub e_relaxed: f64,
    /// `e_pose - e_relaxed`, unclamped.
    pub strain: f64,
    pub iterations: usize,
    pub converged: bool,
}

impl StrainResult {
    /// Strain for reports: small negative values from the minimizer read as 0.
    pub fn reported(&self) -> f64 {
        self.strain.max(0.0)
    }
}

/// Rotates the moving side of `rotor` by `angle` radians in place.
pub fn rotate_rotor(coords: &mut [Point], rotor: &Rotor, angle: f64) {
    let (a, b) = rotor.axis;
    let Some(axis) = (coords[b] - coords[a]).normalized() else {
        return;
    };
    let origin = coords[b];
    for &m in &rotor.moving {
        coords[m] = coords[m].rotated_about(&origin, &axis, angle);
    }
}

/// dE/dtheta for each rotor, in kcal/mol per radian.
fn torques(ff: &ForceFieldModel, coords: &[Point], grad: &[Point]) -> Vec<f64> {
    ff.rotors
        .iter()
        .map(|r| {
            let (a, b) = r.axis;
            let Some(u) = (coords[b] - coords[a]).normalized() else {
                return 0.0;
            };
            r.moving
                .iter()
                .map(|&m| u.cross(&(coords[m] - coords[b])).dot(&grad[m]))
                .sum()
        })
        .collect()
}

fn apply(ff: &ForceFieldModel, coords: &[Point], step: &[f64]) -> Vec<Point> {
    let mut out = coords.to_vec();
    for (r, &s) in ff.rotors.iter().zip(step) {
        rotate_rotor(&mut out, r, s);
    }
    out
}

/// Steepest descent over rotatable-bond dihedrals with Armijo backtracking.
///
/// Accepted steps never raise the energy. `converged` is set when the
/// largest torque drops below `tol` (kcal/mol/deg).
pub fn relax(ff: &ForceFieldModel, coords: &[Point], max_iter: usize, tol: f64) -> Result<Relaxation, ForceFieldError> {
    let mut x = coords.to_vec();
    let (mut e, mut grad) = ff.energy_and_gradient(&x)?;
    if ff.rotors.is_empty() {
        return Ok(Relaxation {
            coords: x,
            energy: e,
            iterations: 0,
            converged: true,
        });
    }
    let per_degree = 1f64.to_radians();
    let mut alpha: f64 = 1e-3;
    let mut iterations = 0;
    let mut converged = false;
    while iterations < max_iter {
        let g = torques(ff, &x, &grad);
        let g_max = g.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if g_max * per_degree < tol {
            converged = true;
            break;
        }
        iterations += 1;
        let g2: f64 = g.iter().map(|v| v * v).sum();
        alpha = (alpha * 2.0).min(MAX_STEP / g_max);
        let mut accepted = None;
        for _ in 0..MAX_BACKTRACKS {
            let step: Vec<f64> = g.iter().map(|v| -alpha * v).collect();
            let trial = apply(ff, &x, &step);
            let e_trial = ff.energy(&trial)?;
            if e_trial <= e - ARMIJO_C * alpha * g2 {
                accepted = Some((trial, e_trial));
                break;
            }
            alpha *= 0.5;
        }
        let Some((trial, e_trial)) = accepted else {
            // no descent possible at machine precision
            break;
        };
        x = trial;
        (e, grad) = ff.energy_and_gradient(&x)?;
        debug_assert!(e <= e_trial + 1e-12);
    }
    if !converged {
        let g = torques(ff, &x, &grad);
        converged = g.iter().all(|v| (v * per_degree).abs() < tol);
    }
    Ok(Relaxation {
        coords: x,
        energy: e,
        iterations,
        converged,
    })
}

pub fn strain_of(
    ff: &ForceFieldModel,
    coords: &[Point],
    max_iter: usize,
    tol: f64,
) -> Result<StrainResult, ForceFieldError> {
    let e_pose = ff.energy(coords)?;
    let r = relax(ff, coords, max_iter, tol)?;
    Ok(StrainResult {
        e_pose,
        e_relaxed: r.energy,
        strain: e_pose - r.energy,
        iterations: r.iterations,
        converged: r.converged,
    })
}

/// Strain of a ligand pose under the default minimizer settings.
pub fn strain_energy(ligand: &MolecularStructure) -> Result<StrainResult, ForceFieldError> {
    let ff = build_force_field(ligand)?;
    strain_of(&ff, &ligand.positions(), DEFAULT_MAX_ITER, DEFAULT_TOLERANCE)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chem::parse_sdf;
    use crate::geometry::dihedral;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const ECLIPSED: &str = include_str!("../../tests/fixtures/butane_eclipsed.sdf");
    const ANTI: &str = include_str!("../../tests/fixtures/butane_anti.sdf");
    const BENZENE: &str = include_str!("../../tests/fixtures/benzene.sdf");
    const PHENYLETHANOL: &str = include_str!("../../tests/fixtures/complex_ligand.sdf");

    fn mol(text: &str) -> MolecularStructure {
        parse_sdf(text.as_bytes()).unwrap()
    }

    /// Energies of a full 1-degree scan of the single rotor, starting at the pose.
    fn scan(ff: &ForceFieldModel, coords: &[Point]) -> Vec<f64> {
        assert_eq!(ff.rotors.len(), 1);
        let mut x = coords.to_vec();
        (0..360)
            .map(|_| {
                let e = ff.energy(&x).unwrap();
                rotate_rotor(&mut x, &ff.rotors[0], 1f64.to_radians());
                e
            })
            .collect()
    }

    /// Grid minimum reached by walking downhill from the pose.
    fn basin_minimum(energies: &[f64]) -> f64 {
        let n = energies.len() as isize;
        let at = |k: isize| energies[k.rem_euclid(n) as usize];
        let dir = if at(1) < at(-1) { 1 } else { -1 };
        let mut k = 0;
        while at(k + dir) < at(k) {
            k += dir;
        }
        at(k)
    }

    fn rotated_butane(degrees: f64) -> (ForceFieldModel, Vec<Point>) {
        let m = mol(ECLIPSED);
        let ff = build_force_field(&m).unwrap();
        let mut x = m.positions();
        rotate_rotor(&mut x, &ff.rotors[0], degrees.to_radians());
        (ff, x)
    }

    #[test]
    fn benzene_has_no_strain() {
        let s = strain_energy(&mol(BENZENE)).unwrap();
        assert!(s.strain.abs() < 1e-6);
        assert_eq!(s.iterations, 0);
        assert!(s.converged);
    }

    #[test]
    fn eclipsed_butane_relaxes_to_scan_minimum() {
        let (ff, x) = rotated_butane(0.0);
        let r = relax(&ff, &x, DEFAULT_MAX_ITER, DEFAULT_TOLERANCE).unwrap();
        assert!(r.energy < ff.energy(&x).unwrap());
        assert!(r.converged);
        let best = basin_minimum(&scan(&ff, &x));
        assert!((r.energy - best).abs() < 1e-3, "relaxed {} vs scan {}", r.energy, best);
    }

    #[test]
    fn butane_in_anti_basin_reaches_global_minimum() {
        let (ff, x) = rotated_butane(25.0);
        let r = relax(&ff, &x, DEFAULT_MAX_ITER, DEFAULT_TOLERANCE).unwrap();
        let energies = scan(&ff, &x);
        let global = energies.iter().cloned().fold(f64::INFINITY, f64::min);
        assert!(
            (r.energy - global).abs() < 1e-3,
            "relaxed {} vs scan {}",
            r.energy,
            global
        );
        let phi = dihedral(&r.coords[0], &r.coords[1], &r.coords[2], &r.coords[3]).abs();
        assert!((phi - 180.0).abs() < 1.0, "relaxed dihedral {phi}");
    }

    #[test]
    fn grid_minimum_start_has_small_strain() {
        let (ff, x) = rotated_butane(0.0);
        let energies = scan(&ff, &x);
        let (k, _) = energies.iter().enumerate().min_by(|a, b| a.1.total_cmp(b.1)).unwrap();
        let mut y = x.clone();
        rotate_rotor(&mut y, &ff.rotors[0], (k as f64).to_radians());
        let s = strain_of(&ff, &y, DEFAULT_MAX_ITER, DEFAULT_TOLERANCE).unwrap();
        let n = energies.len();
        let step_variation = (energies[(k + 1) % n] - energies[k]).max(energies[(k + n - 1) % n] - energies[k]);
        assert!(s.strain >= -1e-6 && s.strain <= step_variation);
    }

    #[test]
    fn anti_butane_is_nearly_relaxed() {
        let s = strain_energy(&mol(ANTI)).unwrap();
        assert!(s.strain >= -1e-6);
        assert!(s.strain < 1e-3);
        let eclipsed = strain_energy(&mol(ECLIPSED)).unwrap();
        assert!(eclipsed.strain > s.strain + 1.0);
    }

    #[test]
    fn relaxation_keeps_bond_geometry() {
        let m = mol(PHENYLETHANOL);
        let ff = build_force_field(&m).unwrap();
        let x = m.positions();
        let r = relax(&ff, &x, DEFAULT_MAX_ITER, DEFAULT_TOLERANCE).unwrap();
        for b in &ff.bonds {
            let before = x[b.i].distance(&x[b.j]);
            let after = r.coords[b.i].distance(&r.coords[b.j]);
            assert!((before - after).abs() < 1e-9);
        }
        let bd0 = ff.breakdown(&x).unwrap();
        let bd1 = ff.breakdown(&r.coords).unwrap();
        assert!((bd0.bond - bd1.bond).abs() < 1e-6);
        assert!((bd0.angle - bd1.angle).abs() < 1e-6);
    }

    #[test]
    fn strain_non_negative_under_perturbation() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for text in [ECLIPSED, PHENYLETHANOL] {
            let m = mol(text);
            let ff = build_force_field(&m).unwrap();
            for _ in 0..5 {
                let mut x = m.positions();
                for r in &ff.rotors {
                    rotate_rotor(&mut x, r, rng.gen_range(-3.0..3.0));
                }
                let s = strain_of(&ff, &x, DEFAULT_MAX_ITER, DEFAULT_TOLERANCE).unwrap();
                assert!(s.strain >= -1e-6);
            }
        }
    }

    #[test]
    fn reported_strain_clamps() {
        let s = StrainResult {
            e_pose: 1.0,
            e_relaxed: 1.0 + 1e-9,
            strain: -1e-9,
            iterations: 1,
            converged: true,
        };
        assert_eq!(s.reported(), 0.0);
    }
}
