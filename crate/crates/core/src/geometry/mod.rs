//! Spatial primitives: vectors, angles, ring-plane measures and the
//! uniform-grid neighbor index.

mod grid;

use std::ops::{Add, AddAssign, Div, Index, Mul, Neg, Sub, SubAssign};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::num::Real;

pub use grid::{pairs_within, NeighborPair, SpatialGrid};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("degenerate geometry: zero-length arm at the angle vertex")]
    DegenerateGeometry,
    #[error("query cutoff {cutoff} exceeds grid cell size {cell}")]
    CutoffExceedsCell { cutoff: f64, cell: f64 },
}

/// Cartesian 3-vector.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Vec3<T> {
    pub x: T,
    pub y: T,
    pub z: T,
}

impl<T: Real> Vec3<T> {
    #[inline]
    pub const fn new(x: T, y: T, z: T) -> Self {
        Self { x, y, z }
    }

    #[inline]
    pub fn zero() -> Self {
        Self::new(T::zero(), T::zero(), T::zero())
    }

    #[inline]
    pub fn dot(&self, other: &Self) -> T {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    #[inline]
    pub fn cross(&self, other: &Self) -> Self {
        Self::new(
            self.y * other.z - self.z * other.y,
            self.z * other.x - self.x * other.z,
            self.x * other.y - self.y * other.x,
        )
    }

    #[inline]
    pub fn norm_squared(&self) -> T {
        self.dot(self)
    }

    #[inline]
    pub fn norm(&self) -> T {
        self.norm_squared().sqrt()
    }

    /// Unit vector, or `None` for a zero-length input.
    pub fn normalized(&self) -> Option<Self> {
        let n = self.norm();
        if n > T::zero() && n.is_finite() {
            Some(*self / n)
        } else {
            None
        }
    }

    #[inline]
    pub fn distance(&self, other: &Self) -> T {
        (*self - *other).norm()
    }

    #[inline]
    pub fn distance_squared(&self, other: &Self) -> T {
        (*self - *other).norm_squared()
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    pub fn to_array(self) -> [T; 3] {
        [self.x, self.y, self.z]
    }

    pub fn from_array(a: [T; 3]) -> Self {
        Self::new(a[0], a[1], a[2])
    }

    /// Arithmetic mean of a non-empty point set.
    pub fn centroid<'a, I>(points: I) -> Option<Self>
    where
        I: IntoIterator<Item = &'a Self>,
        T: 'a,
    {
        let mut sum = Self::zero();
        let mut n = 0usize;
        for p in points {
            sum += *p;
            n += 1;
        }
        (n > 0).then(|| sum / T::from(n).unwrap())
    }

    /// Rodrigues rotation of `self` about the unit `axis` through `origin`.
    pub fn rotated_about(&self, origin: &Self, axis: &Self, angle: T) -> Self {
        let v = *self - *origin;
        let (s, c) = angle.sin_cos();
        let rotated = v * c + axis.cross(&v) * s + *axis * (axis.dot(&v) * (T::one() - c));
        *origin + rotated
    }
}

impl<T: Real> Add for Vec3<T> {
    type Output = Self;
    #[inline]
    fn add(self, o: Self) -> Self {
        Self::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl<T: Real> AddAssign for Vec3<T> {
    #[inline]
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl<T: Real> Sub for Vec3<T> {
    type Output = Self;
    #[inline]
    fn sub(self, o: Self) -> Self {
        Self::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl<T: Real> SubAssign for Vec3<T> {
    #[inline]
    fn sub_assign(&mut self, o: Self) {
        *self = *self - o;
    }
}

impl<T: Real> Mul<T> for Vec3<T> {
    type Output = Self;
    #[inline]
    fn mul(self, s: T) -> Self {
        Self::new(self.x * s, self.y * s, self.z * s)
    }
}

impl<T: Real> Div<T> for Vec3<T> {
    type Output = Self;
    #[inline]
    fn div(self, s: T) -> Self {
        Self::new(self.x / s, self.y / s, self.z / s)
    }
}

impl<T: Real> Neg for Vec3<T> {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Self::new(-self.x, -self.y, -self.z)
    }
}

impl<T> Index<usize> for Vec3<T> {
    type Output = T;
    fn index(&self, i: usize) -> &T {
        match i {
            0 => &self.x,
            1 => &self.y,
            2 => &self.z,
            _ => panic!("Vec3 index {i} out of range"),
        }
    }
}

/// Angle a-b-c at vertex `b`, in degrees within [0, 180].
pub fn angle<T: Real>(a: &Vec3<T>, b: &Vec3<T>, c: &Vec3<T>) -> Result<T, GeometryError> {
    let u = *a - *b;
    let v = *c - *b;
    let nu = u.norm();
    let nv = v.norm();
    if nu <= T::zero() || nv <= T::zero() {
        return Err(GeometryError::DegenerateGeometry);
    }
    // atan2 form stays accurate near 0 and 180 degrees
    let cross = u.cross(&v).norm();
    let dot = u.dot(&v);
    Ok(cross.atan2(dot).to_degrees())
}

/// Signed dihedral angle a-b-c-d in degrees within (-180, 180].
pub fn dihedral<T: Real>(a: &Vec3<T>, b: &Vec3<T>, c: &Vec3<T>, d: &Vec3<T>) -> T {
    let b1 = *b - *a;
    let b2 = *c - *b;
    let b3 = *d - *c;
    let n1 = b1.cross(&b2);
    let n2 = b2.cross(&b3);
    let y = b2.norm() * b1.dot(&n2);
    let x = n1.dot(&n2);
    y.atan2(x).to_degrees()
}

/// A ring plane reduced to its center and unit normal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Plane<T> {
    pub center: Vec3<T>,
    pub normal: Vec3<T>,
}

/// Relative placement of two ring planes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RingPairGeometry<T> {
    /// Distance between ring centers.
    pub center_distance: T,
    /// Angle between the unoriented normals, in [0, 90] degrees.
    pub normal_angle: T,
    /// Angle between the oriented normals, in [0, 180] degrees.
    pub normal_angle_raw: T,
    /// Lateral offset: the smaller distance between one center and the
    /// other center projected onto the first ring's plane.
    pub offset: T,
}

pub fn ring_pair_geometry<T: Real>(r1: &Plane<T>, r2: &Plane<T>) -> RingPairGeometry<T> {
    let delta = r2.center - r1.center;
    let center_distance = delta.norm();
    let cos = r1.normal.dot(&r2.normal).max(-T::one()).min(T::one());
    let normal_angle_raw = r1.normal.cross(&r2.normal).norm().atan2(cos).to_degrees();
    let ninety = T::lit(90.0);
    let normal_angle = if normal_angle_raw > ninety {
        T::lit(180.0) - normal_angle_raw
    } else {
        normal_angle_raw
    };
    let lateral = |n: &Vec3<T>| {
        let h = delta.dot(n);
        (center_distance * center_distance - h * h).max(T::zero()).sqrt()
    };
    let offset = lateral(&r1.normal).min(lateral(&r2.normal));
    RingPairGeometry {
        center_distance,
        normal_angle,
        normal_angle_raw,
        offset,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: f64, y: f64, z: f64) -> Vec3<f64> {
        Vec3::new(x, y, z)
    }

    #[test]
    fn angle_cases() {
        let a = angle(&v(-1.0, 0.0, 0.0), &v(0.0, 0.0, 0.0), &v(2.0, 0.0, 0.0)).unwrap();
        assert!((a - 180.0).abs() < 1e-12);
        let a = angle(&v(1.0, 0.0, 0.0), &v(0.0, 0.0, 0.0), &v(0.0, 3.0, 0.0)).unwrap();
        assert!((a - 90.0).abs() < 1e-12);
        assert_eq!(
            angle(&v(0.0, 0.0, 0.0), &v(0.0, 0.0, 0.0), &v(1.0, 0.0, 0.0)),
            Err(GeometryError::DegenerateGeometry)
        );
    }

    #[test]
    fn angle_works_in_f32() {
        let a = angle(
            &Vec3::new(1.0f32, 0.0, 0.0),
            &Vec3::new(0.0, 0.0, 0.0),
            &Vec3::new(1.0, 1.0, 0.0),
        )
        .unwrap();
        assert!((a - 45.0).abs() < 1e-4);
    }

    #[test]
    fn dihedral_signs() {
        let a = v(1.0, 0.0, 0.0);
        let b = v(0.0, 0.0, 0.0);
        let c = v(0.0, 0.0, 1.0);
        assert!((dihedral(&a, &b, &c, &v(1.0, 0.0, 1.0))).abs() < 1e-12);
        assert!((dihedral(&a, &b, &c, &v(0.0, 1.0, 1.0)) - 90.0).abs() < 1e-12);
        assert!((dihedral(&a, &b, &c, &v(-1.0, 0.0, 1.0)).abs() - 180.0).abs() < 1e-12);
    }

    fn plane(c: Vec3<f64>, n: Vec3<f64>) -> Plane<f64> {
        Plane {
            center: c,
            normal: n.normalized().unwrap(),
        }
    }

    #[test]
    fn stacked_rings() {
        let g = ring_pair_geometry(
            &plane(v(0.0, 0.0, 0.0), v(0.0, 0.0, 1.0)),
            &plane(v(0.0, 0.0, 3.5), v(0.0, 0.0, -1.0)),
        );
        assert!((g.center_distance - 3.5).abs() < 1e-12);
        assert!(g.normal_angle.abs() < 1e-12);
        assert!((g.normal_angle_raw - 180.0).abs() < 1e-12);
        assert!(g.offset.abs() < 1e-12);
    }

    #[test]
    fn t_shaped_rings() {
        let g = ring_pair_geometry(
            &plane(v(0.0, 0.0, 0.0), v(0.0, 0.0, 1.0)),
            &plane(v(0.0, 0.0, 5.0), v(1.0, 0.0, 0.0)),
        );
        assert!((g.normal_angle - 90.0).abs() < 1e-12);
        assert!(g.offset.abs() < 1e-12);
    }

    #[test]
    fn coplanar_side_by_side_rings() {
        // offset is measured in-plane, so coplanar neighbours sit a full
        // center distance apart laterally
        let g = ring_pair_geometry(
            &plane(v(0.0, 0.0, 0.0), v(0.0, 0.0, 1.0)),
            &plane(v(5.0, 0.0, 0.0), v(0.0, 0.0, 1.0)),
        );
        assert!((g.center_distance - 5.0).abs() < 1e-12);
        assert!(g.normal_angle.abs() < 1e-12);
        assert!((g.offset - 5.0).abs() < 1e-12);
    }

    #[test]
    fn ring_pair_is_symmetric() {
        let p = plane(v(0.3, -0.2, 0.1), v(0.2, 0.1, 1.0));
        let q = plane(v(1.0, 2.0, 3.4), v(-0.5, 0.3, 0.8));
        let a = ring_pair_geometry(&p, &q);
        let b = ring_pair_geometry(&q, &p);
        assert!((a.center_distance - b.center_distance).abs() < 1e-12);
        assert!((a.normal_angle - b.normal_angle).abs() < 1e-12);
        assert!((a.offset - b.offset).abs() < 1e-12);
    }

    #[test]
    fn rodrigues_quarter_turn() {
        let p = v(1.0, 0.0, 0.0).rotated_about(&v(0.0, 0.0, 0.0), &v(0.0, 0.0, 1.0), std::f64::consts::FRAC_PI_2);
        assert!((p - v(0.0, 1.0, 0.0)).norm() < 1e-12);
    }
}
