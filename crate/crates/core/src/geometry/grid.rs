//! Uniform cell list over a fixed point set.
//!
//! A point at `p` lives in cell `floor(p / cell)` on each axis. Queries with
//! a cutoff no larger than the cell size only need the 27 surrounding cells.

use std::collections::HashMap;

use super::{GeometryError, Vec3};
use crate::num::Real;

type CellKey = [i64; 3];

#[derive(Debug, Clone)]
pub struct SpatialGrid<T> {
    cell: T,
    cells: HashMap<CellKey, Vec<usize>>,
    positions: Vec<Vec3<T>>,
}

/// One grid point / query point pair closer than the cutoff.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NeighborPair<T> {
    /// Index into the points the grid was built from.
    pub grid_index: usize,
    /// Index into the query slice.
    pub query_index: usize,
    pub distance: T,
}

impl<T: Real> SpatialGrid<T> {
    /// Bins `positions` into cubic cells of edge `cell`.
    ///
    /// Panics if `cell` is not strictly positive.
    pub fn build(positions: &[Vec3<T>], cell: T) -> Self {
        assert!(cell > T::zero(), "grid cell size must be positive");
        let mut cells: HashMap<CellKey, Vec<usize>> = HashMap::new();
        for (i, p) in positions.iter().enumerate() {
            cells.entry(cell_of(p, cell)).or_default().push(i);
        }
        Self {
            cell,
            cells,
            positions: positions.to_vec(),
        }
    }

    pub fn cell_size(&self) -> T {
        self.cell
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn positions(&self) -> &[Vec3<T>] {
        &self.positions
    }

    /// Cell coordinates of a point under this grid's cell size.
    pub fn cell_index(&self, p: &Vec3<T>) -> CellKey {
        cell_of(p, self.cell)
    }

    /// Indices stored in the given cell, if any.
    pub fn cell_members(&self, key: &CellKey) -> &[usize] {
        self.cells.get(key).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn occupied_cells(&self) -> usize {
        self.cells.len()
    }

    /// Grid indices strictly closer than `cutoff` to `p`, sorted by index.
    pub fn neighbors_of(&self, p: &Vec3<T>, cutoff: T) -> Result<Vec<(usize, T)>, GeometryError> {
        self.check_cutoff(cutoff)?;
        let mut out = Vec::new();
        self.visit_neighbors(p, cutoff, |i, d| out.push((i, d)));
        out.sort_by_key(|&(i, _)| i);
        Ok(out)
    }

    fn check_cutoff(&self, cutoff: T) -> Result<(), GeometryError> {
        if cutoff > self.cell {
            return Err(GeometryError::CutoffExceedsCell {
                cutoff: cutoff.to_f64_lossy(),
                cell: self.cell.to_f64_lossy(),
            });
        }
        Ok(())
    }

    fn visit_neighbors(&self, p: &Vec3<T>, cutoff: T, mut f: impl FnMut(usize, T)) {
        let [cx, cy, cz] = cell_of(p, self.cell);
        for dx in -1..=1 {
            for dy in -1..=1 {
                for dz in -1..=1 {
                    let Some(members) = self.cells.get(&[cx + dx, cy + dy, cz + dz]) else {
                        continue;
                    };
                    for &i in members {
                        let d = self.positions[i].distance(p);
                        if d < cutoff {
                            f(i, d);
                        }
                    }
                }
            }
        }
    }
}

fn cell_of<T: Real>(p: &Vec3<T>, cell: T) -> CellKey {
    let f = |x: T| (x / cell).floor().to_i64().unwrap_or(i64::MAX);
    [f(p.x), f(p.y), f(p.z)]
}

/// Every (grid point, query point) pair with distance below `cutoff`,
/// ordered by query index then grid index.
pub fn pairs_within<T: Real>(
    grid: &SpatialGrid<T>,
    query: &[Vec3<T>],
    cutoff: T,
) -> Result<Vec<NeighborPair<T>>, GeometryError> {
    grid.check_cutoff(cutoff)?;
    let mut out = Vec::new();
    let mut scratch = Vec::new();
    for (qi, q) in query.iter().enumerate() {
        scratch.clear();
        grid.visit_neighbors(q, cutoff, |gi, d| scratch.push((gi, d)));
        scratch.sort_by_key(|&(gi, _)| gi);
        out.extend(scratch.iter().map(|&(grid_index, distance)| NeighborPair {
            grid_index,
            query_index: qi,
            distance,
        }));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn v(x: f64, y: f64, z: f64) -> Vec3<f64> {
        Vec3::new(x, y, z)
    }

    #[test]
    fn origin_lands_in_zero_cell() {
        let g = SpatialGrid::build(&[v(0.0, 0.0, 0.0)], 4.0);
        assert_eq!(g.cell_index(&v(0.0, 0.0, 0.0)), [0, 0, 0]);
        assert_eq!(g.cell_members(&[0, 0, 0]), &[0]);
    }

    #[test]
    fn separated_points_use_different_cells() {
        let g = SpatialGrid::build(&[v(0.0, 0.0, 0.0), v(10.0, 0.0, 0.0)], 4.0);
        assert_ne!(g.cell_index(&g.positions()[0]), g.cell_index(&g.positions()[1]));
        assert_eq!(g.occupied_cells(), 2);
    }

    #[test]
    fn negative_coordinates_floor_down() {
        let g = SpatialGrid::build(&[v(-0.1, -4.0, 3.9)], 4.0);
        assert_eq!(g.cell_index(&v(-0.1, -4.0, 3.9)), [-1, -1, 0]);
    }

    #[test]
    fn empty_grid() {
        let g: SpatialGrid<f64> = SpatialGrid::build(&[], 5.5);
        assert!(g.is_empty());
        assert!(pairs_within(&g, &[v(0.0, 0.0, 0.0)], 3.0).unwrap().is_empty());
    }

    #[test]
    fn cutoff_boundaries() {
        let g = SpatialGrid::build(&[v(0.0, 0.0, 0.0)], 5.5);
        let pairs = pairs_within(&g, &[v(2.0, 0.0, 0.0)], 3.0).unwrap();
        assert_eq!(pairs.len(), 1);
        assert_eq!(pairs[0].distance, 2.0);
        assert!(pairs_within(&g, &[v(2.0, 0.0, 0.0)], 1.5).unwrap().is_empty());
    }

    #[test]
    fn cutoff_larger_than_cell_is_rejected() {
        let g = SpatialGrid::build(&[v(0.0, 0.0, 0.0)], 2.0);
        assert!(matches!(
            pairs_within(&g, &[v(0.0, 0.0, 0.0)], 3.0),
            Err(GeometryError::CutoffExceedsCell { .. })
        ));
    }

    #[test]
    fn matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let cloud: Vec<_> = (0..500)
            .map(|_| {
                v(
                    rng.gen_range(-15.0..15.0),
                    rng.gen_range(-15.0..15.0),
                    rng.gen_range(-15.0..15.0),
                )
            })
            .collect();
        let probes: Vec<_> = (0..60)
            .map(|_| {
                v(
                    rng.gen_range(-15.0..15.0),
                    rng.gen_range(-15.0..15.0),
                    rng.gen_range(-15.0..15.0),
                )
            })
            .collect();
        let g = SpatialGrid::build(&cloud, 4.0);
        let fast = pairs_within(&g, &probes, 4.0).unwrap();
        let mut slow = Vec::new();
        for (qi, q) in probes.iter().enumerate() {
            for (gi, p) in cloud.iter().enumerate() {
                let d = p.distance(q);
                if d < 4.0 {
                    slow.push(NeighborPair {
                        grid_index: gi,
                        query_index: qi,
                        distance: d,
                    });
                }
            }
        }
        assert_eq!(fast, slow);
    }
}
