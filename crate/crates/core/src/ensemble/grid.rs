use crate::spinor::Vec3;

use super::EnsembleError;

/// Axis-aligned box, optionally with periodic identification of faces.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoxRegion {
    pub lo: Vec3,
    pub hi: Vec3,
    pub periodic: bool,
}

impl BoxRegion {
    pub fn new(lo: Vec3, hi: Vec3) -> Result<Self, EnsembleError> {
        if (0..3).any(|k| !(hi[k] > lo[k]) || !lo[k].is_finite() || !hi[k].is_finite()) {
            return Err(EnsembleError::InvalidBox);
        }
        Ok(Self { lo, hi, periodic: false })
    }

    /// A torus: positions leaving one face re-enter through the opposite one.
    pub fn periodic(lo: Vec3, hi: Vec3) -> Result<Self, EnsembleError> {
        Ok(Self { periodic: true, ..Self::new(lo, hi)? })
    }

    pub fn cube(half: f64) -> Result<Self, EnsembleError> {
        Self::new(Vec3::repeat(-half), Vec3::repeat(half))
    }

    pub fn lengths(&self) -> Vec3 {
        self.hi - self.lo
    }

    pub fn volume(&self) -> f64 {
        self.lengths().product()
    }

    pub fn center(&self) -> Vec3 {
        (self.lo + self.hi) * 0.5
    }

    pub fn contains(&self, x: &Vec3) -> bool {
        (0..3).all(|k| x[k] >= self.lo[k] && x[k] <= self.hi[k])
    }

    /// Map into the box for periodic regions; identity otherwise.
    pub fn wrap(&self, x: &Vec3) -> Vec3 {
        if !self.periodic {
            return *x;
        }
        let l = self.lengths();
        Vec3::from_fn(|k, _| {
            let w = self.lo[k] + (x[k] - self.lo[k]).rem_euclid(l[k]);
            // rem_euclid can round up to exactly l
            if w >= self.hi[k] {
                self.lo[k]
            } else {
                w
            }
        })
    }

    /// Point at fractional coordinates `u ∈ [0,1]³`.
    pub fn at(&self, u: &Vec3) -> Vec3 {
        self.lo + self.lengths().component_mul(u)
    }
}

/// Partition of a box into `nx·ny·nz` equal cells.
///
/// Each axis gets `max(1, round(L/ε))` cells, so cells are cubes of side
/// `ε` exactly when the box sides are multiples of `ε` and otherwise the
/// nearest partition of the box.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub region: BoxRegion,
    pub cell_size: f64,
    pub cells: [usize; 3],
}

impl Grid {
    pub fn new(region: BoxRegion, cell_size: f64) -> Result<Self, EnsembleError> {
        if !(cell_size > 0.0) || !cell_size.is_finite() {
            return Err(EnsembleError::InvalidCellSize(cell_size));
        }
        let l = region.lengths();
        let cells = [0, 1, 2].map(|k| ((l[k] / cell_size).round() as usize).max(1));
        Ok(Self { region, cell_size, cells })
    }

    pub fn len(&self) -> usize {
        self.cells.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn widths(&self) -> Vec3 {
        let l = self.region.lengths();
        Vec3::new(l.x / self.cells[0] as f64, l.y / self.cells[1] as f64, l.z / self.cells[2] as f64)
    }

    pub fn cell_volume(&self) -> f64 {
        self.widths().product()
    }

    pub fn flat(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.cells[1] + j) * self.cells[2] + k
    }

    pub fn unflat(&self, c: usize) -> [usize; 3] {
        let k = c % self.cells[2];
        let j = (c / self.cells[2]) % self.cells[1];
        [c / (self.cells[1] * self.cells[2]), j, k]
    }

    /// Flat index of the cell containing `x`; points on the upper faces
    /// belong to the last cell.
    pub fn cell_of(&self, x: &Vec3) -> Option<usize> {
        if !self.region.contains(x) {
            return None;
        }
        let w = self.widths();
        let idx = [0, 1, 2].map(|a| (((x[a] - self.region.lo[a]) / w[a]) as usize).min(self.cells[a] - 1));
        Some(self.flat(idx[0], idx[1], idx[2]))
    }

    /// Lower corner of cell `c`.
    pub fn cell_lo(&self, c: usize) -> Vec3 {
        let [i, j, k] = self.unflat(c);
        let w = self.widths();
        self.region.lo + Vec3::new(i as f64 * w.x, j as f64 * w.y, k as f64 * w.z)
    }
}
