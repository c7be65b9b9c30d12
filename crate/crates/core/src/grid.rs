//! Uniform cell-centered grids on rectangles in one or two dimensions.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Boundary treatment shared by every discrete operator on a grid.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryMode {
    /// Homogeneous Neumann: boundary faces carry zero flux.
    Neumann,
    /// Periodic wrap in every direction.
    Periodic,
}

impl BoundaryMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            BoundaryMode::Neumann => "neumann",
            BoundaryMode::Periodic => "periodic",
        }
    }
}

impl std::str::FromStr for BoundaryMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "neumann" => Ok(BoundaryMode::Neumann),
            "periodic" => Ok(BoundaryMode::Periodic),
            other => Err(Error::Parse(format!("unknown boundary mode `{other}`"))),
        }
    }
}

/// A uniform rectangular grid `[0, L_x] (x [0, L_y])` split into cells.
///
/// Cells are stored row-major with `x` varying fastest: cell `(i, j)` has
/// flat index `j * n_x + i`. In one dimension the second axis is a dummy of
/// length one and does not contribute to volumes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid<T> {
    dim: usize,
    n: [usize; 2],
    lengths: [T; 2],
    spacing: [T; 2],
    bc: BoundaryMode,
}

impl<T: Real> Grid<T> {
    pub fn new_1d(n: usize, length: T, bc: BoundaryMode) -> Result<Self> {
        Self::new(&[n], &[length], bc)
    }

    pub fn new_2d(nx: usize, ny: usize, lx: T, ly: T, bc: BoundaryMode) -> Result<Self> {
        Self::new(&[nx, ny], &[lx, ly], bc)
    }

    /// Builds a grid from per-axis cell counts and side lengths.
    pub fn new(counts: &[usize], lengths: &[T], bc: BoundaryMode) -> Result<Self> {
        let dim = counts.len();
        if !(1..=2).contains(&dim) {
            return Err(Error::InvalidGrid(format!("dimension must be 1 or 2, got {dim}")));
        }
        if lengths.len() != dim {
            return Err(Error::InvalidGrid("one length per axis is required".into()));
        }
        let mut n = [1usize; 2];
        let mut len = [T::one(); 2];
        let mut h = [T::one(); 2];
        for axis in 0..dim {
            if counts[axis] == 0 {
                return Err(Error::InvalidGrid(format!("axis {axis} has no cells")));
            }
            if !(lengths[axis] > T::zero()) || !lengths[axis].is_finite() {
                return Err(Error::InvalidGrid(format!("axis {axis} length must be positive")));
            }
            n[axis] = counts[axis];
            len[axis] = lengths[axis];
            h[axis] = lengths[axis] / T::from_count(counts[axis]);
        }
        Ok(Grid { dim, n, lengths: len, spacing: h, bc })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn n(&self, axis: usize) -> usize {
        self.n[axis]
    }

    #[inline]
    pub fn counts(&self) -> [usize; 2] {
        self.n
    }

    #[inline]
    pub fn length(&self, axis: usize) -> T {
        self.lengths[axis]
    }

    #[inline]
    pub fn h(&self, axis: usize) -> T {
        self.spacing[axis]
    }

    #[inline]
    pub fn bc(&self) -> BoundaryMode {
        self.bc
    }

    #[inline]
    pub fn cell_count(&self) -> usize {
        self.n[0] * self.n[1]
    }

    /// Volume of one cell (product of the active spacings).
    pub fn cell_volume(&self) -> T {
        (0..self.dim).fold(T::one(), |acc, a| acc * self.spacing[a])
    }

    /// Measure of the whole domain.
    pub fn domain_volume(&self) -> T {
        (0..self.dim).fold(T::one(), |acc, a| acc * self.lengths[a])
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.n[0] + i
    }

    #[inline]
    pub fn coords(&self, c: usize) -> (usize, usize) {
        (c % self.n[0], c / self.n[0])
    }

    /// Cell-center coordinates of cell `c`; the second entry is zero in 1D.
    pub fn center(&self, c: usize) -> [T; 2] {
        let (i, j) = self.coords(c);
        let half = T::lit(0.5);
        let x = (T::from_count(i) + half) * self.spacing[0];
        let y = if self.dim == 2 { (T::from_count(j) + half) * self.spacing[1] } else { T::zero() };
        [x, y]
    }

    /// Flat-index stride between neighbouring cells along `axis`.
    #[inline]
    pub fn stride(&self, axis: usize) -> usize {
        if axis == 0 {
            1
        } else {
            self.n[0]
        }
    }

    /// Number of faces normal to `axis` (including both boundary layers).
    pub fn face_count(&self, axis: usize) -> usize {
        if axis >= self.dim {
            return 0;
        }
        if axis == 0 {
            (self.n[0] + 1) * self.n[1]
        } else {
            self.n[0] * (self.n[1] + 1)
        }
    }

    /// Face index of the face with position `k` (0..=n_axis) along `axis`,
    /// in line `line` of the orthogonal direction.
    #[inline]
    pub fn face_index(&self, axis: usize, k: usize, line: usize) -> usize {
        if axis == 0 {
            line * (self.n[0] + 1) + k
        } else {
            k * self.n[0] + line
        }
    }

    /// Number of lines of faces orthogonal to `axis`.
    #[inline]
    pub(crate) fn lines(&self, axis: usize) -> usize {
        if axis == 0 {
            self.n[1]
        } else {
            self.n[0]
        }
    }

    /// Cell index of cell number `k` (0..n_axis) along `axis` in line `line`.
    #[inline]
    pub(crate) fn cell_on_line(&self, axis: usize, k: usize, line: usize) -> usize {
        if axis == 0 {
            self.index(k, line)
        } else {
            self.index(line, k)
        }
    }

    /// Whether the face at position `k` along `axis` is a physical boundary
    /// face (as opposed to an interior or periodic wrap face).
    #[inline]
    pub fn is_boundary_face(&self, axis: usize, k: usize) -> bool {
        self.bc == BoundaryMode::Neumann && (k == 0 || k == self.n[axis])
    }

    /// Whether the face at position `k` duplicates another face. With
    /// periodic wrap the last face of every line is the first one again.
    #[inline]
    pub fn is_duplicate_face(&self, axis: usize, k: usize) -> bool {
        self.bc == BoundaryMode::Periodic && k == self.n[axis]
    }

    /// True if both grids describe the same discretisation.
    pub fn same_as(&self, other: &Grid<T>) -> bool {
        self.dim == other.dim
            && self.n == other.n
            && self.bc == other.bc
            && (0..self.dim).all(|a| {
                let tol = T::epsilon() * T::lit(16.0) * self.lengths[a].abs();
                (self.lengths[a] - other.lengths[a]).abs() <= tol
            })
    }

    pub(crate) fn check_same(&self, other: &Grid<T>) -> Result<()> {
        if self.same_as(other) {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    /// Converts the grid into another scalar type.
    pub fn cast<U: Real>(&self) -> Grid<U> {
        Grid {
            dim: self.dim,
            n: self.n,
            lengths: [U::lit(self.lengths[0].as_f64()), U::lit(self.lengths[1].as_f64())],
            spacing: [U::lit(self.spacing[0].as_f64()), U::lit(self.spacing[1].as_f64())],
            bc: self.bc,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn volumes_and_counts() {
        let g = Grid::<f64>::new_2d(4, 8, 2.0, 1.0, BoundaryMode::Neumann).unwrap();
        assert_eq!(g.cell_count(), 32);
        assert!((g.cell_volume() - 0.5 * 0.125).abs() < 1e-15);
        assert!((g.domain_volume() - 2.0).abs() < 1e-15);
        assert_eq!(g.face_count(0), 5 * 8);
        assert_eq!(g.face_count(1), 4 * 9);
        let g1 = Grid::<f64>::new_1d(10, 1.0, BoundaryMode::Periodic).unwrap();
        assert!((g1.cell_volume() - 0.1).abs() < 1e-15);
        assert_eq!(g1.face_count(1), 0);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(Grid::<f64>::new_1d(0, 1.0, BoundaryMode::Neumann).is_err());
        assert!(Grid::<f64>::new_1d(4, -1.0, BoundaryMode::Neumann).is_err());
        assert!(Grid::<f64>::new(&[2, 2, 2], &[1.0, 1.0, 1.0], BoundaryMode::Neumann).is_err());
    }

    #[test]
    fn centers() {
        let g = Grid::<f64>::new_2d(2, 2, 1.0, 1.0, BoundaryMode::Neumann).unwrap();
        assert_eq!(g.center(3), [0.75, 0.75]);
        assert_eq!(g.coords(2), (0, 1));
    }
}
