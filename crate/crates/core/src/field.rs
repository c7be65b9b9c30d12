//! Cell and face fields plus the discrete calculus acting on them.
//!
//! Gradients live on faces, divergences on cells. With Neumann boundaries
//! the boundary faces carry exactly zero flux, so every divergence telescopes
//! and sums to zero over the grid; this is what makes the evolution schemes
//! conserve mass to roundoff.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::scalar::Real;

/// Cell-centred scalar field.
#[derive(Clone, Debug, PartialEq)]
pub struct Field<T> {
    grid: Grid<T>,
    values: Vec<T>,
}

/// Face-centred field, one array per axis.
#[derive(Clone, Debug, PartialEq)]
pub struct FaceField<T> {
    grid: Grid<T>,
    faces: [Vec<T>; 2],
}

/// How cell values are interpolated to faces.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FaceAverage {
    #[default]
    Arithmetic,
    Harmonic,
}

impl<T: Real> Field<T> {
    /// Wraps `values`, checking the length and that every entry is finite.
    pub fn new(grid: Grid<T>, values: Vec<T>) -> Result<Self> {
        if values.len() != grid.cell_count() {
            return Err(Error::LengthMismatch { expected: grid.cell_count(), actual: values.len() });
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Field { grid, values })
    }

    pub(crate) fn from_vec_unchecked(grid: Grid<T>, values: Vec<T>) -> Self {
        debug_assert_eq!(values.len(), grid.cell_count());
        Field { grid, values }
    }

    pub fn constant(grid: Grid<T>, c: T) -> Self {
        Field { values: vec![c; grid.cell_count()], grid }
    }

    pub fn zeros(grid: Grid<T>) -> Self {
        Self::constant(grid, T::zero())
    }

    /// Samples `f` at cell centres.
    pub fn from_fn(grid: Grid<T>, f: impl Fn([T; 2]) -> T) -> Self {
        let values = (0..grid.cell_count()).map(|c| f(grid.center(c))).collect();
        Field { grid, values }
    }

    #[inline]
    pub fn grid(&self) -> &Grid<T> {
        &self.grid
    }

    #[inline]
    pub fn values(&self) -> &[T] {
        &self.values
    }

    #[inline]
    pub fn values_mut(&mut self) -> &mut [T] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.values.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Spatial mean `(1/|Ω|) ∫ u`, accumulated with compensated summation so
    /// that mass drift measurements are not dominated by the sum itself.
    pub fn mean(&self) -> T {
        compensated_sum(&self.values) / T::from_count(self.values.len())
    }

    /// Total mass `∫ u`.
    pub fn integral(&self) -> T {
        compensated_sum(&self.values) * self.grid.cell_volume()
    }

    pub fn min(&self) -> T {
        self.values.iter().copied().fold(T::infinity(), T::min)
    }

    pub fn max(&self) -> T {
        self.values.iter().copied().fold(T::neg_infinity(), T::max)
    }

    pub fn sup_norm(&self) -> T {
        self.values.iter().fold(T::zero(), |m, v| m.max(v.abs()))
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Field<T> {
        Field { grid: self.grid, values: self.values.iter().map(|&v| f(v)).collect() }
    }

    /// Pointwise combination of two fields on the same grid.
    pub fn zip_with(&self, other: &Field<T>, f: impl Fn(T, T) -> T) -> Result<Field<T>> {
        self.grid.check_same(&other.grid)?;
        Ok(Field {
            grid: self.grid,
            values: self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect(),
        })
    }

    pub fn sub(&self, other: &Field<T>) -> Result<Field<T>> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn add(&self, other: &Field<T>) -> Result<Field<T>> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn scale(&self, s: T) -> Field<T> {
        self.map(|v| v * s)
    }

    /// `u - ū`.
    pub fn fluctuation(&self) -> Field<T> {
        let m = self.mean();
        self.map(|v| v - m)
    }

    /// Converts the field into another scalar type.
    pub fn cast<U: Real>(&self) -> Field<U> {
        Field {
            grid: self.grid.cast(),
            values: self.values.iter().map(|v| U::lit(v.as_f64())).collect(),
        }
    }
}

impl<T: Real> FaceField<T> {
    pub fn zeros(grid: Grid<T>) -> Self {
        FaceField { faces: [vec![T::zero(); grid.face_count(0)], vec![T::zero(); grid.face_count(1)]], grid }
    }

    /// Builds a face field from explicit per-axis arrays.
    pub fn new(grid: Grid<T>, faces: [Vec<T>; 2]) -> Result<Self> {
        for (axis, f) in faces.iter().enumerate() {
            if f.len() != grid.face_count(axis) {
                return Err(Error::LengthMismatch { expected: grid.face_count(axis), actual: f.len() });
            }
        }
        Ok(FaceField { grid, faces })
    }

    pub fn grid(&self) -> &Grid<T> {
        &self.grid
    }

    pub fn axis(&self, axis: usize) -> &[T] {
        &self.faces[axis]
    }

    pub fn axis_mut(&mut self, axis: usize) -> &mut [T] {
        &mut self.faces[axis]
    }

    /// Face-wise product.
    pub fn mul(&self, other: &FaceField<T>) -> Result<FaceField<T>> {
        self.grid.check_same(&other.grid)?;
        let mut out = self.clone();
        for axis in 0..2 {
            for (a, &b) in out.faces[axis].iter_mut().zip(&other.faces[axis]) {
                *a = *a * b;
            }
        }
        Ok(out)
    }

    /// `Σ_faces w·a·b·vol` over distinct faces; `weights = None` means `w ≡ 1`.
    pub fn weighted_dot(&self, other: &FaceField<T>, weights: Option<&FaceField<T>>) -> Result<T> {
        self.grid.check_same(&other.grid)?;
        if let Some(w) = weights {
            self.grid.check_same(&w.grid)?;
        }
        let g = &self.grid;
        let mut acc = T::zero();
        for axis in 0..g.dim() {
            for line in 0..g.lines(axis) {
                for k in 0..=g.n(axis) {
                    if g.is_duplicate_face(axis, k) {
                        continue;
                    }
                    let f = g.face_index(axis, k, line);
                    let w = weights.map_or(T::one(), |w| w.faces[axis][f]);
                    acc = acc + w * self.faces[axis][f] * other.faces[axis][f];
                }
            }
        }
        Ok(acc * g.cell_volume())
    }
}

/// Face differences `(u_R - u_L)/h`. Boundary faces are zero for Neumann
/// grids; periodic grids wrap, with the last face repeating the first.
pub fn gradient<T: Real>(u: &Field<T>) -> FaceField<T> {
    let g = *u.grid();
    let mut out = FaceField::zeros(g);
    for axis in 0..g.dim() {
        let n = g.n(axis);
        let inv_h = T::one() / g.h(axis);
        for line in 0..g.lines(axis) {
            for k in 1..n {
                let l = g.cell_on_line(axis, k - 1, line);
                let r = g.cell_on_line(axis, k, line);
                out.faces[axis][g.face_index(axis, k, line)] = (u.values[r] - u.values[l]) * inv_h;
            }
            if g.bc() == crate::grid::BoundaryMode::Periodic {
                let l = g.cell_on_line(axis, n - 1, line);
                let r = g.cell_on_line(axis, 0, line);
                let v = (u.values[r] - u.values[l]) * inv_h;
                out.faces[axis][g.face_index(axis, 0, line)] = v;
                out.faces[axis][g.face_index(axis, n, line)] = v;
            }
        }
    }
    out
}

/// Cell divergence of a face flux. Boundary faces of Neumann grids are
/// treated as zero flux whatever they store.
pub fn divergence<T: Real>(flux: &FaceField<T>) -> Field<T> {
    let g = *flux.grid();
    let mut out = vec![T::zero(); g.cell_count()];
    for axis in 0..g.dim() {
        let n = g.n(axis);
        let inv_h = T::one() / g.h(axis);
        for line in 0..g.lines(axis) {
            for k in 0..n {
                let left = if g.is_boundary_face(axis, k) {
                    T::zero()
                } else {
                    flux.faces[axis][g.face_index(axis, k, line)]
                };
                let right = if g.is_boundary_face(axis, k + 1) {
                    T::zero()
                } else {
                    flux.faces[axis][g.face_index(axis, k + 1, line)]
                };
                let c = g.cell_on_line(axis, k, line);
                out[c] = out[c] + (right - left) * inv_h;
            }
        }
    }
    Field::from_vec_unchecked(g, out)
}

/// `div(w ∇u)` with face weights `w`.
pub fn weighted_div_grad<T: Real>(u: &Field<T>, weights: &FaceField<T>) -> Result<Field<T>> {
    u.grid().check_same(weights.grid())?;
    for axis in 0..2 {
        if weights.faces[axis].len() != u.grid().face_count(axis) {
            return Err(Error::LengthMismatch {
                expected: u.grid().face_count(axis),
                actual: weights.faces[axis].len(),
            });
        }
    }
    Ok(divergence(&gradient(u).mul(weights)?))
}

/// Discrete Laplacian `div ∇u`.
pub fn laplacian<T: Real>(u: &Field<T>) -> Field<T> {
    divergence(&gradient(u))
}

/// Interpolates cell values to faces. Neumann boundary faces take the value
/// of their single adjacent cell.
pub fn face_average<T: Real>(u: &Field<T>, mode: FaceAverage) -> FaceField<T> {
    let g = *u.grid();
    let mut out = FaceField::zeros(g);
    let two = T::lit(2.0);
    let avg = |a: T, b: T| match mode {
        FaceAverage::Arithmetic => (a + b) / two,
        FaceAverage::Harmonic => {
            if a + b == T::zero() {
                T::zero()
            } else {
                two * a * b / (a + b)
            }
        }
    };
    for axis in 0..g.dim() {
        let n = g.n(axis);
        for line in 0..g.lines(axis) {
            for k in 0..=n {
                let v = if k == 0 || k == n {
                    let first = u.values[g.cell_on_line(axis, 0, line)];
                    let last = u.values[g.cell_on_line(axis, n - 1, line)];
                    match g.bc() {
                        crate::grid::BoundaryMode::Periodic => avg(last, first),
                        crate::grid::BoundaryMode::Neumann => {
                            if k == 0 {
                                first
                            } else {
                                last
                            }
                        }
                    }
                } else {
                    avg(u.values[g.cell_on_line(axis, k - 1, line)], u.values[g.cell_on_line(axis, k, line)])
                };
                out.faces[axis][g.face_index(axis, k, line)] = v;
            }
        }
    }
    out
}

/// Cell value of `|∇u|²`: per axis, the mean of the squared differences on
/// the two faces bounding the cell (boundary faces count as zero).
pub fn cell_grad_sq<T: Real>(grad: &FaceField<T>) -> Field<T> {
    let g = *grad.grid();
    let mut out = vec![T::zero(); g.cell_count()];
    let half = T::lit(0.5);
    for axis in 0..g.dim() {
        for line in 0..g.lines(axis) {
            for k in 0..g.n(axis) {
                let l = grad.faces[axis][g.face_index(axis, k, line)];
                let r = grad.faces[axis][g.face_index(axis, k + 1, line)];
                let c = g.cell_on_line(axis, k, line);
                out[c] = out[c] + half * (l * l + r * r);
            }
        }
    }
    Field::from_vec_unchecked(g, out)
}

/// `Σ u·v·vol`.
pub fn inner<T: Real>(u: &Field<T>, v: &Field<T>) -> Result<T> {
    u.grid().check_same(v.grid())?;
    Ok(dot(u.values(), v.values()) * u.grid().cell_volume())
}

pub fn norm_l2<T: Real>(u: &Field<T>) -> T {
    (dot(u.values(), u.values()) * u.grid().cell_volume()).sqrt()
}

/// L² norm of the discrete gradient.
pub fn norm_h1_semi<T: Real>(u: &Field<T>) -> T {
    let g = gradient(u);
    g.weighted_dot(&g, None).expect("same grid").sqrt()
}

/// Neumaier-compensated sum.
pub fn compensated_sum<T: Real>(xs: &[T]) -> T {
    let mut sum = T::zero();
    let mut comp = T::zero();
    for &x in xs {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            comp = comp + ((sum - t) + x);
        } else {
            comp = comp + ((x - t) + sum);
        }
        sum = t;
    }
    sum + comp
}

#[inline]
pub(crate) fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::BoundaryMode;

    fn grid1(n: usize, l: f64, bc: BoundaryMode) -> Grid<f64> {
        Grid::new_1d(n, l, bc).unwrap()
    }

    #[test]
    fn constant_has_zero_gradient() {
        for bc in [BoundaryMode::Neumann, BoundaryMode::Periodic] {
            let g = Grid::new_2d(5, 3, 1.0, 2.0, bc).unwrap();
            let grad = gradient(&Field::constant(g, 0.3));
            assert!(grad.axis(0).iter().chain(grad.axis(1)).all(|&v| v == 0.0));
        }
    }

    #[test]
    fn ramp_gradient_neumann() {
        let g = grid1(4, 4.0, BoundaryMode::Neumann);
        let u = Field::new(g, vec![0.0, 1.0, 2.0, 3.0]).unwrap();
        assert_eq!(gradient(&u).axis(0), &[0.0, 1.0, 1.0, 1.0, 0.0]);
    }

    #[test]
    fn alternating_gradient_periodic() {
        let g = grid1(4, 4.0, BoundaryMode::Periodic);
        let u = Field::new(g, vec![0.0, 1.0, 0.0, 1.0]).unwrap();
        assert_eq!(gradient(&u).axis(0), &[-1.0, 1.0, -1.0, 1.0, -1.0]);
    }

    #[test]
    fn zero_weights_give_zero() {
        let g = grid1(6, 1.0, BoundaryMode::Neumann);
        let u = Field::from_fn(g, |x| x[0].sin());
        let out = weighted_div_grad(&u, &FaceField::zeros(g)).unwrap();
        assert!(out.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn laplacian_of_cosine_is_second_order() {
        let pi = std::f64::consts::PI;
        let errs: Vec<f64> = [32usize, 64, 128]
            .iter()
            .map(|&n| {
                let g = grid1(n, 1.0, BoundaryMode::Neumann);
                let u = Field::from_fn(g, |x| (pi * x[0]).cos());
                let w = face_average(&Field::constant(g, 1.0), FaceAverage::Arithmetic);
                let lap = weighted_div_grad(&u, &w).unwrap();
                lap.values()
                    .iter()
                    .enumerate()
                    .map(|(c, &v)| (v + pi * pi * (pi * g.center(c)[0]).cos()).abs())
                    .fold(0.0, f64::max)
            })
            .collect();
        for pair in errs.windows(2) {
            let order = (pair[0] / pair[1]).log2();
            assert!(order > 1.9, "observed order {order} from {errs:?}");
        }
        // Max error at N = 64 stays below C h² with a modest constant.
        assert!(errs[1] <= 2.0 * (1.0f64 / 64.0).powi(2) * pi.powi(4));
    }

    #[test]
    fn norms_of_simple_fields() {
        let g = grid1(10, 1.0, BoundaryMode::Neumann);
        assert!((norm_l2(&Field::constant(g, 1.0)) - 1.0).abs() < 1e-15);
        assert_eq!(norm_h1_semi(&Field::constant(g, 0.7)), 0.0);
        let g2 = grid1(2, 1.0, BoundaryMode::Neumann);
        let u = Field::new(g2, vec![1.0, -1.0]).unwrap();
        assert!((norm_l2(&u) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn field_rejects_nonfinite_and_bad_length() {
        let g = grid1(3, 1.0, BoundaryMode::Neumann);
        assert_eq!(Field::new(g, vec![0.0; 2]).unwrap_err(), Error::LengthMismatch { expected: 3, actual: 2 });
        assert_eq!(Field::new(g, vec![0.0, f64::NAN, 0.0]).unwrap_err(), Error::NonFinite { index: 1 });
    }

    #[test]
    fn grid_mismatch_is_reported() {
        let a = Field::constant(grid1(3, 1.0, BoundaryMode::Neumann), 1.0);
        let b = Field::constant(grid1(4, 1.0, BoundaryMode::Neumann), 1.0);
        assert_eq!(inner(&a, &b).unwrap_err(), Error::GridMismatch);
    }

    #[test]
    fn cell_grad_sq_averages_faces() {
        let g = grid1(3, 3.0, BoundaryMode::Neumann);
        let u = Field::new(g, vec![0.0, 1.0, 3.0]).unwrap();
        let s = cell_grad_sq(&gradient(&u));
        assert_eq!(s.values(), &[0.5, 2.5, 2.0]);
    }

    #[test]
    fn harmonic_average() {
        let g = grid1(2, 2.0, BoundaryMode::Neumann);
        let u = Field::new(g, vec![1.0, 3.0]).unwrap();
        let f = face_average(&u, FaceAverage::Harmonic);
        assert_eq!(f.axis(0), &[1.0, 1.5, 3.0]);
    }
}
