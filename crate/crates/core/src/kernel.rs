//! Convolution with an even interaction kernel, `(J∗φ)(x_i) ≈ Σ_j J(x_i − x_j) φ_j |cell|`.
//!
//! On Neumann grids the integral runs over Ω only, so the dense matrix is the
//! reference; an FFT path with zero padding reproduces it exactly. On periodic
//! grids displacements use the minimum image and the FFT is circulant.

use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::error::Result;
use crate::field::Field;
use crate::grid::{BoundaryMode, Grid};
use crate::scalar::Real;

/// Displacement between two cell centres, wrapped to the minimum image on
/// periodic grids.
pub fn displacement<T: Real>(grid: &Grid<T>, i: usize, j: usize) -> [T; 2] {
    let (ix, iy) = grid.coords(i);
    let (jx, jy) = grid.coords(j);
    let d = |a: usize, b: usize, axis: usize| -> T {
        let n = grid.n(axis) as isize;
        let mut k = a as isize - b as isize;
        if grid.bc() == BoundaryMode::Periodic {
            k = k.rem_euclid(n);
            if k > n / 2 {
                k -= n;
            }
        }
        T::lit(k as f64) * grid.h(axis)
    };
    let dx = d(ix, jx, 0);
    let dy = if grid.dim() == 2 { d(iy, jy, 1) } else { T::zero() };
    [dx, dy]
}

/// Dense kernel matrix `K[i][j] = J(x_i − x_j)·|cell|` with cached row sums.
#[derive(Clone, Debug)]
pub struct KernelMatrix<T> {
    grid: Grid<T>,
    k: Vec<T>,
    row_sums: Vec<T>,
    grad_l1: T,
}

impl<T: Real> KernelMatrix<T> {
    /// Builds the matrix from an even kernel `j(displacement)`.
    ///
    /// Only the upper triangle is evaluated and mirrored, so symmetry holds
    /// bit for bit.
    pub fn build(grid: Grid<T>, j: impl Fn([T; 2]) -> T, grad_l1: T) -> Self {
        let n = grid.cell_count();
        let vol = grid.cell_volume();
        let mut k = vec![T::zero(); n * n];
        for a in 0..n {
            for b in a..n {
                let v = j(displacement(&grid, a, b)) * vol;
                k[a * n + b] = v;
                k[b * n + a] = v;
            }
        }
        let row_sums = k.chunks_exact(n).map(|r| crate::field::compensated_sum(r)).collect();
        KernelMatrix { grid, k, row_sums, grad_l1 }
    }

    #[inline]
    pub fn grid(&self) -> &Grid<T> {
        &self.grid
    }

    #[inline]
    pub fn size(&self) -> usize {
        self.row_sums.len()
    }

    #[inline]
    pub fn entry(&self, i: usize, j: usize) -> T {
        self.k[i * self.size() + j]
    }

    pub fn row(&self, i: usize) -> &[T] {
        let n = self.size();
        &self.k[i * n..(i + 1) * n]
    }

    /// Row sums `w_i = (J∗1)(x_i)`.
    pub fn row_sums(&self) -> &[T] {
        &self.row_sums
    }

    /// Estimate of `‖∇J‖_{L¹}` supplied at construction.
    pub fn grad_l1(&self) -> T {
        self.grad_l1
    }

    pub fn is_nonnegative(&self) -> bool {
        self.k.iter().all(|&v| v >= T::zero())
    }

    /// Largest absolute row sum, a bound on the spectral radius.
    pub fn max_abs_row_sum(&self) -> T {
        self.k
            .chunks_exact(self.size())
            .map(|r| r.iter().map(|v| v.abs()).sum::<T>())
            .fold(T::zero(), T::max)
    }

    pub fn matvec(&self, x: &[T], y: &mut [T]) {
        for (yi, row) in y.iter_mut().zip(self.k.chunks_exact(self.size())) {
            *yi = crate::field::dot(row, x);
        }
    }

    /// Estimate of the smallest eigenvalue by power iteration on the shifted
    /// matrix `ρI − K`. The Rayleigh quotient converges from above, so callers
    /// wanting a safe lower bound should add a margin.
    pub fn min_eigenvalue_estimate(&self, iterations: usize) -> T {
        let n = self.size();
        let rho = self.max_abs_row_sum();
        if rho == T::zero() {
            return T::zero();
        }
        // Deterministic, non-symmetric start vector so no eigenspace is missed
        // by symmetry.
        let mut x: Vec<T> = (0..n).map(|i| T::lit(1.0 + ((i * 7919) % 101) as f64 / 101.0)).collect();
        let mut y = vec![T::zero(); n];
        let mut lambda = T::zero();
        for _ in 0..iterations {
            let nrm = crate::field::dot(&x, &x).sqrt();
            x.iter_mut().for_each(|v| *v = *v / nrm);
            self.matvec(&x, &mut y);
            for (yi, &xi) in y.iter_mut().zip(&x) {
                *yi = rho * xi - *yi;
            }
            lambda = crate::field::dot(&x, &y);
            std::mem::swap(&mut x, &mut y);
        }
        rho - lambda
    }
}

/// `J∗φ` through the dense matrix.
pub fn convolve<T: Real>(k: &KernelMatrix<T>, phi: &Field<T>) -> Result<Field<T>> {
    k.grid.check_same(phi.grid())?;
    let mut out = vec![T::zero(); phi.len()];
    k.matvec(phi.values(), &mut out);
    Field::new(*phi.grid(), out)
}

/// FFT evaluation of the same sums as [`KernelMatrix`].
pub struct FftConvolver<T: Real> {
    grid: Grid<T>,
    dims: [usize; 2],
    kernel_hat: Vec<Complex<T>>,
    fwd: [Arc<dyn Fft<T>>; 2],
    inv: [Arc<dyn Fft<T>>; 2],
}

impl<T: Real> std::fmt::Debug for FftConvolver<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FftConvolver").field("dims", &self.dims).finish()
    }
}

impl<T: Real> FftConvolver<T> {
    pub fn new(grid: Grid<T>, j: impl Fn([T; 2]) -> T) -> Self {
        let periodic = grid.bc() == BoundaryMode::Periodic;
        let mut dims = [1usize; 2];
        for (axis, d) in dims.iter_mut().enumerate().take(grid.dim()) {
            *d = if periodic { grid.n(axis) } else { 2 * grid.n(axis) };
        }
        // Signed displacement index for padded position `a` along `axis`.
        let offset = |a: usize, axis: usize| -> Option<isize> {
            let p = dims[axis] as isize;
            let n = grid.n(axis) as isize;
            let a = a as isize;
            if periodic {
                Some(if a > n / 2 { a - n } else { a })
            } else if a < n {
                Some(a)
            } else if a > n {
                Some(a - p)
            } else {
                None
            }
        };
        let vol = grid.cell_volume();
        let mut kernel = vec![Complex::new(T::zero(), T::zero()); dims[0] * dims[1]];
        for b in 0..dims[1] {
            for a in 0..dims[0] {
                let (Some(dx), Some(dy)) = (offset(a, 0), if grid.dim() == 2 { offset(b, 1) } else { Some(0) })
                else {
                    continue;
                };
                let x = [T::lit(dx as f64) * grid.h(0), if grid.dim() == 2 { T::lit(dy as f64) * grid.h(1) } else { T::zero() }];
                kernel[b * dims[0] + a] = Complex::new(j(x) * vol, T::zero());
            }
        }
        let mut planner = FftPlanner::new();
        let fwd = [planner.plan_fft_forward(dims[0]), planner.plan_fft_forward(dims[1])];
        let inv = [planner.plan_fft_inverse(dims[0]), planner.plan_fft_inverse(dims[1])];
        let mut conv = FftConvolver { grid, dims, kernel_hat: kernel, fwd, inv };
        let mut kh = std::mem::take(&mut conv.kernel_hat);
        conv.transform(&mut kh, true);
        conv.kernel_hat = kh;
        conv
    }

    fn transform(&self, data: &mut [Complex<T>], forward: bool) {
        let plans = if forward { &self.fwd } else { &self.inv };
        let [p0, p1] = self.dims;
        for row in data.chunks_exact_mut(p0) {
            plans[0].process(row);
        }
        if p1 > 1 {
            let mut col = vec![Complex::new(T::zero(), T::zero()); p1];
            for a in 0..p0 {
                for b in 0..p1 {
                    col[b] = data[b * p0 + a];
                }
                plans[1].process(&mut col);
                for b in 0..p1 {
                    data[b * p0 + a] = col[b];
                }
            }
        }
    }

    pub fn convolve(&self, phi: &Field<T>) -> Result<Field<T>> {
        self.grid.check_same(phi.grid())?;
        let [p0, p1] = self.dims;
        let (nx, ny) = (self.grid.n(0), self.grid.n(1));
        let mut buf = vec![Complex::new(T::zero(), T::zero()); p0 * p1];
        for y in 0..ny {
            for x in 0..nx {
                buf[y * p0 + x] = Complex::new(phi.values()[self.grid.index(x, y)], T::zero());
            }
        }
        self.transform(&mut buf, true);
        for (b, k) in buf.iter_mut().zip(&self.kernel_hat) {
            *b = *b * *k;
        }
        self.transform(&mut buf, false);
        let scale = T::one() / T::from_count(p0 * p1);
        let mut out = vec![T::zero(); phi.len()];
        for y in 0..ny {
            for x in 0..nx {
                out[self.grid.index(x, y)] = buf[y * p0 + x].re * scale;
            }
        }
        Field::new(self.grid, out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gauss(x: [f64; 2]) -> f64 {
        (-(x[0] * x[0] + x[1] * x[1]) / (2.0 * 0.05)).exp()
    }

    #[test]
    fn constant_gives_row_sums() {
        let g = Grid::new_2d(6, 5, 1.0, 1.0, BoundaryMode::Neumann).unwrap();
        let k = KernelMatrix::build(g, gauss, 0.0);
        let out = convolve(&k, &Field::constant(g, 0.4)).unwrap();
        for (o, w) in out.values().iter().zip(k.row_sums()) {
            assert!((o - 0.4 * w).abs() < 1e-14);
        }
    }

    #[test]
    fn basis_vector_picks_column() {
        let g = Grid::new_1d(9, 1.0, BoundaryMode::Neumann).unwrap();
        let k = KernelMatrix::build(g, gauss, 0.0);
        let mut e = vec![0.0; 9];
        e[4] = 1.0;
        let out = convolve(&k, &Field::new(g, e).unwrap()).unwrap();
        for i in 0..9 {
            assert_eq!(out.values()[i], k.entry(i, 4));
        }
    }

    #[test]
    fn fft_matches_dense() {
        for bc in [BoundaryMode::Neumann, BoundaryMode::Periodic] {
            for g in [Grid::new_1d(13, 1.0, bc).unwrap(), Grid::new_2d(8, 6, 1.0, 0.75, bc).unwrap()] {
                let k = KernelMatrix::build(g, gauss, 0.0);
                let fft = FftConvolver::new(g, gauss);
                let phi = Field::from_fn(g, |x| (5.0 * x[0]).sin() - x[1]);
                let a = convolve(&k, &phi).unwrap();
                let b = fft.convolve(&phi).unwrap();
                let err = a.sub(&b).unwrap().sup_norm();
                assert!(err < 1e-12, "{bc:?} dim {}: {err}", g.dim());
            }
        }
    }

    #[test]
    fn gaussian_matrix_is_positive_semidefinite() {
        let g = Grid::new_1d(24, 1.0, BoundaryMode::Neumann).unwrap();
        let k = KernelMatrix::build(g, gauss, 0.0);
        assert!(k.min_eigenvalue_estimate(400) > -1e-10);
        let tophat = KernelMatrix::build(g, |x: [f64; 2]| if x[0].abs() <= 0.3 { 1.0 } else { 0.0 }, 0.0);
        assert!(tophat.min_eigenvalue_estimate(400) < 0.0);
    }
}
