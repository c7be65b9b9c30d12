//! Interaction kernels for the nonlocal model. Every kernel is a function of
//! `|x|`, so evenness `J(x) = J(−x)` holds by construction.

use std::fmt;

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::kernel::{FftConvolver, KernelMatrix};
use crate::physics::coefficients::ScalarFn;
use crate::scalar::Real;

#[derive(Clone)]
pub enum KernelKind<T> {
    /// `scale · exp(−|x|²/(2·support²))`, not truncated.
    Gaussian,
    /// `scale` for `|x| ≤ support`, zero outside.
    Tophat,
    /// Radial profile `J(r)`; `scale` multiplies it.
    Radial(ScalarFn<T>),
}

impl<T> fmt::Debug for KernelKind<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KernelKind::Gaussian => f.write_str("Gaussian"),
            KernelKind::Tophat => f.write_str("Tophat"),
            KernelKind::Radial(_) => f.write_str("Radial(..)"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct KernelSpec<T> {
    pub kind: KernelKind<T>,
    pub scale: T,
    pub support: T,
}

impl<T: Real> KernelSpec<T> {
    pub fn gaussian(scale: T, support: T) -> Result<Self> {
        Self::new(KernelKind::Gaussian, scale, support)
    }

    pub fn tophat(scale: T, support: T) -> Result<Self> {
        Self::new(KernelKind::Tophat, scale, support)
    }

    pub fn new(kind: KernelKind<T>, scale: T, support: T) -> Result<Self> {
        if !scale.is_finite() {
            return Err(Error::InvalidSpec("kernel scale must be finite".into()));
        }
        if !(support > T::zero()) || !support.is_finite() {
            return Err(Error::InvalidSpec(format!("kernel support must be positive, got {support}")));
        }
        Ok(KernelSpec { kind, scale, support })
    }

    /// `J(r)` for `r = |x| ≥ 0`.
    pub fn radial(&self, r: T) -> T {
        match &self.kind {
            KernelKind::Gaussian => self.scale * (-(r * r) / (T::lit(2.0) * self.support * self.support)).exp(),
            KernelKind::Tophat => {
                if r <= self.support {
                    self.scale
                } else {
                    T::zero()
                }
            }
            KernelKind::Radial(j) => self.scale * j(r),
        }
    }

    #[inline]
    pub fn eval(&self, x: [T; 2]) -> T {
        self.radial((x[0] * x[0] + x[1] * x[1]).sqrt())
    }

    /// Whether `[J(x_i − x_j)]` is positive semi-definite for any point set.
    /// True for Gaussians with nonnegative scale (Bochner). Minimum-image
    /// wrapping breaks the argument, so periodic grids always report false.
    pub fn is_positive_definite_on(&self, grid: &Grid<T>) -> bool {
        matches!(self.kind, KernelKind::Gaussian)
            && self.scale >= T::zero()
            && grid.bc() == crate::grid::BoundaryMode::Neumann
    }

    pub fn matrix(&self, grid: Grid<T>) -> KernelMatrix<T> {
        KernelMatrix::build(grid, |x| self.eval(x), self.grad_l1(&grid))
    }

    pub fn fft(&self, grid: Grid<T>) -> FftConvolver<T> {
        FftConvolver::new(grid, |x| self.eval(x))
    }

    /// Estimate of `‖∇J‖_{L¹(A)}` on the difference set `A = Ω − Ω`.
    ///
    /// Gaussians use the exact gradient under a midpoint rule; other kernels
    /// use finite differences on the same quadrature mesh, which converges to
    /// the total variation for discontinuous profiles.
    pub fn grad_l1(&self, grid: &Grid<T>) -> T {
        let dim = grid.dim();
        let m = if dim == 1 { 20_000 } else { 400 };
        let half = [grid.length(0), if dim == 2 { grid.length(1) } else { T::zero() }];
        let step = [half[0] * T::lit(2.0) / T::from_count(m), half[1] * T::lit(2.0) / T::from_count(m)];
        let my = if dim == 2 { m } else { 1 };
        let cell = if dim == 2 { step[0] * step[1] } else { step[0] };
        let two = T::lit(2.0);
        let mut acc = T::zero();
        for b in 0..my {
            for a in 0..m {
                let x0 = -half[0] + (T::from_count(a) + T::lit(0.5)) * step[0];
                let y0 = if dim == 2 { -half[1] + (T::from_count(b) + T::lit(0.5)) * step[1] } else { T::zero() };
                let g = match self.kind {
                    KernelKind::Gaussian => {
                        let r = (x0 * x0 + y0 * y0).sqrt();
                        r / (self.support * self.support) * self.radial(r).abs()
                    }
                    _ => {
                        let gx = (self.eval([x0 + step[0] / two, y0]) - self.eval([x0 - step[0] / two, y0])) / step[0];
                        let gy = if dim == 2 {
                            (self.eval([x0, y0 + step[1] / two]) - self.eval([x0, y0 - step[1] / two])) / step[1]
                        } else {
                            T::zero()
                        };
                        (gx * gx + gy * gy).sqrt()
                    }
                };
                acc = acc + g;
            }
        }
        acc * cell
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::BoundaryMode;

    #[test]
    fn kernels_are_even_and_symmetric() {
        let g = Grid::<f64>::new_2d(5, 4, 1.0, 1.0, BoundaryMode::Neumann).unwrap();
        for k in [KernelSpec::gaussian(1.0, 0.2).unwrap(), KernelSpec::tophat(2.0, 0.4).unwrap()] {
            assert_eq!(k.eval([0.3, -0.1]), k.eval([-0.3, 0.1]));
            let m = k.matrix(g);
            for i in 0..m.size() {
                for j in 0..m.size() {
                    assert_eq!(m.entry(i, j), m.entry(j, i));
                }
            }
        }
    }

    #[test]
    fn gradient_l1_estimates() {
        // 1D Gaussian on a wide domain: ‖J'‖_{L¹(ℝ)} = 2·J(0) = 2·scale.
        let g = Grid::<f64>::new_1d(10, 4.0, BoundaryMode::Neumann).unwrap();
        let k = KernelSpec::gaussian(1.5, 0.1).unwrap();
        let est = k.grad_l1(&g);
        assert!((est - 3.0).abs() < 1e-5, "{est}");
        // 1D tophat: total variation is two jumps of height `scale`.
        let t = KernelSpec::tophat(0.5, 0.3).unwrap();
        assert!((t.grad_l1(&g) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn rejects_bad_support() {
        assert!(KernelSpec::<f64>::gaussian(1.0, 0.0).is_err());
        assert!(KernelSpec::<f64>::tophat(f64::NAN, 0.1).is_err());
    }
}
