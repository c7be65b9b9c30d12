//! Discrete dual norm `‖u‖_{H⁻¹}` through a mean-free Poisson solve.

use crate::error::{Error, Result};
use crate::field::{self, face_average, inner, FaceAverage, Field};
use crate::linalg::{div_grad_matrix, pcg};
use crate::scalar::Real;

/// Settings for the inner conjugate-gradient solve.
#[derive(Clone, Copy, Debug)]
pub struct PoissonOptions<T> {
    pub rel_tol: T,
    pub max_iter: usize,
}

impl<T: Real> Default for PoissonOptions<T> {
    fn default() -> Self {
        PoissonOptions { rel_tol: T::lit(1e-10), max_iter: 20_000 }
    }
}

/// Solves `-Δv = u - ū` with `v̄ = 0` on the grid of `u`.
pub fn solve_poisson<T: Real>(u: &Field<T>, opts: PoissonOptions<T>) -> Result<Field<T>> {
    let g = *u.grid();
    let rhs = u.fluctuation();
    let ones = face_average(&Field::constant(g, T::one()), FaceAverage::Arithmetic);
    let mut lap = div_grad_matrix(&g, &ones);
    lap.scale(-T::one());
    let diag: Vec<T> = (0..g.cell_count())
        .map(|i| lap.row(i).iter().find(|e| e.0 == i).map_or(T::zero(), |e| e.1))
        .collect();
    let out = pcg(|x, y| lap.matvec(x, y), &diag, rhs.values(), opts.rel_tol, opts.max_iter, true)?;
    Field::new(g, out.solution)
}

/// `‖u‖_{H⁻¹} = sqrt((u, v))` where `-Δv = u`, `v̄ = 0`. Non-zero means are
/// removed first.
pub fn norm_hminus1<T: Real>(u: &Field<T>) -> Result<T> {
    norm_hminus1_with(u, PoissonOptions::default())
}

pub fn norm_hminus1_with<T: Real>(u: &Field<T>, opts: PoissonOptions<T>) -> Result<T> {
    if field::norm_l2(u) == T::zero() {
        return Ok(T::zero());
    }
    let v = solve_poisson(u, opts)?;
    let val = inner(&u.fluctuation(), &v)?;
    if val < T::zero() {
        // Only reachable through roundoff on an essentially constant input.
        return if -val <= T::epsilon() * T::lit(1e3) {
            Ok(T::zero())
        } else {
            Err(Error::SolverNonConvergence { iterations: opts.max_iter, residual: val.as_f64() })
        };
    }
    Ok(val.sqrt())
}
