//! Equilibria: solutions of `μ(φ∞) = μ∞` with prescribed mean `k`.
//!
//! The unknown multiplier is kept explicitly and the mass constraint is
//! appended as an extra equation, giving the bordered system
//!
//! ```text
//! [ H   −1 ] [dφ ]   [ −(μ(φ) − μ∞) ]
//! [ 1ᵀ/N 0 ] [dμ∞] = [ −(mean φ − k) ]
//! ```
//!
//! where `H` is the exact Jacobian of the discrete chemical potential.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{self, Field};
use crate::grid::Grid;
use crate::linalg::DenseLu;
use crate::physics::functional::DiscreteModel;
use crate::physics::model::ModelConfig;
use crate::scalar::Real;

/// A converged stationary state.
#[derive(Clone, Debug)]
pub struct EquilibriumState<T> {
    pub phi_inf: Field<T>,
    pub mu_inf: T,
    /// Discrete L² norm of `μ(φ∞) − μ∞`.
    pub residual_l2: T,
    /// `1 − ‖φ∞‖_∞`.
    pub delta: T,
    pub k: T,
    pub seed_id: String,
    pub newton_iters: usize,
}

/// The JSON sidecar written next to an equilibrium snapshot.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumSidecar {
    pub mu_inf: f64,
    pub residual: f64,
    pub delta: f64,
    pub k: f64,
    pub seed_id: String,
}

impl<T: Real> EquilibriumState<T> {
    pub fn sidecar(&self) -> EquilibriumSidecar {
        EquilibriumSidecar {
            mu_inf: self.mu_inf.as_f64(),
            residual: self.residual_l2.as_f64(),
            delta: self.delta.as_f64(),
            k: self.k.as_f64(),
            seed_id: self.seed_id.clone(),
        }
    }
}

/// `μ(φ) − μ_c`.
pub fn stationary_residual<T: Real>(m: &ModelConfig<T>, phi: &Field<T>, mu_c: T) -> Result<Field<T>> {
    let model = DiscreteModel::new(m, *phi.grid())?;
    Ok(model.chemical_potential(phi)?.map(|v| v - mu_c))
}

#[derive(Clone, Debug)]
pub struct SolverOptions<T> {
    pub tol: T,
    pub max_iter: usize,
    pub max_backtracks: usize,
    /// Initial pseudo-time shift `1/τ` added to the diagonal of `H`. The
    /// shift turns early iterations into implicit gradient-flow steps, which
    /// steers the solver away from unstable equilibria (the constant state
    /// in the spinodal region in particular). It decays as the residual
    /// drops, recovering plain Newton. Zero disables it.
    pub pseudo_shift: T,
}

impl<T: Real> Default for SolverOptions<T> {
    fn default() -> Self {
        SolverOptions { tol: T::lit(1e-10), max_iter: 200, max_backtracks: 50, pseudo_shift: T::lit(1.0) }
    }
}

/// Initial guesses. Equilibria are not unique, so the seed is recorded with
/// the result.
#[derive(Clone, Debug)]
pub enum Seed<T: Real> {
    Constant,
    /// `k + A·Π tanh((x − cᵢ)/w)` along the first axis, clamped into the
    /// admissible range.
    TanhLayers { centers: Vec<T>, width: T, amplitude: T },
    /// Any field, e.g. the endpoint of a trajectory.
    Field { id: String, phi: Field<T> },
}

impl<T: Real> Seed<T> {
    pub fn id(&self) -> String {
        match self {
            Seed::Constant => "constant".into(),
            Seed::TanhLayers { centers, width, amplitude } => {
                let c: Vec<String> = centers.iter().map(|c| format!("{c}")).collect();
                format!("tanh[{}]w{width}a{amplitude}", c.join(","))
            }
            Seed::Field { id, .. } => id.clone(),
        }
    }

    pub fn field(&self, grid: Grid<T>, k: T, bound: T) -> Result<Field<T>> {
        let phi = match self {
            Seed::Constant => Field::constant(grid, k),
            Seed::TanhLayers { centers, width, amplitude } => {
                if !(*width > T::zero()) {
                    return Err(Error::InvalidSpec("tanh seed width must be positive".into()));
                }
                Field::from_fn(grid, |x| {
                    let p = centers.iter().fold(T::one(), |acc, &c| acc * ((x[0] - c) / *width).tanh());
                    k + *amplitude * p
                })
            }
            Seed::Field { phi, .. } => {
                if !grid.same_as(phi.grid()) {
                    return Err(Error::GridMismatch);
                }
                phi.clone()
            }
        };
        let lim = bound * T::lit(0.999);
        Ok(phi.map(|v| v.max(-lim).min(lim)))
    }
}

/// Bordered Newton solve for an equilibrium of mean `k` starting from `guess`.
pub fn solve_equilibrium<T: Real>(
    m: &ModelConfig<T>,
    k: T,
    guess: &Field<T>,
    opts: &SolverOptions<T>,
    seed_id: &str,
) -> Result<EquilibriumState<T>> {
    let model = DiscreteModel::new(m, *guess.grid())?;
    solve_with(&model, k, guess, opts, seed_id)
}

pub fn solve_with<T: Real>(
    model: &DiscreteModel<T>,
    k: T,
    guess: &Field<T>,
    opts: &SolverOptions<T>,
    seed_id: &str,
) -> Result<EquilibriumState<T>> {
    if !(k.abs() < T::one()) {
        return Err(Error::InvalidSpec(format!("mean k = {k} must lie in (-1, 1)")));
    }
    let bound = model.config().potential.bound();
    model.check_grid(guess)?;
    model.check_bounds(guess, 2)?;
    let vol = model.grid().cell_volume();

    let mut phi = match_mean(guess, k, bound);
    let mut mu_inf = model.chemical_potential(&phi)?.mean();
    let eval = |phi: &Field<T>, mu_inf: T| -> Result<(Vec<T>, T, T)> {
        let r: Vec<T> = model.chemical_potential(phi)?.values().iter().map(|&v| v - mu_inf).collect();
        let g = phi.mean() - k;
        // Combined norm: the mass row is weighted like one cell-average.
        let norm = (field::dot(&r, &r) * vol + g * g * model.grid().domain_volume()).sqrt();
        Ok((r, g, norm))
    };
    let (mut r, mut g, mut norm) = eval(&phi, mu_inf)?;
    let mut shift = opts.pseudo_shift;
    let mut iters = 0;
    while norm > opts.tol {
        if iters >= opts.max_iter {
            return Err(Error::NewtonDivergence { iterations: iters, residual: norm.as_f64() });
        }
        iters += 1;
        let direction = bordered_direction(model, &phi, &r, g, shift);
        let (dphi, dmu) = match direction {
            Ok(d) => d,
            Err(Error::SingularMatrix { .. }) if shift < T::lit(1e6) => {
                shift = (shift * T::lit(10.0)).max(T::lit(1e-3));
                continue;
            }
            Err(e) => return Err(e),
        };
        // Backtrack into the admissible box, then require a decrease.
        let mut lambda = T::one();
        let mut accepted = false;
        for _ in 0..opts.max_backtracks {
            let vals: Vec<T> = phi.values().iter().zip(&dphi).map(|(&p, &d)| p + lambda * d).collect();
            if vals.iter().all(|v| v.abs() <= bound) {
                let trial = Field::new(*phi.grid(), vals)?;
                let tmu = mu_inf + lambda * dmu;
                let (tr, tg, tn) = eval(&trial, tmu)?;
                let ok = if shift > T::zero() { tn < norm } else { tn <= (T::one() - T::lit(1e-4) * lambda) * norm };
                if ok {
                    // Residual-ratio update of the pseudo-time step.
                    shift = if shift > T::zero() && lambda == T::one() {
                        let next = shift * tn / norm;
                        if next < T::lit(1e-10) { T::zero() } else { next }
                    } else {
                        shift
                    };
                    phi = trial;
                    mu_inf = tmu;
                    r = tr;
                    g = tg;
                    norm = tn;
                    accepted = true;
                    break;
                }
            }
            lambda = lambda * T::lit(0.5);
        }
        if !accepted {
            if norm <= opts.tol * T::lit(1e3) {
                break;
            }
            if shift < T::lit(1e6) {
                shift = (shift * T::lit(10.0)).max(T::lit(1e-3));
                continue;
            }
            return Err(Error::NewtonDivergence { iterations: iters, residual: norm.as_f64() });
        }
    }
    // Remove any remaining roundoff in the mean; the shift is below the
    // solver tolerance and keeps mean(φ∞) = k to machine precision.
    let shift = k - phi.mean();
    if shift != T::zero() && shift.abs() < T::lit(1e-10) {
        phi = phi.map(|v| v + shift);
        r = model.chemical_potential(&phi)?.values().iter().map(|&v| v - mu_inf).collect();
    }
    let residual_l2 = (field::dot(&r, &r) * vol).sqrt();
    let delta = T::one() - phi.sup_norm();
    if !(delta > T::zero()) {
        return Err(Error::SeparationFailure { delta: delta.as_f64() });
    }
    Ok(EquilibriumState { phi_inf: phi, mu_inf, residual_l2, delta, k, seed_id: seed_id.to_string(), newton_iters: iters })
}

/// Moves `phi` onto the constraint `mean = k` by a constant shift of
/// `atanh φ`, which keeps every value inside `(−bound, bound)`. A plain
/// shift would push near-pure cells across the barrier.
fn match_mean<T: Real>(phi: &Field<T>, k: T, bound: T) -> Field<T> {
    if phi.mean() == k {
        return phi.clone();
    }
    let moved = |c: T| phi.map(|v| (v.atanh() + c).tanh().max(-bound).min(bound));
    let (mut lo, mut hi) = (-T::one(), T::one());
    while moved(lo).mean() > k && lo > T::lit(-1e3) {
        lo = lo * T::lit(2.0);
    }
    while moved(hi).mean() < k && hi < T::lit(1e3) {
        hi = hi * T::lit(2.0);
    }
    for _ in 0..200 {
        let mid = T::lit(0.5) * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if moved(mid).mean() < k {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    moved(T::lit(0.5) * (lo + hi))
}

/// Solves the bordered system for `(dφ, dμ∞)`.
fn bordered_direction<T: Real>(
    model: &DiscreteModel<T>,
    phi: &Field<T>,
    r: &[T],
    g: T,
    shift: T,
) -> Result<(Vec<T>, T)> {
    let n = r.len();
    let nf = T::from_count(n);
    let mut h = model.local_jacobian(phi)?;
    if shift > T::zero() {
        h.add_diagonal(&vec![shift; n]);
    }
    if model.kernel().is_none() {
        // Schur complement on the sparse block when it is invertible.
        if let Ok(lu) = h.factor() {
            let mut x: Vec<T> = r.iter().map(|&v| -v).collect();
            lu.solve(&mut x);
            let mut y = vec![T::one(); n];
            lu.solve(&mut y);
            let my = field::compensated_sum(&y) / nf;
            let mx = field::compensated_sum(&x) / nf;
            if my.is_finite() && my.abs() > T::epsilon() * T::lit(1e3) * y.iter().fold(T::zero(), |a, v| a.max(v.abs())) {
                let dmu = (-g - mx) / my;
                let d: Vec<T> = x.iter().zip(&y).map(|(&xi, &yi)| xi + dmu * yi).collect();
                if d.iter().all(|v| v.is_finite()) && dmu.is_finite() {
                    return Ok((d, dmu));
                }
            }
        }
    }
    // Dense bordered fallback; also the nonlocal path, where H has the
    // dense block −σ₂K.
    let size = n + 1;
    let mut a = vec![T::zero(); size * size];
    for i in 0..n {
        for &(j, v) in h.row(i) {
            a[i * size + j] = a[i * size + j] + v;
        }
        a[i * size + n] = -T::one();
        a[n * size + i] = T::one() / nf;
    }
    if let Some(k) = model.kernel() {
        let s2 = model.config().sigma2;
        for i in 0..n {
            for (j, &kij) in k.row(i).iter().enumerate() {
                a[i * size + j] = a[i * size + j] - s2 * kij;
            }
        }
    }
    let lu = DenseLu::factor(a, size)?;
    let mut b: Vec<T> = r.iter().map(|&v| -v).collect();
    b.push(-g);
    lu.solve(&mut b);
    let dmu = b.pop().expect("non-empty");
    Ok((b, dmu))
}

/// Result of checking the separation properties of an equilibrium.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeparationReport {
    pub delta: f64,
    /// `‖∇φ∞‖_{L²}`, reported for nonlocal models.
    pub grad_l2: Option<f64>,
    /// Right-hand side of the nonlocal gradient estimate.
    pub grad_bound: Option<f64>,
    pub grad_bound_holds: Option<bool>,
}

/// `δ = 1 − ‖φ∞‖_∞` and, for nonlocal models, the gradient estimate
/// `‖∇φ∞‖_{L²} ≤ c·‖∇J‖_{L¹}‖φ∞‖_∞|Ω|^{1/2}/θ`, where `c = 1` for the literal
/// model and `c = 2` with the consistency term (which adds `φ∇(J∗1)`).
pub fn separation_bound<T: Real>(m: &ModelConfig<T>, e: &EquilibriumState<T>) -> SeparationReport {
    let delta = (T::one() - e.phi_inf.sup_norm()).as_f64();
    let mut rep = SeparationReport { delta, grad_l2: None, grad_bound: None, grad_bound_holds: None };
    if let Some(kernel) = &m.kernel {
        let grid = e.phi_inf.grid();
        let grad = field::norm_h1_semi(&e.phi_inf).as_f64();
        let c = if m.nonlocal_consistency { 2.0 } else { 1.0 };
        let bound = c * kernel.grad_l1(grid).as_f64() * e.phi_inf.sup_norm().as_f64() * grid.domain_volume().as_f64().sqrt()
            / m.potential.theta.as_f64();
        rep.grad_l2 = Some(grad);
        rep.grad_bound = Some(bound);
        // The absolute slack covers near-constant states, where both sides
        // are at roundoff level.
        rep.grad_bound_holds = Some(grad <= bound + 1e-9);
    }
    rep
}
