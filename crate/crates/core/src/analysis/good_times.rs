//! Good times: samples where the dissipation norm is at most `M`.
//!
//! Sample `k` stands for the interval `(t_{k−1}, t_k]` (the step that
//! produced it), so measures are sums of step lengths.

use serde::{Deserialize, Serialize};

use crate::dynamics::Trajectory;
use crate::error::{Error, Result};
use crate::physics::model::DissipationNorm;
use crate::scalar::Real;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GoodTimeSet<T> {
    pub m: T,
    pub t0: T,
    pub norm: DissipationNorm,
    /// `mask[k]` is true iff `t_k ≥ t0` and the norm at `t_k` is at most `M`.
    pub mask: Vec<bool>,
    /// Measure of `[t0, t_end] \ A_M(t0)`.
    pub bad_measure: T,
    /// `(E(φ₀) − E_floor + n·tol_E) / (c·M²)`, when energy data is available.
    pub bound: Option<T>,
}

impl<T: Real> GoodTimeSet<T> {
    pub fn bound_holds(&self) -> bool {
        self.bound.is_none_or(|b| self.bad_measure <= b * (T::one() + T::lit(1e-9)) + T::lit(1e-14))
    }

    pub fn good_count(&self) -> usize {
        self.mask.iter().filter(|&&g| g).count()
    }
}

fn check_series<T: Real>(times: &[T], values: &[T]) -> Result<()> {
    if times.len() != values.len() {
        return Err(Error::LengthMismatch { expected: times.len(), actual: values.len() });
    }
    if times.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidSpec("sample times must be strictly increasing".into()));
    }
    Ok(())
}

/// Length of `(a, b] ∩ [t0, ∞)`.
fn overlap<T: Real>(a: T, b: T, t0: T) -> T {
    (b - a.max(t0)).max(T::zero())
}

/// Classifies a sampled trace. No bound is asserted.
pub fn classify_series<T: Real>(times: &[T], norms: &[T], m: T, t0: T, norm: DissipationNorm) -> Result<GoodTimeSet<T>> {
    check_series(times, norms)?;
    if !(m > T::zero()) {
        return Err(Error::InvalidSpec(format!("M must be positive, got {m}")));
    }
    let mask: Vec<bool> = times.iter().zip(norms).map(|(&t, &v)| t >= t0 && v <= m).collect();
    let bad: Vec<T> = (1..times.len())
        .filter(|&k| norms[k] > m)
        .map(|k| overlap(times[k - 1], times[k], t0))
        .collect();
    Ok(GoodTimeSet { m, t0, norm, mask, bad_measure: crate::field::compensated_sum(&bad), bound: None })
}

/// Classifies the recorded trajectory and attaches the measure bound, without
/// failing when the bound is violated.
pub fn classify_unchecked<T: Real>(traj: &Trajectory<T>, m: T, t0: T) -> Result<GoodTimeSet<T>> {
    let b = &traj.bounds;
    let mut set = classify_series(&traj.times(), &traj.norms(), m, t0, b.norm)?;
    let steps = T::from_count(traj.rows.len().saturating_sub(1));
    let budget = traj.initial_energy() - b.floor + steps * b.tol_e;
    set.bound = Some(budget / (b.coefficient * m * m));
    Ok(set)
}

/// [`classify_unchecked`] plus the assertion `bad_measure ≤ bound`, which the
/// discrete energy inequality guarantees; a failure points at the solver.
pub fn classify_good_times<T: Real>(traj: &Trajectory<T>, m: T, t0: T) -> Result<GoodTimeSet<T>> {
    let set = classify_unchecked(traj, m, t0)?;
    if !set.bound_holds() {
        return Err(Error::BoundViolation {
            m: m.as_f64(),
            measure: set.bad_measure.as_f64(),
            bound: set.bound.map_or(f64::NAN, |b| b.as_f64()),
        });
    }
    Ok(set)
}
