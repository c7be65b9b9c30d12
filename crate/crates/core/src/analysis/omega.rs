//! Estimating the ω-limit set from late-time snapshots.

use serde::{Deserialize, Serialize};

use crate::dynamics::{Snapshot, Trajectory};
use crate::error::{Error, Result};
use crate::field::{self, Field};
use crate::physics::model::ModelConfig;
use crate::poisson::norm_hminus1;
use crate::scalar::Real;
use crate::stationary::{solve_equilibrium, SolverOptions};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NearestEquilibrium<T> {
    pub mu_inf: T,
    pub residual: T,
    pub delta: T,
    /// `‖φ(t_end) − φ∞‖_{L²}`.
    pub distance_l2: T,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OmegaLimitEstimate<T> {
    pub times: Vec<T>,
    /// Row-major pairwise distances.
    pub l2: Vec<T>,
    pub hminus1: Vec<T>,
    /// Largest pairwise L² distance.
    pub dispersion: T,
    pub singleton: bool,
    pub tol: T,
    pub nearest: Option<NearestEquilibrium<T>>,
}

/// Picks `n_reps` distinct snapshots near the geometric times
/// `t_end/2 · r^i`, `r = 2^{1/(n_reps−1)}`, from the trailing half.
/// With `good` given, only snapshots whose diagnostics row is good qualify.
pub fn select_representatives<'a, T: Real>(
    snaps: &'a [Snapshot<T>],
    good: Option<&[bool]>,
    n_reps: usize,
) -> Result<Vec<&'a Snapshot<T>>> {
    let Some(last) = snaps.last() else {
        return Err(Error::InsufficientSnapshots { needed: n_reps, available: 0 });
    };
    let (t_first, t_end) = (snaps[0].t, last.t);
    let half = t_first + T::lit(0.5) * (t_end - t_first);
    let pool: Vec<&Snapshot<T>> = snaps
        .iter()
        .filter(|s| s.t >= half)
        .filter(|s| good.is_none_or(|m| m.get(s.step).copied().unwrap_or(false)))
        .collect();
    if n_reps < 2 || pool.len() < n_reps {
        return Err(Error::InsufficientSnapshots { needed: n_reps.max(2), available: pool.len() });
    }
    // Geometric in the elapsed time since t_first, ending at t_end.
    let span = t_end - t_first;
    let mut chosen: Vec<usize> = Vec::with_capacity(n_reps);
    for i in 0..n_reps {
        let target = t_first + span * T::lit(0.5) * T::lit(2f64.powf(i as f64 / (n_reps - 1) as f64));
        let best = (0..pool.len())
            .filter(|j| !chosen.contains(j))
            .min_by(|&a, &b| {
                let da = (pool[a].t - target).abs();
                let db = (pool[b].t - target).abs();
                da.partial_cmp(&db).unwrap_or(std::cmp::Ordering::Equal)
            })
            .expect("pool larger than n_reps");
        chosen.push(best);
    }
    chosen.sort_unstable();
    Ok(chosen.into_iter().map(|j| pool[j]).collect())
}

/// Pairwise distances among representatives and the singleton verdict.
pub fn omega_limit_estimate<T: Real>(
    snaps: &[Snapshot<T>],
    good: Option<&[bool]>,
    n_reps: usize,
    tol: T,
) -> Result<OmegaLimitEstimate<T>> {
    let reps = select_representatives(snaps, good, n_reps)?;
    let n = reps.len();
    let mut l2 = vec![T::zero(); n * n];
    let mut hm1 = vec![T::zero(); n * n];
    for a in 0..n {
        for b in a + 1..n {
            let d = reps[a].phi.sub(&reps[b].phi)?;
            let (x, y) = (field::norm_l2(&d), norm_hminus1(&d)?);
            l2[a * n + b] = x;
            l2[b * n + a] = x;
            hm1[a * n + b] = y;
            hm1[b * n + a] = y;
        }
    }
    let dispersion = l2.iter().copied().fold(T::zero(), T::max);
    Ok(OmegaLimitEstimate {
        times: reps.iter().map(|s| s.t).collect(),
        l2,
        hminus1: hm1,
        dispersion,
        singleton: dispersion < tol,
        tol,
        nearest: None,
    })
}

/// Solves for the equilibrium seeded from `phi` (same mean) and reports
/// its distance from `phi`. `None` if the solve fails.
pub fn nearest_equilibrium<T: Real>(m: &ModelConfig<T>, phi: &Field<T>, opts: &SolverOptions<T>) -> Option<NearestEquilibrium<T>> {
    let e = solve_equilibrium(m, phi.mean(), phi, opts, "trajectory-end").ok()?;
    let d = phi.sub(&e.phi_inf).ok()?;
    Some(NearestEquilibrium { mu_inf: e.mu_inf, residual: e.residual_l2, delta: e.delta, distance_l2: field::norm_l2(&d) })
}

/// [`omega_limit_estimate`] on a trajectory, with the nearest-equilibrium
/// polish from the final snapshot when a model is supplied.
pub fn omega_from_trajectory<T: Real>(
    traj: &Trajectory<T>,
    good: Option<&[bool]>,
    n_reps: usize,
    tol: T,
    model: Option<&ModelConfig<T>>,
) -> Result<OmegaLimitEstimate<T>> {
    let mut est = omega_limit_estimate(&traj.snapshots, good, n_reps, tol)?;
    if let (Some(m), Some(last)) = (model, traj.last_snapshot()) {
        est.nearest = nearest_equilibrium(m, &last.phi, &SolverOptions::default());
    }
    Ok(est)
}
