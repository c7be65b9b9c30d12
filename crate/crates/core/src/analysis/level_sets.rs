//! Near-pure level sets `A_δ(t) = {x : |φ(x,t)| ≥ 1 − δ}` and the empirical
//! separation pair `(T★, δ★)`.

use serde::{Deserialize, Serialize};

use crate::dynamics::Snapshot;
use crate::error::{Error, Result};
use crate::field::Field;
use crate::scalar::Real;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelSetReport<T> {
    pub delta: T,
    pub times: Vec<T>,
    /// `|A_δ(t)|` at each snapshot.
    pub measures: Vec<T>,
    /// Largest `δ` whose level set is empty over the trailing window: the
    /// floating-point predecessor of `1 − sup ‖φ‖_∞`, so `A_{δ★}` itself is
    /// empty (the level set is closed).
    pub delta_star: Option<T>,
    /// Earliest snapshot time from which `‖φ‖_∞ ≤ 1 − δ★` holds throughout.
    pub t_star: Option<T>,
}

/// `|A_δ| = Σ_{|φ_i| ≥ 1−δ} |cell|`.
pub fn level_set_measure<T: Real>(phi: &Field<T>, delta: T) -> T {
    let level = T::one() - delta;
    let count = phi.values().iter().filter(|v| v.abs() >= level).count();
    T::from_count(count) * phi.grid().cell_volume()
}

/// Largest `d` with `1 − d > sup`, or `None` if there is none in `(0, 1]`.
fn open_margin<T: Real>(sup: T) -> Option<T> {
    let mut d = T::one() - sup - T::epsilon();
    while d > T::zero() && T::one() - d <= sup {
        d = d - T::epsilon();
    }
    (d > T::zero()).then_some(d)
}

/// Level-set series over all snapshots; `(T★, δ★)` are computed from the
/// snapshots with `t ≥ t_end − window·(t_end − t_start)`.
pub fn level_set_series<T: Real>(snaps: &[Snapshot<T>], delta: T, window: T) -> Result<LevelSetReport<T>> {
    if snaps.len() < 2 {
        return Err(Error::InsufficientSnapshots { needed: 2, available: snaps.len() });
    }
    if !(delta > T::zero() && delta <= T::one()) {
        return Err(Error::InvalidSpec(format!("delta must lie in (0, 1], got {delta}")));
    }
    if !(window > T::zero() && window <= T::one()) {
        return Err(Error::InvalidSpec(format!("window fraction must lie in (0, 1], got {window}")));
    }
    let times: Vec<T> = snaps.iter().map(|s| s.t).collect();
    let measures = snaps.iter().map(|s| level_set_measure(&s.phi, delta)).collect();
    let sups: Vec<T> = snaps.iter().map(|s| s.phi.sup_norm()).collect();
    let (t_first, t_last) = (times[0], times[times.len() - 1]);
    let start = t_last - window * (t_last - t_first);
    let sup_tail = times.iter().zip(&sups).filter(|(&t, _)| t >= start).fold(T::zero(), |a, (_, &s)| a.max(s));
    let (delta_star, t_star) = if let Some(d) = open_margin(sup_tail) {
        // Walk back from the end while the bound still holds.
        let mut first = sups.len() - 1;
        while first > 0 && sups[first - 1] <= sup_tail {
            first -= 1;
        }
        (Some(d), Some(times[first]))
    } else {
        (None, None)
    };
    Ok(LevelSetReport { delta, times, measures, delta_star, t_star })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{BoundaryMode, Grid};

    fn snaps(fields: Vec<Field<f64>>) -> Vec<Snapshot<f64>> {
        fields.into_iter().enumerate().map(|(i, phi)| Snapshot { step: i, t: i as f64, phi }).collect()
    }

    #[test]
    fn constant_half() {
        let g = Grid::new_1d(10, 1.0, BoundaryMode::Neumann).unwrap();
        let rep = level_set_series(&snaps(vec![Field::constant(g, 0.5); 5]), 0.1, 0.5).unwrap();
        assert!(rep.measures.iter().all(|&m| m == 0.0));
        assert!(rep.delta_star.unwrap() >= 0.5 - 1e-15);
        assert_eq!(level_set_measure(&Field::constant(g, 0.5), rep.delta_star.unwrap()), 0.0);
        assert_eq!(rep.t_star, Some(0.0));
    }

    #[test]
    fn half_cells_near_pure() {
        let g = Grid::<f64>::new_1d(10, 2.0, BoundaryMode::Neumann).unwrap();
        let phi = Field::from_fn(g, |x| if x[0] < 1.0 { 0.99 } else { 0.0 });
        assert!((level_set_measure(&phi, 0.05) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn t_star_is_the_last_excursion() {
        let g = Grid::new_1d(4, 1.0, BoundaryMode::Neumann).unwrap();
        let vals = [0.2, 0.95, 0.6, 0.5, 0.55, 0.5];
        let rep = level_set_series(&snaps(vals.iter().map(|&v| Field::constant(g, v)).collect()), 0.1, 0.5).unwrap();
        assert!((rep.delta_star.unwrap() - 0.45).abs() < 1e-15);
        assert!(rep.delta_star.unwrap() < 0.45);
        assert_eq!(rep.t_star, Some(3.0));
    }
}
