//! De Giorgi truncation levels and the geometric-decay lemma for
//! `y_{n+1} ≤ C bⁿ y_n^{1+ε}`.

use serde::{Deserialize, Serialize};

use crate::dynamics::Snapshot;
use crate::error::{Error, Result};
use crate::scalar::Real;

fn check_params<T: Real>(c: T, b: T, eps: T) -> Result<()> {
    if !(c > T::zero() && b > T::one() && eps > T::zero()) || !(c.is_finite() && b.is_finite() && eps.is_finite()) {
        return Err(Error::InvalidSpec(format!("need C > 0, b > 1, eps > 0 (got {c}, {b}, {eps})")));
    }
    Ok(())
}

/// `θ = C^{−1/ε} b^{−1/ε²}`: the largest `y₀` for which the lemma applies.
pub fn degiorgi_threshold<T: Real>(c: T, b: T, eps: T) -> Result<T> {
    check_params(c, b, eps)?;
    // In log form to keep small eps from overflowing intermediate powers.
    Ok((-(c.ln()) / eps - b.ln() / (eps * eps)).exp())
}

/// The bound `θ b^{−n/ε}` on `y_n`, valid when `y₀ ≤ θ`.
pub fn degiorgi_predict<T: Real>(y0: T, c: T, b: T, eps: T, n: u32) -> Result<T> {
    let theta = degiorgi_threshold(c, b, eps)?;
    if !(y0 <= theta) {
        return Err(Error::ConditionNotMet { y0: y0.as_f64(), threshold: theta.as_f64() });
    }
    Ok(theta * (-(T::lit(f64::from(n))) * b.ln() / eps).exp())
}

/// Which tail is truncated: `(φ − k)⁺` or `(−φ − k)⁺`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Positive,
    Negative,
}

impl Side {
    fn sign<T: Real>(self) -> T {
        match self {
            Side::Positive => T::one(),
            Side::Negative => -T::one(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeGiorgiIterates<T> {
    pub delta: T,
    pub tau: T,
    pub t_final: T,
    pub side: Side,
    /// `k_n = 1 − δ − δ/2ⁿ`, `n = 0..=n_max`.
    pub k: Vec<T>,
    /// `t_{n−1}` for `n = 0..=n_max + 1`; the first entry is `T − 3τ`.
    pub t: Vec<T>,
    /// `y_n = ∫_{t_{n−1}}^{T} |{x : ±φ ≥ k_n}| dt`.
    pub y: Vec<T>,
}

impl<T: Real> DeGiorgiIterates<T> {
    /// `y_{n_max} = 0`: at snapshot resolution `±φ ≤ 1 − δ` on `[T − τ, T]`.
    pub fn certified(&self) -> bool {
        self.y.last().is_some_and(|&y| y == T::zero())
    }

    /// `I_n = [t_{n−1}, T]`.
    pub fn interval(&self, n: usize) -> (T, T) {
        (self.t[n], self.t_final)
    }
}

/// The levels `k_n` and times `t_{n−1}` for `n = 0..=n_max` (times run one further).
pub fn degiorgi_sequences<T: Real>(delta: T, tau: T, t_final: T, n_max: usize) -> (Vec<T>, Vec<T>) {
    let two = T::lit(2.0);
    let mut k = Vec::with_capacity(n_max + 1);
    let mut t = Vec::with_capacity(n_max + 2);
    let mut p = T::one();
    let mut tn = t_final - T::lit(3.0) * tau;
    t.push(tn);
    for _ in 0..=n_max {
        k.push(T::one() - delta - delta * p);
        tn = tn + tau * p;
        t.push(tn);
        p = p / two;
    }
    (k, t)
}

/// Computes `y_n` from stored snapshots. Snapshot `j` stands for the interval
/// `(s_{j−1}, s_j]`, so the first snapshot must be at or before `T − 3τ` and
/// the last at or after `T`.
pub fn degiorgi_from_snapshots<T: Real>(
    snaps: &[Snapshot<T>],
    delta: T,
    tau: T,
    t_final: T,
    n_max: usize,
    side: Side,
) -> Result<DeGiorgiIterates<T>> {
    if !(delta > T::zero() && delta < T::lit(0.5)) {
        return Err(Error::InvalidSpec(format!("delta must lie in (0, 1/2), got {delta}")));
    }
    if !(tau > T::zero()) {
        return Err(Error::InvalidSpec("tau must be positive".into()));
    }
    let start = t_final - T::lit(3.0) * tau;
    if !(start >= T::zero()) {
        return Err(Error::WindowOutOfRange(format!("T - 3 tau = {start} is negative")));
    }
    if snaps.len() < 2 {
        return Err(Error::InsufficientSnapshots { needed: 2, available: snaps.len() });
    }
    let (first, last) = (snaps[0].t, snaps[snaps.len() - 1].t);
    if start < first || t_final > last {
        return Err(Error::WindowOutOfRange(format!(
            "[{start}, {t_final}] is not covered by snapshots on [{first}, {last}]"
        )));
    }
    let (k, t) = degiorgi_sequences(delta, tau, t_final, n_max);
    let sign: T = side.sign();
    let vol = snaps[0].phi.grid().cell_volume();
    let y = k
        .iter()
        .enumerate()
        .map(|(n, &kn)| {
            let a = t[n];
            let terms: Vec<T> = snaps
                .windows(2)
                .filter_map(|w| {
                    let len = w[1].t.min(t_final) - w[0].t.max(a);
                    (len > T::zero()).then(|| {
                        let count = w[1].phi.values().iter().filter(|&&v| sign * v >= kn).count();
                        T::from_count(count) * vol * len
                    })
                })
                .collect();
            crate::field::compensated_sum(&terms)
        })
        .collect();
    Ok(DeGiorgiIterates { delta, tau, t_final, side, k, t, y })
}
