//! Empirical Łojasiewicz exponent from the late-time energy gap.
//!
//! Along a converging trajectory `(E − E∞)^{1−ϑ} ≤ C‖∇μ‖`. Regressing
//! `log(E − E∞)` on `log‖∇μ‖` gives slope `1/(1 − ϑ)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

pub const MIN_SAMPLES: usize = 10;

#[derive(Clone, Debug)]
pub struct LojasiewiczOptions<T> {
    /// Trailing fraction of the time span used for the fit.
    pub window: T,
    /// Limit energy; `None` uses the mean of the trailing `plateau` fraction
    /// of samples.
    pub e_inf: Option<T>,
    pub plateau: T,
    /// Gaps at or below this are treated as converged and skipped.
    pub min_gap: T,
}

impl<T: Real> Default for LojasiewiczOptions<T> {
    fn default() -> Self {
        LojasiewiczOptions { window: T::lit(0.5), e_inf: None, plateau: T::lit(0.05), min_gap: T::lit(1e-12) }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LojasiewiczFit<T> {
    /// `1 − 1/slope`, clipped to `(0, 1/2]`.
    pub theta: T,
    /// Unclipped value.
    pub theta_raw: T,
    /// Smallest `C` with `gap^{1−ϑ} ≤ C·norm` on the used samples.
    pub c: T,
    pub slope: T,
    /// Coefficient of determination of the log-log fit.
    pub r2: T,
    /// Coefficient of determination of `log gap` against `t`.
    pub semilog_r2: T,
    /// `−d log(gap)/dt` from the semilog fit.
    pub decay_rate: T,
    pub e_inf: T,
    pub window: (T, T),
    pub samples: usize,
}

/// Least squares `y ≈ a + b x`; returns `(b, a, r²)`.
pub fn linear_fit<T: Real>(x: &[T], y: &[T]) -> (T, T, T) {
    let n = T::from_count(x.len());
    let mx = x.iter().copied().sum::<T>() / n;
    let my = y.iter().copied().sum::<T>() / n;
    let (mut sxx, mut sxy, mut syy) = (T::zero(), T::zero(), T::zero());
    for (&a, &b) in x.iter().zip(y) {
        sxx = sxx + (a - mx) * (a - mx);
        sxy = sxy + (a - mx) * (b - my);
        syy = syy + (b - my) * (b - my);
    }
    let slope = sxy / sxx;
    let r2 = if syy == T::zero() { T::one() } else { sxy * sxy / (sxx * syy) };
    (slope, my - slope * mx, r2)
}

/// Fits on sampled series. `mask` restricts to good times.
pub fn lojasiewicz_fit_series<T: Real>(
    times: &[T],
    energies: &[T],
    norms: &[T],
    mask: Option<&[bool]>,
    opts: &LojasiewiczOptions<T>,
) -> Result<LojasiewiczFit<T>> {
    let n = times.len();
    if energies.len() != n || norms.len() != n || mask.is_some_and(|m| m.len() != n) {
        return Err(Error::LengthMismatch { expected: n, actual: energies.len().min(norms.len()) });
    }
    if n == 0 {
        return Err(Error::DegenerateWindow { usable: 0, needed: MIN_SAMPLES });
    }
    if !(opts.window > T::zero() && opts.window <= T::one()) {
        return Err(Error::InvalidSpec("fit window fraction must lie in (0, 1]".into()));
    }
    let e_inf = opts.e_inf.unwrap_or_else(|| {
        let tail = ((T::from_count(n) * opts.plateau).ceil().as_f64() as usize).clamp(1, n);
        let vals = &energies[n - tail..];
        crate::field::compensated_sum(vals) / T::from_count(tail)
    });
    let (t0, t1) = (times[0], times[n - 1]);
    let start = t1 - opts.window * (t1 - t0);
    let used: Vec<usize> = (0..n)
        .filter(|&i| times[i] >= start)
        .filter(|&i| mask.is_none_or(|m| m[i]))
        .filter(|&i| energies[i] - e_inf > opts.min_gap && norms[i] > T::zero())
        .collect();
    if used.len() < MIN_SAMPLES {
        return Err(Error::DegenerateWindow { usable: used.len(), needed: MIN_SAMPLES });
    }
    let lg: Vec<T> = used.iter().map(|&i| (energies[i] - e_inf).ln()).collect();
    let ln: Vec<T> = used.iter().map(|&i| norms[i].ln()).collect();
    let ts: Vec<T> = used.iter().map(|&i| times[i]).collect();
    let (slope, _, r2) = linear_fit(&ln, &lg);
    let theta_raw = T::one() - T::one() / slope;
    let theta = theta_raw.max(T::epsilon()).min(T::lit(0.5));
    let c = used
        .iter()
        .map(|&i| (energies[i] - e_inf).powf(T::one() - theta) / norms[i])
        .fold(T::zero(), T::max);
    let (semi_slope, _, semilog_r2) = linear_fit(&ts, &lg);
    Ok(LojasiewiczFit {
        theta,
        theta_raw,
        c,
        slope,
        r2,
        semilog_r2,
        decay_rate: -semi_slope,
        e_inf,
        window: (ts[0], ts[ts.len() - 1]),
        samples: used.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(t0: f64, t1: f64, n: usize) -> Vec<f64> {
        (0..n).map(|i| t0 + (t1 - t0) * i as f64 / (n - 1) as f64).collect()
    }

    fn opts(e_inf: f64) -> LojasiewiczOptions<f64> {
        LojasiewiczOptions { e_inf: Some(e_inf), ..LojasiewiczOptions::default() }
    }

    #[test]
    fn exponential_pair_gives_one_half() {
        let t = grid(0.0, 10.0, 200);
        let lam = 1.3;
        let e: Vec<f64> = t.iter().map(|t| 2.0 + (-lam * t).exp()).collect();
        let m: Vec<f64> = t.iter().map(|t| (-lam * t / 2.0).exp()).collect();
        let fit = lojasiewicz_fit_series(&t, &e, &m, None, &opts(2.0)).unwrap();
        assert!((fit.theta - 0.5).abs() < 0.02);
        assert!((fit.decay_rate - lam).abs() < 1e-8);
        assert!(fit.r2 > 0.999);
    }

    #[test]
    fn algebraic_pair_gives_one_quarter() {
        let t = grid(1.0, 100.0, 400);
        let e: Vec<f64> = t.iter().map(|t| t.powi(-4)).collect();
        let m: Vec<f64> = t.iter().map(|t| t.powi(-3)).collect();
        let fit = lojasiewicz_fit_series(&t, &e, &m, None, &opts(0.0)).unwrap();
        assert!((fit.slope - 4.0 / 3.0).abs() < 1e-9);
        assert!((fit.theta - 0.25).abs() < 0.02);
        // C is attained: gap^{3/4} = norm exactly.
        assert!((fit.c - 1.0).abs() < 1e-9);
    }

    #[test]
    fn too_few_samples() {
        let t = grid(0.0, 1.0, 12);
        let e = vec![1.0; 12];
        let m = vec![1.0; 12];
        assert!(matches!(
            lojasiewicz_fit_series(&t, &e, &m, None, &opts(0.0)),
            Err(Error::DegenerateWindow { usable: 6, .. })
        ));
    }
}
