//! Integrability from a tail inequality: if `(∫_s^∞ Z²)^α̃ ≤ ζ Z(s)²` on a
//! set `𝓜` with `α̃ ∈ (1, 2)`, then `Z ∈ L¹(𝓜)`.
//!
//! The check runs on samples: tails use the trapezoid rule on the recorded
//! window, so the right end of the window acts as infinity.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Relative slack on the hypothesis, absorbing quadrature error in the tail.
pub const HYPOTHESIS_SLACK: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntegrabilityReport<T> {
    pub alpha: T,
    pub zeta: T,
    /// `∫ Z²` over the whole window.
    pub y_total: T,
    pub holds: bool,
    /// First sample time in `𝓜` where the hypothesis fails.
    pub first_violation: Option<T>,
    /// `∫_𝓜 Z`, only when the hypothesis held everywhere on `𝓜`.
    pub integral: Option<T>,
    pub checked: usize,
}

fn validate<T: Real>(times: &[T], z: &[T], mask: &[bool]) -> Result<()> {
    if times.len() != z.len() {
        return Err(Error::LengthMismatch { expected: times.len(), actual: z.len() });
    }
    if mask.len() != z.len() {
        return Err(Error::LengthMismatch { expected: z.len(), actual: mask.len() });
    }
    if times.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidSpec("sample times must be strictly increasing".into()));
    }
    if let Some(i) = z.iter().position(|v| !(*v >= T::zero()) || !v.is_finite()) {
        return Err(Error::InvalidSpec(format!("Z must be finite and nonnegative (sample {i})")));
    }
    Ok(())
}

/// `tail[i] = ∫_{t_i}^{t_end} Z²` by the trapezoid rule.
pub fn right_tails<T: Real>(times: &[T], z: &[T]) -> Vec<T> {
    let n = z.len();
    let mut tail = vec![T::zero(); n];
    // Neumaier-compensated running sum from the right.
    let (mut s, mut comp) = (T::zero(), T::zero());
    for i in (0..n.saturating_sub(1)).rev() {
        let piece = T::lit(0.5) * (times[i + 1] - times[i]) * (z[i] * z[i] + z[i + 1] * z[i + 1]);
        let t = s + piece;
        comp = comp + if s.abs() >= piece.abs() { (s - t) + piece } else { (piece - t) + s };
        s = t;
        tail[i] = s + comp;
    }
    tail
}

/// `∫_𝓜 Z` over trapezoid intervals whose two endpoints both lie in `𝓜`.
pub fn masked_integral<T: Real>(times: &[T], z: &[T], mask: &[bool]) -> T {
    let pieces: Vec<T> = (1..z.len())
        .filter(|&i| mask[i - 1] && mask[i])
        .map(|i| T::lit(0.5) * (times[i] - times[i - 1]) * (z[i - 1] + z[i]))
        .collect();
    crate::field::compensated_sum(&pieces)
}

/// Smallest `ζ` for which the hypothesis holds on `𝓜`; infinite when some
/// sample has `Z = 0` but a positive tail.
pub fn minimal_zeta<T: Real>(times: &[T], z: &[T], alpha: T, mask: &[bool]) -> Result<T> {
    validate(times, z, mask)?;
    let tail = right_tails(times, z);
    Ok((0..z.len()).filter(|&i| mask[i]).fold(T::zero(), |acc, i| {
        let lhs = tail[i].powf(alpha);
        if lhs == T::zero() {
            acc
        } else {
            acc.max(lhs / (z[i] * z[i]))
        }
    }))
}

pub fn integrability_check<T: Real>(
    times: &[T],
    z: &[T],
    alpha: T,
    zeta: T,
    mask: &[bool],
) -> Result<IntegrabilityReport<T>> {
    validate(times, z, mask)?;
    if !(alpha > T::one() && alpha < T::lit(2.0)) {
        return Err(Error::InvalidSpec(format!("alpha_tilde must lie in (1, 2), got {alpha}")));
    }
    if !(zeta > T::zero()) {
        return Err(Error::InvalidSpec(format!("zeta must be positive, got {zeta}")));
    }
    let tail = right_tails(times, z);
    let slack = T::one() + T::lit(HYPOTHESIS_SLACK);
    let mut checked = 0;
    let mut first_violation = None;
    for i in (0..z.len()).filter(|&i| mask[i]) {
        checked += 1;
        if tail[i].powf(alpha) > zeta * z[i] * z[i] * slack {
            first_violation = Some(times[i]);
            break;
        }
    }
    let holds = first_violation.is_none();
    Ok(IntegrabilityReport {
        alpha,
        zeta,
        y_total: tail.first().copied().unwrap_or(T::zero()),
        holds,
        first_violation,
        integral: holds.then(|| masked_integral(times, z, mask)),
        checked,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn exponential_decay_is_integrable() {
        let n = 300_001;
        let times: Vec<f64> = (0..n).map(|i| 30.0 * i as f64 / (n - 1) as f64).collect();
        let z: Vec<f64> = times.iter().map(|t| (-t).exp()).collect();
        let rep = integrability_check(&times, &z, 1.5, 2f64.powf(-1.5), &vec![true; n]).unwrap();
        assert!(rep.holds, "{:?}", rep.first_violation);
        assert!((rep.integral.unwrap() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn harmonic_decay_violates() {
        // Geometric sampling out to t = 1e6.
        let n = 4000;
        let times: Vec<f64> = (0..n).map(|i| (1e6f64).powf(i as f64 / (n - 1) as f64) - 1.0).collect();
        let z: Vec<f64> = times.iter().map(|t| 1.0 / (1.0 + t)).collect();
        for zeta in [0.5, 1.0, 2.0, 10.0] {
            let rep = integrability_check(&times, &z, 1.5, zeta, &vec![true; n]).unwrap();
            assert!(!rep.holds, "zeta {zeta}");
            assert!(rep.integral.is_none());
            // Untruncated, the violation sets in once (1 + s)^{1/2} > ζ.
            let s = rep.first_violation.unwrap();
            assert!((1.0 + s).sqrt() > zeta * 0.99, "zeta {zeta}: s {s}");
        }
    }

    #[test]
    fn zero_trace() {
        let times: Vec<f64> = (0..10).map(f64::from).collect();
        let rep = integrability_check(&times, &[0.0; 10], 1.5, 1.0, &[true; 10]).unwrap();
        assert!(rep.holds);
        assert_eq!(rep.integral, Some(0.0));
    }

    proptest! {
        #[test]
        fn compact_support_passes_with_minimal_zeta(
            a in 0.5f64..3.0,
            len in 0.5f64..4.0,
            height in 0.1f64..5.0,
            alpha in 1.05f64..1.95,
        ) {
            let n = 2001;
            let end = a + len + 2.0;
            let times: Vec<f64> = (0..n).map(|i| end * i as f64 / (n - 1) as f64).collect();
            let bump = |t: f64| {
                let u = (t - a) / len;
                if (0.0..1.0).contains(&u) { height * (std::f64::consts::PI * u).sin().powi(2) } else { 0.0 }
            };
            let z: Vec<f64> = times.iter().map(|&t| bump(t)).collect();
            let mask: Vec<bool> = z.iter().map(|&v| v > 0.0).collect();
            let zeta = minimal_zeta(&times, &z, alpha, &mask).unwrap();
            prop_assert!(zeta.is_finite() && zeta > 0.0);
            let rep = integrability_check(&times, &z, alpha, zeta, &mask).unwrap();
            prop_assert!(rep.holds);
            // Independent trapezoid over the support.
            let mut exact = 0.0;
            for i in 1..n {
                if z[i - 1] > 0.0 && z[i] > 0.0 {
                    exact += 0.5 * (times[i] - times[i - 1]) * (z[i - 1] + z[i]);
                }
            }
            prop_assert!((rep.integral.unwrap() - exact).abs() <= 1e-12 * exact.max(1.0));
            // And the continuous integral of the bump, height·len/2.
            prop_assert!((exact - height * len / 2.0).abs() <= 1e-4 * height * len);
        }
    }
}
