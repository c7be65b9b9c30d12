//! Singular double-well potentials `F` and the full density `f = F − θ₀s²/2`.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// User-supplied convex part `F` with its first two derivatives on `(−1, 1)`.
pub trait PotentialFn<T>: Send + Sync {
    fn value(&self, s: T) -> T;
    fn d1(&self, s: T) -> T;
    fn d2(&self, s: T) -> T;
}

#[derive(Clone)]
pub enum PotentialKind<T> {
    /// Flory–Huggins: `θ/2 ((1+s)ln(1+s) + (1−s)ln(1−s))`.
    Logarithmic,
    Custom(Arc<dyn PotentialFn<T>>),
}

impl<T> fmt::Debug for PotentialKind<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PotentialKind::Logarithmic => f.write_str("Logarithmic"),
            PotentialKind::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

/// Convex singular part `F` plus the quench temperature `θ₀` of the concave part.
#[derive(Clone, Debug)]
pub struct PotentialSpec<T> {
    pub theta: T,
    pub theta0: T,
    pub kind: PotentialKind<T>,
    /// Smallest admitted distance to `±1` for derivative evaluations.
    pub guard: T,
}

impl<T: Real> PotentialSpec<T> {
    pub fn logarithmic(theta: T, theta0: T) -> Result<Self> {
        let spec = PotentialSpec { theta, theta0, kind: PotentialKind::Logarithmic, guard: T::lit(1e-14).max(T::default_guard()) };
        spec.validate()?;
        Ok(spec)
    }

    pub fn custom(theta: T, theta0: T, f: Arc<dyn PotentialFn<T>>) -> Result<Self> {
        let spec = PotentialSpec { theta, theta0, kind: PotentialKind::Custom(f), guard: T::default_guard() };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_guard(mut self, guard: T) -> Result<Self> {
        if !(guard > T::zero() && guard < T::lit(0.5)) {
            return Err(Error::InvalidSpec(format!("guard must lie in (0, 0.5), got {guard}")));
        }
        self.guard = guard;
        Ok(self)
    }

    /// Largest admissible `|s|` for derivative evaluations.
    #[inline]
    pub fn bound(&self) -> T {
        T::one() - self.guard
    }

    /// `F`, `F′` or `F″` at `s`.
    pub fn eval(&self, s: T, order: u8) -> Result<T> {
        let limit = if order == 0 { T::one() } else { self.bound() };
        if !(s.abs() <= limit) {
            return Err(Error::Domain { value: s.as_f64(), order });
        }
        Ok(match order {
            0 => self.f(s),
            1 => self.df(s),
            2 => self.d2f(s),
            _ => return Err(Error::InvalidSpec(format!("potential derivative of order {order} is not available"))),
        })
    }

    /// `F(s)` without domain checks; `|s| ≤ 1` is the caller's responsibility.
    #[inline]
    pub fn f(&self, s: T) -> T {
        match &self.kind {
            PotentialKind::Logarithmic => {
                let half = T::lit(0.5);
                let xlog = |x: T, l: T| if x == T::zero() { T::zero() } else { x * l };
                self.theta * half * (xlog(T::one() + s, s.ln_1p()) + xlog(T::one() - s, (-s).ln_1p()))
            }
            PotentialKind::Custom(p) => p.value(s),
        }
    }

    #[inline]
    pub fn df(&self, s: T) -> T {
        match &self.kind {
            PotentialKind::Logarithmic => self.theta * T::lit(0.5) * (s.ln_1p() - (-s).ln_1p()),
            PotentialKind::Custom(p) => p.d1(s),
        }
    }

    #[inline]
    pub fn d2f(&self, s: T) -> T {
        match &self.kind {
            PotentialKind::Logarithmic => self.theta / ((T::one() - s) * (T::one() + s)),
            PotentialKind::Custom(p) => p.d2(s),
        }
    }

    /// Full density `f(s) = F(s) − θ₀s²/2` (the concave part always carries θ₀).
    pub fn density(&self, s: T, sigma1: T) -> T {
        self.f(s) - sigma1 * self.theta0 * s * s * T::lit(0.5)
    }

    /// `min_{|s|≤1} (F(s) − σ₁θ₀s²/2)`, located by sampling and refined by
    /// Newton on `F′(s) = σ₁θ₀s`.
    pub fn density_minimum(&self, sigma1: T) -> T {
        let samples = 4000;
        let mut best_s = T::zero();
        let mut best = self.density(T::zero(), sigma1);
        for i in 0..=samples {
            let s = T::lit(-1.0 + 2.0 * i as f64 / samples as f64);
            let v = self.density(s, sigma1);
            if v < best {
                best = v;
                best_s = s;
            }
        }
        let mut s = best_s.max(-self.bound()).min(self.bound());
        for _ in 0..50 {
            let g = self.df(s) - sigma1 * self.theta0 * s;
            let h = self.d2f(s) - sigma1 * self.theta0;
            if !(h > T::zero()) {
                break;
            }
            let next = (s - g / h).max(-self.bound()).min(self.bound());
            if (next - s).abs() <= T::epsilon() {
                s = next;
                break;
            }
            s = next;
        }
        best.min(self.density(s, sigma1))
    }

    /// Checks `θ₀ > θ > 0`, `F(0) = F′(0) = 0`, `F″ ≥ θ` on a dense sample and
    /// blow-up of `F′` towards `±1`.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidSpec(m));
        if !(self.theta > T::zero()) || !self.theta.is_finite() {
            return bad(format!("theta must be positive, got {}", self.theta));
        }
        if !(self.theta0 > self.theta) || !self.theta0.is_finite() {
            return bad(format!("theta0 must exceed theta, got theta0 = {} and theta = {}", self.theta0, self.theta));
        }
        let tiny = T::lit(1e-12).max(T::epsilon() * T::lit(16.0));
        if self.f(T::zero()).abs() > tiny || self.df(T::zero()).abs() > tiny {
            return bad("potential must satisfy F(0) = 0 and F'(0) = 0".into());
        }
        let n = 2000;
        for i in 1..n {
            let s = T::lit(-1.0 + 2.0 * i as f64 / n as f64);
            let d2 = self.d2f(s);
            if !(d2 >= self.theta * (T::one() - tiny)) {
                return bad(format!("F''({s}) = {d2} is below theta = {}", self.theta));
            }
        }
        let near = T::one() - T::lit(1e-12).max(self.guard);
        let ladder = [T::lit(0.9), T::lit(0.999), T::lit(0.99999), near];
        for sign in [T::one(), -T::one()] {
            let vals: Vec<T> = ladder.iter().map(|&s| sign * self.df(sign * s)).collect();
            if vals.windows(2).any(|w| !(w[1] > w[0])) || !(vals[3] > T::lit(10.0) * self.theta) {
                return bad("F' must diverge towards the pure phases".into());
            }
        }
        Ok(())
    }
}

/// `F`, `F′` or `F″` of a potential at a point.
pub fn eval_potential<T: Real>(p: &PotentialSpec<T>, s: T, order: u8) -> Result<T> {
    p.eval(s, order)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn logarithmic_values() {
        let p = PotentialSpec::<f64>::logarithmic(1.0, 2.0).unwrap();
        assert_eq!(p.eval(0.0, 0).unwrap(), 0.0);
        assert!((p.eval(0.5, 1).unwrap() - 0.5 * 3f64.ln()).abs() < 1e-15);
        assert_eq!(p.eval(0.0, 2).unwrap(), 1.0);
        let p2 = PotentialSpec::<f64>::logarithmic(2.0, 3.0).unwrap();
        assert!((p2.eval(1.0, 0).unwrap() - 2.0 * 2f64.ln()).abs() < 1e-15);
        assert!((p2.eval(-1.0, 0).unwrap() - 2.0 * 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn domain_errors() {
        let p = PotentialSpec::<f64>::logarithmic(1.0, 2.0).unwrap();
        assert!(matches!(p.eval(1.0, 1), Err(Error::Domain { order: 1, .. })));
        assert!(matches!(p.eval(1.0 + 1e-9, 0), Err(Error::Domain { order: 0, .. })));
        assert!(p.eval(f64::NAN, 0).is_err());
        assert!(p.eval(0.3, 3).is_err());
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let p = PotentialSpec::<f64>::logarithmic(0.7, 1.0).unwrap();
        for &s in &[-0.95, -0.3, 0.0, 0.41, 0.99] {
            let h = 1e-6;
            let d1 = (p.f(s + h) - p.f(s - h)) / (2.0 * h);
            let d2 = (p.df(s + h) - p.df(s - h)) / (2.0 * h);
            assert!((d1 - p.df(s)).abs() < 1e-7 * (1.0 + d1.abs()));
            assert!((d2 - p.d2f(s)).abs() < 1e-5 * (1.0 + d2.abs()));
        }
    }

    #[test]
    fn validation_rejects_bad_constants() {
        assert!(PotentialSpec::<f64>::logarithmic(1.0, 0.5).is_err());
        assert!(PotentialSpec::<f64>::logarithmic(-1.0, 0.5).is_err());
        struct Quadratic;
        impl PotentialFn<f64> for Quadratic {
            fn value(&self, s: f64) -> f64 {
                s * s
            }
            fn d1(&self, s: f64) -> f64 {
                2.0 * s
            }
            fn d2(&self, _: f64) -> f64 {
                2.0
            }
        }
        let err = PotentialSpec::custom(1.0, 2.0, Arc::new(Quadratic)).unwrap_err();
        assert!(err.to_string().contains("diverge"));
    }

    #[test]
    fn density_minimum_is_the_deep_well() {
        let p = PotentialSpec::<f64>::logarithmic(0.3, 1.0).unwrap();
        let m = p.density_minimum(1.0);
        // Bulk value s* solves F'(s) = θ₀ s; check f(s*) matches and nothing lower is sampled.
        let (mut lo, mut hi) = (0.5, 1.0 - 1e-15);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if p.df(mid) - mid > 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let s = 0.5 * (lo + hi);
        assert!((m - p.density(s, 1.0)).abs() < 1e-14, "{m} vs {} at {s}", p.density(s, 1.0));
        assert!((-1000..=1000).all(|i| p.density(i as f64 / 1000.0, 1.0) >= m));
    }
}
