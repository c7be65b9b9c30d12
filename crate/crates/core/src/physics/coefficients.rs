//! Mobility `m(s)` and gradient-energy coefficient `a(s)`.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::scalar::Real;

pub type ScalarFn<T> = Arc<dyn Fn(T) -> T + Send + Sync>;

/// A coefficient profile on `[−1, 1]`.
#[derive(Clone)]
pub enum Profile<T> {
    Constant(T),
    /// `Σ c_k s^k`.
    Poly(Vec<T>),
    /// Value and first derivative; the second derivative is taken by central
    /// differences of the first.
    Custom { value: ScalarFn<T>, d1: ScalarFn<T> },
}

impl<T: fmt::Debug> fmt::Debug for Profile<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Profile::Constant(c) => write!(f, "Constant({c:?})"),
            Profile::Poly(c) => write!(f, "Poly({c:?})"),
            Profile::Custom { .. } => f.write_str("Custom(..)"),
        }
    }
}

impl<T: Real> Profile<T> {
    pub fn value(&self, s: T) -> T {
        match self {
            Profile::Constant(c) => *c,
            Profile::Poly(c) => c.iter().rev().fold(T::zero(), |acc, &k| acc * s + k),
            Profile::Custom { value, .. } => value(s),
        }
    }

    pub fn d1(&self, s: T) -> T {
        match self {
            Profile::Constant(_) => T::zero(),
            Profile::Poly(c) => c
                .iter()
                .enumerate()
                .skip(1)
                .rev()
                .fold(T::zero(), |acc, (k, &ck)| acc * s + T::from_count(k) * ck),
            Profile::Custom { d1, .. } => d1(s),
        }
    }

    pub fn d2(&self, s: T) -> T {
        match self {
            Profile::Constant(_) => T::zero(),
            Profile::Poly(c) => c
                .iter()
                .enumerate()
                .skip(2)
                .rev()
                .fold(T::zero(), |acc, (k, &ck)| acc * s + T::from_count(k * (k - 1)) * ck),
            Profile::Custom { d1, .. } => {
                let h = T::lit(1e-5);
                (d1(s + h) - d1(s - h)) / (h + h)
            }
        }
    }

    pub fn is_constant(&self) -> bool {
        match self {
            Profile::Constant(_) => true,
            Profile::Poly(c) => c.iter().skip(1).all(|&v| v == T::zero()),
            Profile::Custom { .. } => false,
        }
    }

    fn check_lower_bound(&self, lower: T, what: &str) -> Result<()> {
        if !(lower > T::zero()) || !lower.is_finite() {
            return Err(Error::InvalidSpec(format!("{what} lower bound must be positive, got {lower}")));
        }
        let n = 2000;
        for i in 0..=n {
            let s = T::lit(-1.0 + 2.0 * i as f64 / n as f64);
            let v = self.value(s);
            if !(v >= lower) || !v.is_finite() {
                return Err(Error::InvalidSpec(format!("{what}({s}) = {v} is below the declared bound {lower}")));
            }
        }
        Ok(())
    }
}

/// Non-degenerate mobility with `m(s) ≥ m_star > 0`.
#[derive(Clone, Debug)]
pub struct MobilitySpec<T> {
    pub profile: Profile<T>,
    pub m_star: T,
}

impl<T: Real> MobilitySpec<T> {
    pub fn constant(m: T) -> Result<Self> {
        Self::new(Profile::Constant(m), m)
    }

    pub fn new(profile: Profile<T>, m_star: T) -> Result<Self> {
        let spec = MobilitySpec { profile, m_star };
        spec.validate()?;
        Ok(spec)
    }

    #[inline]
    pub fn eval(&self, s: T) -> T {
        self.profile.value(s)
    }

    pub fn validate(&self) -> Result<()> {
        self.profile.check_lower_bound(self.m_star, "m")
    }
}

/// Gradient-energy coefficient with `a(s) ≥ a_star > 0`.
#[derive(Clone, Debug)]
pub struct DiffusionSpec<T> {
    pub profile: Profile<T>,
    pub a_star: T,
}

impl<T: Real> DiffusionSpec<T> {
    pub fn constant(a: T) -> Result<Self> {
        Self::new(Profile::Constant(a), a)
    }

    pub fn new(profile: Profile<T>, a_star: T) -> Result<Self> {
        let spec = DiffusionSpec { profile, a_star };
        spec.validate()?;
        Ok(spec)
    }

    #[inline]
    pub fn a(&self, s: T) -> T {
        self.profile.value(s)
    }

    #[inline]
    pub fn da(&self, s: T) -> T {
        self.profile.d1(s)
    }

    #[inline]
    pub fn d2a(&self, s: T) -> T {
        self.profile.d2(s)
    }

    /// `A(s) = ∫₀ˢ √a(t) dt` by composite Simpson.
    pub fn primitive_sqrt(&self, s: T) -> T {
        let n = 256;
        let h = s / T::from_count(n);
        let g = |t: T| self.a(t).sqrt();
        let mut acc = g(T::zero()) + g(s);
        for i in 1..n {
            let w = if i % 2 == 1 { T::lit(4.0) } else { T::lit(2.0) };
            acc = acc + w * g(h * T::from_count(i));
        }
        acc * h / T::lit(3.0)
    }

    /// Lower bound on a dense sample plus agreement of `a′` with central
    /// differences of `a`.
    pub fn validate(&self) -> Result<()> {
        self.profile.check_lower_bound(self.a_star, "a")?;
        let h = T::lit(1e-5);
        let n = 400;
        for i in 0..=n {
            let s = T::lit(-1.0 + 2.0 * i as f64 / n as f64);
            let fd = (self.a(s + h) - self.a(s - h)) / (h + h);
            let d = self.da(s);
            if (fd - d).abs() > T::lit(1e-6) * d.abs().max(T::one()) {
                return Err(Error::InvalidSpec(format!("a'({s}) = {d} disagrees with the difference quotient {fd}")));
            }
        }
        Ok(())
    }
}
