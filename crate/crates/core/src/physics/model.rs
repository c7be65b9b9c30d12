//! Model constants and the three named specialisations.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::FaceAverage;
use crate::physics::coefficients::{DiffusionSpec, MobilitySpec};
use crate::physics::kernel_spec::KernelSpec;
use crate::physics::potential::PotentialSpec;
use crate::scalar::Real;

/// The three specialisations of the general model.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Preset {
    /// Cahn–Hilliard with nonlinear diffusion: α>0, β=0, γ>0, σ₁=1, σ₂=0.
    ChNonlinear,
    /// Conserved Allen–Cahn: α=0, β>0, γ>0, σ₁=1, σ₂=0, a≡1.
    ConservedAc,
    /// Nonlocal Cahn–Hilliard: α>0, β=γ=σ₁=0, σ₂=1, a≡1.
    NonlocalCh,
}

/// Sign pattern of a preset: which of α, β, γ must be positive (true) or
/// zero (false), and the switches σ₁, σ₂.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PresetTable {
    pub alpha_positive: bool,
    pub beta_positive: bool,
    pub gamma_positive: bool,
    pub sigma1: u8,
    pub sigma2: u8,
    pub unit_diffusion: bool,
}

impl Preset {
    pub const ALL: [Preset; 3] = [Preset::ChNonlinear, Preset::ConservedAc, Preset::NonlocalCh];

    pub fn table(self) -> PresetTable {
        match self {
            Preset::ChNonlinear => PresetTable {
                alpha_positive: true,
                beta_positive: false,
                gamma_positive: true,
                sigma1: 1,
                sigma2: 0,
                unit_diffusion: false,
            },
            Preset::ConservedAc => PresetTable {
                alpha_positive: false,
                beta_positive: true,
                gamma_positive: true,
                sigma1: 1,
                sigma2: 0,
                unit_diffusion: true,
            },
            Preset::NonlocalCh => PresetTable {
                alpha_positive: true,
                beta_positive: false,
                gamma_positive: false,
                sigma1: 0,
                sigma2: 1,
                unit_diffusion: true,
            },
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Preset::ChNonlinear => "CH_NONLINEAR",
            Preset::ConservedAc => "CONSERVED_AC",
            Preset::NonlocalCh => "NONLOCAL_CH",
        }
    }
}

impl std::str::FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().replace('-', "_").as_str() {
            "CH_NONLINEAR" => Ok(Preset::ChNonlinear),
            "CONSERVED_AC" => Ok(Preset::ConservedAc),
            "NONLOCAL_CH" => Ok(Preset::NonlocalCh),
            other => Err(Error::Parse(format!("unknown preset `{other}`"))),
        }
    }
}

/// Which norm of the chemical potential measures dissipation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DissipationNorm {
    /// `‖∇μ‖_{L²}` (Cahn–Hilliard type, α > 0).
    Gradient,
    /// `‖μ − μ̄‖_{L²}` (Allen–Cahn type, α = 0).
    Fluctuation,
}

/// Constants and constitutive functions of the general model
/// `∂φ/∂t = α div(m∇μ) − β(μ − μ̄)`,
/// `μ = −γ div(a∇φ) + γ a′|∇φ|²/2 + F′(φ) − σ₁θ₀φ − σ₂ J∗φ`.
#[derive(Clone, Debug)]
pub struct ModelConfig<T> {
    pub alpha: T,
    pub beta: T,
    pub gamma: T,
    pub sigma1: T,
    pub sigma2: T,
    pub potential: PotentialSpec<T>,
    pub mobility: MobilitySpec<T>,
    pub diffusion: DiffusionSpec<T>,
    pub kernel: Option<KernelSpec<T>>,
    /// Use the exact first variation `F′ + (J∗1)φ − J∗φ` of the nonlocal
    /// energy instead of the literal `F′ − J∗φ`.
    pub nonlocal_consistency: bool,
    pub mobility_average: FaceAverage,
}

impl<T: Real> ModelConfig<T> {
    pub fn ch_nonlinear(
        alpha: T,
        gamma: T,
        potential: PotentialSpec<T>,
        mobility: MobilitySpec<T>,
        diffusion: DiffusionSpec<T>,
    ) -> Result<Self> {
        let m = ModelConfig {
            alpha,
            beta: T::zero(),
            gamma,
            sigma1: T::one(),
            sigma2: T::zero(),
            potential,
            mobility,
            diffusion,
            kernel: None,
            nonlocal_consistency: true,
            mobility_average: FaceAverage::Arithmetic,
        };
        m.validate_preset(Preset::ChNonlinear)?;
        Ok(m)
    }

    pub fn conserved_ac(beta: T, gamma: T, potential: PotentialSpec<T>) -> Result<Self> {
        let m = ModelConfig {
            alpha: T::zero(),
            beta,
            gamma,
            sigma1: T::one(),
            sigma2: T::zero(),
            potential,
            mobility: MobilitySpec::constant(T::one())?,
            diffusion: DiffusionSpec::constant(T::one())?,
            kernel: None,
            nonlocal_consistency: true,
            mobility_average: FaceAverage::Arithmetic,
        };
        m.validate_preset(Preset::ConservedAc)?;
        Ok(m)
    }

    pub fn nonlocal_ch(
        alpha: T,
        potential: PotentialSpec<T>,
        mobility: MobilitySpec<T>,
        kernel: KernelSpec<T>,
        nonlocal_consistency: bool,
    ) -> Result<Self> {
        let m = ModelConfig {
            alpha,
            beta: T::zero(),
            gamma: T::zero(),
            sigma1: T::zero(),
            sigma2: T::one(),
            potential,
            mobility,
            diffusion: DiffusionSpec::constant(T::one())?,
            kernel: Some(kernel),
            nonlocal_consistency,
            mobility_average: FaceAverage::Arithmetic,
        };
        m.validate_preset(Preset::NonlocalCh)?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidSpec(m));
        for (name, v) in [("alpha", self.alpha), ("beta", self.beta), ("gamma", self.gamma)] {
            if !(v >= T::zero()) || !v.is_finite() {
                return bad(format!("{name} must be a nonnegative number, got {v}"));
            }
        }
        if !(self.alpha > T::zero() || self.beta > T::zero()) {
            return bad("at least one of alpha and beta must be positive".into());
        }
        for (name, v) in [("sigma1", self.sigma1), ("sigma2", self.sigma2)] {
            if v != T::zero() && v != T::one() {
                return bad(format!("{name} must be 0 or 1, got {v}"));
            }
        }
        if (self.sigma2 == T::one()) != self.kernel.is_some() {
            return bad("a kernel is required exactly when sigma2 = 1".into());
        }
        self.potential.validate()?;
        self.mobility.validate()?;
        self.diffusion.validate()
    }

    /// Validates and additionally checks the sign pattern of `preset`.
    pub fn validate_preset(&self, preset: Preset) -> Result<()> {
        self.validate()?;
        if self.preset() != Some(preset) {
            return Err(Error::InvalidSpec(format!("constants do not match the {} preset", preset.name())));
        }
        Ok(())
    }

    /// The preset whose sign pattern these constants follow, if any.
    pub fn preset(&self) -> Option<Preset> {
        Preset::ALL.into_iter().find(|p| {
            let t = p.table();
            (self.alpha > T::zero()) == t.alpha_positive
                && (self.beta > T::zero()) == t.beta_positive
                && (self.gamma > T::zero()) == t.gamma_positive
                && self.sigma1 == T::from_count(t.sigma1 as usize)
                && self.sigma2 == T::from_count(t.sigma2 as usize)
                && (!t.unit_diffusion || (self.diffusion.profile.is_constant() && self.diffusion.a(T::zero()) == T::one()))
        })
    }

    /// Norm used for good times and steady-state detection.
    pub fn dissipation_norm(&self) -> DissipationNorm {
        if self.alpha > T::zero() {
            DissipationNorm::Gradient
        } else {
            DissipationNorm::Fluctuation
        }
    }

    /// Coefficient `c` in `dissipation ≥ c·‖·‖²` for the chosen norm.
    pub fn dissipation_coefficient(&self) -> T {
        match self.dissipation_norm() {
            DissipationNorm::Gradient => self.alpha * self.mobility.m_star,
            DissipationNorm::Fluctuation => self.beta,
        }
    }

    pub fn is_nonlocal(&self) -> bool {
        self.sigma2 > T::zero()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pot() -> PotentialSpec<f64> {
        PotentialSpec::logarithmic(0.3, 1.0).unwrap()
    }

    #[test]
    fn preset_tables_match_case_headers() {
        let ch = Preset::ChNonlinear.table();
        assert!(ch.alpha_positive && !ch.beta_positive && ch.gamma_positive && ch.sigma1 == 1 && ch.sigma2 == 0);
        let ac = Preset::ConservedAc.table();
        assert!(!ac.alpha_positive && ac.beta_positive && ac.gamma_positive && ac.sigma1 == 1 && ac.sigma2 == 0);
        let nl = Preset::NonlocalCh.table();
        assert!(nl.alpha_positive && !nl.beta_positive && !nl.gamma_positive && nl.sigma1 == 0 && nl.sigma2 == 1);
    }

    #[test]
    fn constructors_produce_their_presets() {
        let m = MobilitySpec::constant(1.0).unwrap();
        let a = DiffusionSpec::constant(1.0).unwrap();
        let ch = ModelConfig::ch_nonlinear(1.0, 0.01, pot(), m.clone(), a).unwrap();
        assert_eq!(ch.preset(), Some(Preset::ChNonlinear));
        let ac = ModelConfig::conserved_ac(1.0, 0.01, pot()).unwrap();
        assert_eq!(ac.preset(), Some(Preset::ConservedAc));
        assert_eq!(ac.dissipation_norm(), DissipationNorm::Fluctuation);
        let nl = ModelConfig::nonlocal_ch(1.0, pot(), m, KernelSpec::gaussian(1.0, 0.1).unwrap(), true).unwrap();
        assert_eq!(nl.preset(), Some(Preset::NonlocalCh));
        assert_eq!("nonlocal-ch".parse::<Preset>().unwrap(), Preset::NonlocalCh);
    }

    #[test]
    fn invalid_constants() {
        let mut ac = ModelConfig::conserved_ac(1.0, 0.01, pot()).unwrap();
        ac.beta = 0.0;
        assert!(ac.validate().is_err());
        ac.beta = 1.0;
        ac.sigma2 = 1.0;
        assert!(ac.validate().is_err());
        ac.sigma2 = 0.5;
        assert!(ac.validate().is_err());
    }
}
