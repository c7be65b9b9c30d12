//! Constitutive functions, model constants and the discrete energy.

pub mod coefficients;
pub mod functional;
pub mod kernel_spec;
pub mod model;
pub mod potential;

pub use coefficients::{DiffusionSpec, MobilitySpec, Profile};
pub use functional::{chemical_potential, dissipation_rate, energy, DiscreteModel};
pub use kernel_spec::{KernelKind, KernelSpec};
pub use model::{DissipationNorm, ModelConfig, Preset, PresetTable};
pub use potential::{eval_potential, PotentialFn, PotentialKind, PotentialSpec};
