//! Simulation and verification of phase-field gradient flows with a singular
//! (Flory–Huggins) potential.
//!
//! The crate covers three models on uniform 1D/2D grids: Cahn–Hilliard with
//! nonlinear diffusion, conserved Allen–Cahn and nonlocal Cahn–Hilliard. It
//! provides an energy-stable, mass-conserving time stepper, a bordered Newton
//! solver for equilibria, and the analysis tools used to check long-time
//! behaviour on recorded trajectories (good times, level sets, De Giorgi
//! truncations, Łojasiewicz fits, ω-limit estimates).
//!
//! Everything numerical is generic over [`Real`] (`f32` or `f64`); the
//! aliases at the bottom of this module fix `f64`.

pub mod analysis;
pub mod dynamics;
pub mod error;
pub mod field;
pub mod grid;
pub mod io;
pub mod kernel;
pub mod linalg;
pub mod physics;
pub mod poisson;
pub mod scalar;
pub mod stationary;

pub use error::{Error, Result};
pub use field::{gradient, inner, norm_h1_semi, norm_l2, weighted_div_grad, FaceAverage, FaceField, Field};
pub use grid::{BoundaryMode, Grid};
pub use kernel::{convolve, FftConvolver, KernelMatrix};
pub use physics::{
    chemical_potential, dissipation_rate, energy, DiffusionSpec, DiscreteModel, KernelSpec, MobilitySpec, ModelConfig,
    PotentialSpec, Preset,
};
pub use poisson::norm_hminus1;
pub use scalar::Real;

pub type Grid64 = Grid<f64>;
pub type Field64 = Field<f64>;
pub type FaceField64 = FaceField<f64>;
pub type ModelConfig64 = ModelConfig<f64>;
pub type DiscreteModel64 = DiscreteModel<f64>;
pub type Trajectory64 = dynamics::Trajectory<f64>;
pub type EquilibriumState64 = stationary::EquilibriumState<f64>;

