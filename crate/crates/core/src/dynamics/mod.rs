//! Time integration of the general evolution equation.

pub mod run;
pub mod stepper;
pub mod trajectory;

pub use run::{run, run_with};
pub use stepper::{State, StepOutcome, StepStats, Stepper, StepperConfig};
pub use trajectory::{Diagnostics, EnergyBounds, Provenance, RunStats, RunStatus, Snapshot, Trajectory};
