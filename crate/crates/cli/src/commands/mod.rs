pub mod analyze;
pub mod equilibrium;
pub mod lemmas;
pub mod run_dir;
pub mod simulate;
pub mod sweep;

pub use analyze::{analyze, AnalyzeOverrides};
pub use equilibrium::equilibrium;
pub use simulate::simulate;
pub use sweep::{sweep, Axis};
