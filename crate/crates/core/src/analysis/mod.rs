//! Long-time analysis of recorded trajectories and synthetic traces.

pub mod degiorgi;
pub mod good_times;
pub mod integrability;
pub mod level_sets;
pub mod lojasiewicz;
pub mod omega;
pub mod report;

pub use degiorgi::{degiorgi_from_snapshots, degiorgi_predict, degiorgi_threshold, DeGiorgiIterates, Side};
pub use good_times::{classify_good_times, classify_series, classify_unchecked, GoodTimeSet};
pub use integrability::{integrability_check, minimal_zeta, IntegrabilityReport};
pub use level_sets::{level_set_measure, level_set_series, LevelSetReport};
pub use lojasiewicz::{lojasiewicz_fit_series, LojasiewiczFit, LojasiewiczOptions};
pub use omega::{nearest_equilibrium, omega_from_trajectory, omega_limit_estimate, NearestEquilibrium, OmegaLimitEstimate};
pub use report::{analyze, AnalysisConfig, AnalysisReport, LevelSetEntry};
