//! Recorded diagnostics and snapshots of a run.

use serde::{Deserialize, Serialize};

use crate::field::Field;
use crate::grid::Grid;
use crate::physics::model::DissipationNorm;
use crate::scalar::Real;

/// Per-sample diagnostics. Row 0 describes the initial datum; row `k ≥ 1`
/// describes the step `(t_{k−1}, t_k]` and uses the scheme's `μ⁺`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics<T> {
    pub t: T,
    pub mass: T,
    pub energy: T,
    pub dissipation: T,
    pub grad_mu_l2: T,
    pub mu_fluct_l2: T,
    pub phi_min: T,
    pub phi_max: T,
    pub sep_margin: T,
    pub dt: T,
    pub newton_iters: usize,
}

impl<T: Real> Diagnostics<T> {
    pub const CSV_HEADER: [&'static str; 11] = [
        "t",
        "mass",
        "energy",
        "dissipation",
        "grad_mu_l2",
        "mu_fluct_l2",
        "phi_min",
        "phi_max",
        "sep_margin",
        "dt",
        "newton_iters",
    ];

    pub fn to_record(&self) -> [String; 11] {
        let f = |v: T| format!("{:e}", v.as_f64());
        [
            f(self.t),
            f(self.mass),
            f(self.energy),
            f(self.dissipation),
            f(self.grad_mu_l2),
            f(self.mu_fluct_l2),
            f(self.phi_min),
            f(self.phi_max),
            f(self.sep_margin),
            f(self.dt),
            self.newton_iters.to_string(),
        ]
    }

    /// Parses a record written by [`Self::to_record`].
    pub fn from_record(rec: &[&str]) -> crate::Result<Self> {
        if rec.len() != 11 {
            return Err(crate::Error::Parse(format!("expected 11 diagnostic columns, got {}", rec.len())));
        }
        let p = |i: usize| -> crate::Result<T> {
            rec[i]
                .trim()
                .parse::<f64>()
                .map(T::lit)
                .map_err(|_| crate::Error::Parse(format!("bad value `{}` in column {}", rec[i], Self::CSV_HEADER[i])))
        };
        Ok(Diagnostics {
            t: p(0)?,
            mass: p(1)?,
            energy: p(2)?,
            dissipation: p(3)?,
            grad_mu_l2: p(4)?,
            mu_fluct_l2: p(5)?,
            phi_min: p(6)?,
            phi_max: p(7)?,
            sep_margin: p(8)?,
            dt: p(9)?,
            newton_iters: rec[10].trim().parse().map_err(|_| crate::Error::Parse("bad newton_iters".into()))?,
        })
    }

    pub fn norm(&self, which: DissipationNorm) -> T {
        match which {
            DissipationNorm::Gradient => self.grad_mu_l2,
            DissipationNorm::Fluctuation => self.mu_fluct_l2,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Snapshot<T> {
    /// Index of the diagnostics row taken at the same time.
    pub step: usize,
    pub t: T,
    pub phi: Field<T>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "reason")]
pub enum RunStatus {
    /// Reached `t_max`.
    Completed,
    /// Dissipation norm stayed below the threshold for the dwell period.
    SteadyState,
    /// Hit the step-size floor or the step budget; the record is partial.
    Aborted(String),
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RunStats {
    pub accepted: usize,
    pub rejected: usize,
    pub wall_seconds: f64,
    pub final_newton_residual: f64,
}

/// Where a trajectory came from.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub config_digest: Option<String>,
    pub seed: Option<u64>,
    pub label: String,
    pub steady_threshold: f64,
    pub steady_dwell: usize,
}

/// Bounds the analysis needs to state the good-time measure estimate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergyBounds<T> {
    /// Which norm classifies good times.
    pub norm: DissipationNorm,
    /// `c` in `dissipation ≥ c·norm²` (`α m★` or `β`).
    pub coefficient: T,
    /// Lower bound of the dissipated functional.
    pub floor: T,
    /// Per-step slack of the energy inequality.
    pub tol_e: T,
}

impl<T: Real> EnergyBounds<T> {
    pub fn for_model(model: &crate::physics::functional::DiscreteModel<T>, tol_e: T) -> Self {
        EnergyBounds {
            norm: model.config().dissipation_norm(),
            coefficient: model.config().dissipation_coefficient(),
            floor: model.energy_floor(),
            tol_e,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Trajectory<T> {
    pub grid: Grid<T>,
    pub rows: Vec<Diagnostics<T>>,
    pub snapshots: Vec<Snapshot<T>>,
    pub bounds: EnergyBounds<T>,
    pub status: RunStatus,
    pub stats: RunStats,
    pub provenance: Provenance,
}

impl<T: Real> Trajectory<T> {
    pub fn is_complete(&self) -> bool {
        !matches!(self.status, RunStatus::Aborted(_))
    }

    pub fn times(&self) -> Vec<T> {
        self.rows.iter().map(|r| r.t).collect()
    }

    pub fn energies(&self) -> Vec<T> {
        self.rows.iter().map(|r| r.energy).collect()
    }

    /// The good-time norm of every row.
    pub fn norms(&self) -> Vec<T> {
        self.rows.iter().map(|r| r.norm(self.bounds.norm)).collect()
    }

    pub fn initial_energy(&self) -> T {
        self.rows[0].energy
    }

    pub fn t_end(&self) -> T {
        self.rows.last().map_or(T::zero(), |r| r.t)
    }

    pub fn last_snapshot(&self) -> Option<&Snapshot<T>> {
        self.snapshots.last()
    }

    /// Largest `|mass_k − mass_0|` over the record.
    pub fn max_mass_drift(&self) -> T {
        let m0 = self.rows[0].mass;
        self.rows.iter().fold(T::zero(), |acc, r| acc.max((r.mass - m0).abs()))
    }

    /// Largest drift between consecutive rows.
    pub fn max_step_mass_drift(&self) -> T {
        self.rows.windows(2).fold(T::zero(), |acc, w| acc.max((w[1].mass - w[0].mass).abs()))
    }

    /// Largest `E_{k+1} + dt·D_{k+1} − E_k` over consecutive rows.
    pub fn max_energy_excess(&self) -> T {
        self.rows
            .windows(2)
            .fold(T::neg_infinity(), |acc, w| acc.max(w[1].energy + w[1].dt * w[1].dissipation - w[0].energy))
    }

    /// `E(t_end) + Σ dt·D − E(0)`.
    pub fn cumulative_energy_excess(&self) -> T {
        let diss: Vec<T> = self.rows.iter().skip(1).map(|r| r.dt * r.dissipation).collect();
        self.t_end_energy() + crate::field::compensated_sum(&diss) - self.initial_energy()
    }

    fn t_end_energy(&self) -> T {
        self.rows.last().map_or(T::zero(), |r| r.energy)
    }

    /// Whether every row keeps `φ` strictly inside `(−1, 1)` with finite values.
    pub fn strictly_bounded(&self) -> bool {
        self.rows.iter().all(|r| {
            r.phi_min.is_finite() && r.phi_max.is_finite() && r.phi_min > -T::one() && r.phi_max < T::one()
        }) && self.snapshots.iter().all(|s| s.phi.values().iter().all(|v| v.is_finite() && v.abs() < T::one()))
    }
}
