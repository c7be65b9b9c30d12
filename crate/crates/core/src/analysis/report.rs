//! One-shot analysis of a trajectory, serialisable as the JSON report.

use serde::{Deserialize, Serialize};

use crate::analysis::degiorgi::{degiorgi_from_snapshots, Side};
use crate::analysis::good_times::classify_unchecked;
use crate::analysis::level_sets::level_set_series;
use crate::analysis::lojasiewicz::{lojasiewicz_fit_series, LojasiewiczOptions};
use crate::analysis::omega::omega_from_trajectory;
use crate::dynamics::Trajectory;
use crate::physics::model::ModelConfig;
use crate::scalar::Real;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AnalysisConfig {
    /// Thresholds `M`; the first one fills the `good_times` entry.
    pub m_values: Vec<f64>,
    pub t0: f64,
    /// Levels `δ` for the `|A_δ(t)|` series.
    pub deltas: Vec<f64>,
    /// Trailing fraction of the run used for `δ★`.
    pub separation_window: f64,
    /// De Giorgi level; `None` uses `0.9·δ★` (capped below 1/2).
    pub degiorgi_delta: Option<f64>,
    /// `None` places `T − 3τ` at the middle of the run.
    pub degiorgi_tau: Option<f64>,
    /// `None` uses the final snapshot time.
    pub degiorgi_t: Option<f64>,
    pub degiorgi_n_max: usize,
    pub fit_window: f64,
    pub e_inf: Option<f64>,
    pub min_gap: f64,
    /// Fit only on good times for the first `M`.
    pub fit_good_only: bool,
    pub omega_reps: usize,
    pub omega_tol: f64,
    pub omega_good_only: bool,
    /// Solve for the equilibrium nearest to the final state.
    pub polish: bool,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        AnalysisConfig {
            m_values: vec![0.1, 1.0, 10.0],
            t0: 0.0,
            deltas: vec![0.01, 0.05, 0.1],
            separation_window: 0.5,
            degiorgi_delta: None,
            degiorgi_tau: None,
            degiorgi_t: None,
            degiorgi_n_max: 12,
            fit_window: 0.5,
            e_inf: None,
            min_gap: 1e-12,
            fit_good_only: false,
            omega_reps: 5,
            omega_tol: 1e-5,
            omega_good_only: false,
            polish: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GoodTimesEntry {
    #[serde(rename = "M")]
    pub m: f64,
    #[serde(rename = "T")]
    pub t: f64,
    pub bad_measure: f64,
    pub bound: f64,
    pub ok: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeparationEntry {
    pub delta_star: Option<f64>,
    #[serde(rename = "T_star")]
    pub t_star: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeGiorgiEntry {
    pub delta: f64,
    pub tau: f64,
    #[serde(rename = "T")]
    pub t: f64,
    pub y: Vec<f64>,
    pub y_negative: Vec<f64>,
    pub certified: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LojasiewiczEntry {
    pub theta: f64,
    #[serde(rename = "C")]
    pub c: f64,
    pub fit_r2: f64,
    #[serde(rename = "E_inf")]
    pub e_inf: f64,
    pub semilog_r2: f64,
    pub decay_rate: f64,
    pub samples: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NearestEntry {
    pub distance_l2: f64,
    pub residual: f64,
    pub delta: f64,
    pub mu_inf: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OmegaEntry {
    pub dispersion: f64,
    pub singleton: bool,
    pub nearest_eq: Option<NearestEntry>,
    pub times: Vec<f64>,
}

/// `|A_δ(t)|` at every snapshot for one level.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct LevelSetEntry {
    pub delta: f64,
    pub times: Vec<f64>,
    pub measures: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub good_times: Option<GoodTimesEntry>,
    pub good_times_all: Vec<GoodTimesEntry>,
    pub separation: Option<SeparationEntry>,
    pub degiorgi: Option<DeGiorgiEntry>,
    pub lojasiewicz: Option<LojasiewiczEntry>,
    pub omega: Option<OmegaEntry>,
    /// Why any section is missing.
    pub notes: Vec<String>,
    /// Written as CSV rather than into the JSON report.
    #[serde(skip)]
    pub level_sets: Vec<LevelSetEntry>,
}

/// Runs every analysis that the trajectory supports. Failures of individual
/// sections are recorded in `notes` rather than aborting the report.
pub fn analyze<T: Real>(traj: &Trajectory<T>, model: Option<&ModelConfig<T>>, cfg: &AnalysisConfig) -> AnalysisReport {
    let mut notes = Vec::new();
    let mut all = Vec::new();
    let mut first_mask = None;
    for (i, &m) in cfg.m_values.iter().enumerate() {
        match classify_unchecked(traj, T::lit(m), T::lit(cfg.t0)) {
            Ok(set) => {
                all.push(GoodTimesEntry {
                    m,
                    t: cfg.t0,
                    bad_measure: set.bad_measure.as_f64(),
                    bound: set.bound.map_or(f64::INFINITY, |b| b.as_f64()),
                    ok: set.bound_holds(),
                });
                if i == 0 {
                    first_mask = Some(set.mask);
                }
            }
            Err(e) => notes.push(format!("good times at M = {m}: {e}")),
        }
    }

    let window = T::lit(cfg.separation_window);
    let mut level_sets = Vec::new();
    let mut separation = None;
    for &delta in &cfg.deltas {
        match level_set_series(&traj.snapshots, T::lit(delta), window) {
            Ok(r) => {
                // δ★ and T★ do not depend on the level.
                separation.get_or_insert(SeparationEntry {
                    delta_star: r.delta_star.map(|d| d.as_f64()),
                    t_star: r.t_star.map(|t| t.as_f64()),
                });
                level_sets.push(LevelSetEntry {
                    delta,
                    times: r.times.iter().map(|t| t.as_f64()).collect(),
                    measures: r.measures.iter().map(|m| m.as_f64()).collect(),
                });
            }
            Err(e) => notes.push(format!("level sets at delta = {delta}: {e}")),
        }
    }
    if cfg.deltas.is_empty() {
        match level_set_series(&traj.snapshots, T::lit(0.05), window) {
            Ok(r) => {
                separation = Some(SeparationEntry {
                    delta_star: r.delta_star.map(|d| d.as_f64()),
                    t_star: r.t_star.map(|t| t.as_f64()),
                })
            }
            Err(e) => notes.push(format!("level sets: {e}")),
        }
    }

    let degiorgi = degiorgi_entry(traj, cfg, separation.as_ref().and_then(|s| s.delta_star), &mut notes);

    let mut lopts = LojasiewiczOptions {
        window: T::lit(cfg.fit_window),
        e_inf: cfg.e_inf.map(T::lit),
        min_gap: T::lit(cfg.min_gap),
        ..LojasiewiczOptions::default()
    };
    lopts.plateau = T::lit(0.05);
    let fit_mask = if cfg.fit_good_only { first_mask.as_deref() } else { None };
    let lojasiewicz = match lojasiewicz_fit_series(&traj.times(), &traj.energies(), &traj.norms(), fit_mask, &lopts) {
        Ok(f) => Some(LojasiewiczEntry {
            theta: f.theta.as_f64(),
            c: f.c.as_f64(),
            fit_r2: f.r2.as_f64(),
            e_inf: f.e_inf.as_f64(),
            semilog_r2: f.semilog_r2.as_f64(),
            decay_rate: f.decay_rate.as_f64(),
            samples: f.samples,
        }),
        Err(e) => {
            notes.push(format!("lojasiewicz fit: {e}"));
            None
        }
    };

    let omega_mask = if cfg.omega_good_only { first_mask.as_deref() } else { None };
    let polish_model = if cfg.polish { model } else { None };
    let omega = match omega_from_trajectory(traj, omega_mask, cfg.omega_reps, T::lit(cfg.omega_tol), polish_model) {
        Ok(o) => Some(OmegaEntry {
            dispersion: o.dispersion.as_f64(),
            singleton: o.singleton,
            nearest_eq: o.nearest.map(|n| NearestEntry {
                distance_l2: n.distance_l2.as_f64(),
                residual: n.residual.as_f64(),
                delta: n.delta.as_f64(),
                mu_inf: n.mu_inf.as_f64(),
            }),
            times: o.times.iter().map(|t| t.as_f64()).collect(),
        }),
        Err(e) => {
            notes.push(format!("omega limit: {e}"));
            None
        }
    };

    AnalysisReport {
        good_times: all.first().cloned(),
        good_times_all: all,
        separation,
        degiorgi,
        lojasiewicz,
        omega,
        notes,
        level_sets,
    }
}

fn degiorgi_entry<T: Real>(
    traj: &Trajectory<T>,
    cfg: &AnalysisConfig,
    delta_star: Option<f64>,
    notes: &mut Vec<String>,
) -> Option<DeGiorgiEntry> {
    let snaps = &traj.snapshots;
    let (first, last) = (snaps.first()?.t.as_f64(), snaps.last()?.t.as_f64());
    let delta = match cfg.degiorgi_delta.or(delta_star.map(|d| (0.9 * d).min(0.49))) {
        Some(d) if d > 0.0 => d,
        _ => {
            notes.push("de giorgi: no separation level available".into());
            return None;
        }
    };
    let t = cfg.degiorgi_t.unwrap_or(last);
    let tau = cfg.degiorgi_tau.unwrap_or((t - first) / 6.0);
    let run = |side| degiorgi_from_snapshots(snaps, T::lit(delta), T::lit(tau), T::lit(t), cfg.degiorgi_n_max, side);
    match (run(Side::Positive), run(Side::Negative)) {
        (Ok(p), Ok(n)) => Some(DeGiorgiEntry {
            delta,
            tau,
            t,
            certified: p.certified() && n.certified(),
            y: p.y.iter().map(|v| v.as_f64()).collect(),
            y_negative: n.y.iter().map(|v| v.as_f64()).collect(),
        }),
        (Err(e), _) | (_, Err(e)) => {
            notes.push(format!("de giorgi: {e}"));
            None
        }
    }
}
