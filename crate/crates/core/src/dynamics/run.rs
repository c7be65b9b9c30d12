//! Adaptive time loop producing a [`Trajectory`].

use std::time::Instant;

use crate::dynamics::stepper::{State, StepOutcome, Stepper, StepperConfig};
use crate::dynamics::trajectory::{Diagnostics, EnergyBounds, Provenance, RunStats, RunStatus, Snapshot, Trajectory};
use crate::error::{Error, Result};
use crate::field::{self, Field};
use crate::physics::functional::DiscreteModel;
use crate::physics::model::ModelConfig;
use crate::scalar::Real;

fn diagnostics<T: Real>(state: &State<T>, mu: &Field<T>, dissipation: T) -> Diagnostics<T> {
    let phi = &state.phi;
    Diagnostics {
        t: state.t,
        mass: phi.mean(),
        energy: state.energy,
        dissipation,
        grad_mu_l2: field::norm_h1_semi(mu),
        mu_fluct_l2: field::norm_l2(&mu.fluctuation()),
        phi_min: phi.min(),
        phi_max: phi.max(),
        sep_margin: T::one() - phi.sup_norm(),
        dt: state.last.dt,
        newton_iters: state.last.newton_iters,
    }
}

/// Runs the model from `phi0` until `t_max`, a steady state, or the step
/// floor. Step failures halve `dt`; five clean steps in a row grow it.
///
/// Invalid inputs are errors; a run that hits the floor returns its partial
/// record with [`RunStatus::Aborted`].
pub fn run<T: Real>(m: &ModelConfig<T>, phi0: Field<T>, t_max: T, cfg: &StepperConfig) -> Result<Trajectory<T>> {
    let model = DiscreteModel::new(m, *phi0.grid())?;
    run_with(Stepper::new(model, cfg.clone())?, phi0, t_max)
}

pub fn run_with<T: Real>(stepper: Stepper<T>, phi0: Field<T>, t_max: T) -> Result<Trajectory<T>> {
    let started = Instant::now();
    let cfg = stepper.config().clone();
    let model = stepper.model();
    if !(t_max > T::zero()) {
        return Err(Error::InvalidSpec("t_max must be positive".into()));
    }
    let mut state = stepper.initial_state(phi0)?;
    let mu0 = model.chemical_potential(&state.phi)?;
    let d0 = model.dissipation_rate(&state.phi, &mu0)?;
    let mut rows = vec![diagnostics(&state, &mu0, d0)];
    let mut snapshots = vec![Snapshot { step: 0, t: state.t, phi: state.phi.clone() }];
    let mut stats = RunStats::default();
    let norm_kind = model.config().dissipation_norm();
    let steady = T::lit(cfg.steady_threshold);
    let dt_min = T::lit(cfg.dt_min);
    let dt_max = T::lit(cfg.dt_max);
    let mut dt = T::lit(cfg.dt_init);
    let mut clean = 0usize;
    let mut quiet = 0usize;
    let status = loop {
        if state.t >= t_max {
            break RunStatus::Completed;
        }
        if stats.accepted >= cfg.max_steps {
            break RunStatus::Aborted(format!("step budget of {} exhausted", cfg.max_steps));
        }
        let remaining = t_max - state.t;
        // Avoid leaving a sliver shorter than the floor at the end.
        let dt_try = if remaining <= dt || remaining - dt < dt_min { remaining } else { dt };
        match stepper.step(&state, dt_try) {
            Ok(StepOutcome { state: next, mu, dissipation }) => {
                state = next;
                stats.accepted += 1;
                stats.final_newton_residual = state.last.residual.as_f64();
                let row = diagnostics(&state, &mu, dissipation);
                let is_quiet = row.norm(norm_kind) < steady;
                rows.push(row);
                if cfg.snapshot_every > 0 && stats.accepted % cfg.snapshot_every == 0 {
                    snapshots.push(Snapshot { step: rows.len() - 1, t: state.t, phi: state.phi.clone() });
                }
                clean += 1;
                if clean >= cfg.grow_after {
                    dt = (dt * T::lit(cfg.grow_factor)).min(dt_max);
                    clean = 0;
                }
                quiet = if is_quiet { quiet + 1 } else { 0 };
                if quiet >= cfg.steady_dwell {
                    break RunStatus::SteadyState;
                }
            }
            Err(
                e @ (Error::NewtonDivergence { .. }
                | Error::BoundsViolation { .. }
                | Error::EnergyIncrease { .. }
                | Error::SingularMatrix { .. }
                | Error::Domain { .. }),
            ) => {
                stats.rejected += 1;
                clean = 0;
                if dt_try <= dt_min {
                    let floor = Error::StepFloor { t: state.t.as_f64(), dt: dt_try.as_f64() };
                    break RunStatus::Aborted(format!("{floor}; last failure: {e}"));
                }
                dt = (dt_try * T::lit(0.5)).max(dt_min);
            }
            Err(e) => return Err(e),
        }
    };
    if snapshots.last().map(|s| s.step) != Some(rows.len() - 1) {
        snapshots.push(Snapshot { step: rows.len() - 1, t: state.t, phi: state.phi.clone() });
    }
    stats.wall_seconds = started.elapsed().as_secs_f64();
    Ok(Trajectory {
        grid: *model.grid(),
        rows,
        snapshots,
        bounds: EnergyBounds::for_model(model, T::lit(cfg.tol_e)),
        status,
        stats,
        provenance: Provenance {
            steady_threshold: cfg.steady_threshold,
            steady_dwell: cfg.steady_dwell,
            ..Provenance::default()
        },
    })
}
