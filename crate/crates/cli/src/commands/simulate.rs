use std::path::Path;

use phasefield::analysis::classify_unchecked;
use phasefield::dynamics::{run, RunStatus, Trajectory};

use super::run_dir::{self, Summary};
use crate::config::{ExperimentConfig, InitialKind};
use crate::manifest::RunManifest;

/// Drift of the mean allowed over a whole run.
pub const MASS_TOL: f64 = 1e-10;

pub fn simulate(cfg: &ExperimentConfig, dir: &Path, force: bool) -> anyhow::Result<RunManifest> {
    run_dir::prepare(dir, force)?;
    let seed = (cfg.initial.kind == InitialKind::RandomAdmissible).then_some(cfg.initial.seed);
    let mut manifest = RunManifest::start("simulate", Some(cfg.digest()), seed);
    let mut files = vec![run_dir::write_config(dir, cfg)?];

    let model = cfg.model()?;
    let phi0 = cfg.initial_field()?;
    let mut traj = run(&model, phi0, cfg.time.t_max, &cfg.time.stepper)?;
    traj.provenance.config_digest = manifest.config_digest.clone();
    traj.provenance.seed = seed;
    traj.provenance.label = cfg.output.dir.display().to_string();

    let diag = dir.join(run_dir::DIAGNOSTICS_FILE);
    run_dir::write_diagnostics(&diag, &traj.rows)?;
    files.push(diag);
    files.extend(run_dir::write_snapshots(dir, &traj.snapshots, cfg.output.snapshot_format)?);
    let summary = dir.join(run_dir::SUMMARY_FILE);
    std::fs::write(&summary, serde_json::to_string_pretty(&Summary::of(&traj))? + "\n")?;
    files.push(summary);

    check_trajectory(&mut manifest, &traj, cfg);
    manifest.finish(dir, &files)?;
    Ok(manifest)
}

/// The per-run assertion suite: the run finished, mass is conserved, every
/// step satisfies the energy inequality, `|φ| < 1` throughout, and the bad
/// set of each `M` obeys its measure bound.
pub fn check_trajectory(manifest: &mut RunManifest, traj: &Trajectory<f64>, cfg: &ExperimentConfig) {
    let status_ok = !matches!(traj.status, RunStatus::Aborted(_));
    manifest.check(
        "run_status",
        status_ok,
        format!("{:?} after {} steps, t = {:e}", traj.status, traj.stats.accepted, traj.t_end()),
    );
    let drift = traj.max_mass_drift();
    manifest.check("mass_conservation", drift <= MASS_TOL, format!("max |mean(phi) - mean(phi0)| = {drift:e}"));
    let excess = traj.max_energy_excess();
    let tol_e = cfg.time.stepper.tol_e;
    manifest.check(
        "energy_inequality",
        excess <= tol_e,
        format!("max step excess {excess:e} (tolerance {tol_e:e})"),
    );
    let margin = traj.rows.iter().map(|r| r.sep_margin).fold(f64::INFINITY, f64::min);
    manifest.check("strict_bounds", traj.strictly_bounded(), format!("min 1 - |phi| = {margin:e}"));
    for &m in &cfg.analysis.m_values {
        let name = format!("good_time_bound[M={m}]");
        match classify_unchecked(traj, m, cfg.analysis.t0) {
            Ok(set) => {
                let bound = set.bound.unwrap_or(f64::NAN);
                manifest.check(&name, set.bound_holds(), format!("bad measure {:e} <= {bound:e}", set.bad_measure));
            }
            Err(e) => manifest.check(&name, false, e.to_string()),
        }
    }
}
