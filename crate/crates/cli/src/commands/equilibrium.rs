use std::path::Path;

use phasefield::stationary::{separation_bound, solve_equilibrium, EquilibriumSidecar, SeparationReport};
use serde::Serialize;

use super::run_dir;
use crate::config::{ExperimentConfig, InitialKind};
use crate::manifest::RunManifest;

#[derive(Debug, Serialize)]
struct SeedResult {
    index: usize,
    seed_id: String,
    file: Option<String>,
    converged: bool,
    error: Option<String>,
    newton_iters: Option<usize>,
    mean: Option<f64>,
    equilibrium: Option<EquilibriumSidecar>,
    separation: Option<SeparationReport>,
}

#[derive(Serialize)]
struct Sidecar<'a> {
    #[serde(flatten)]
    state: &'a EquilibriumSidecar,
    newton_iters: usize,
    separation: &'a SeparationReport,
}

/// Keeps file names portable: anything outside `[A-Za-z0-9.-]` becomes `_`.
fn slug(id: &str) -> String {
    id.chars().map(|c| if c.is_ascii_alphanumeric() || c == '.' || c == '-' { c } else { '_' }).collect()
}

pub fn equilibrium(cfg: &ExperimentConfig, dir: &Path, force: bool) -> anyhow::Result<RunManifest> {
    run_dir::prepare(dir, force)?;
    let mut manifest = RunManifest::start("equilibrium", Some(cfg.digest()), None);
    let mut files = vec![run_dir::write_config(dir, cfg)?];
    let model = cfg.model()?;
    let grid = cfg.grid()?;
    let k = match cfg.initial.kind {
        InitialKind::File => cfg.initial_field()?.mean(),
        _ => cfg.initial.mean,
    };
    let opts = cfg.solver_options();
    let bound = model.potential.bound();
    let mut results = Vec::new();
    for (index, seed) in cfg.seeds(grid)?.into_iter().enumerate() {
        let seed_id = seed.id();
        let solved = seed.field(grid, k, bound).and_then(|guess| solve_equilibrium(&model, k, &guess, &opts, &seed_id));
        let res = match solved {
            Ok(e) => {
                let name = format!("eq_{index}_{}", slug(&seed_id));
                let snap = dir.join(format!("{name}.dat"));
                phasefield::io::write_snapshot(&snap, &e.phi_inf)?;
                let sep = separation_bound(&model, &e);
                let side = e.sidecar();
                let json = dir.join(format!("{name}.json"));
                let text = serde_json::to_string_pretty(&Sidecar { state: &side, newton_iters: e.newton_iters, separation: &sep })?;
                std::fs::write(&json, text + "\n")?;
                files.push(snap);
                files.push(json);
                SeedResult {
                    index,
                    seed_id,
                    file: Some(format!("{name}.dat")),
                    converged: true,
                    error: None,
                    newton_iters: Some(e.newton_iters),
                    mean: Some(e.phi_inf.mean()),
                    equilibrium: Some(side),
                    separation: Some(sep),
                }
            }
            Err(err) => SeedResult {
                index,
                seed_id,
                file: None,
                converged: false,
                error: Some(err.to_string()),
                newton_iters: None,
                mean: None,
                equilibrium: None,
                separation: None,
            },
        };
        results.push(res);
    }

    let converged: Vec<&SeedResult> = results.iter().filter(|r| r.converged).collect();
    manifest.check(
        "any_converged",
        !converged.is_empty(),
        format!("{} of {} seeds converged", converged.len(), results.len()),
    );
    for r in &converged {
        let e = r.equilibrium.as_ref().expect("converged");
        let mean = r.mean.expect("converged");
        let mean_err = (mean - k).abs();
        manifest.check(
            &format!("mean[{}]", r.index),
            mean_err <= 1e-12,
            format!("|mean - k| = {mean_err:e}"),
        );
        // The solver accepts a stagnated iterate within 1e3·tol.
        let allowed = opts.tol * 1e3;
        manifest.check(
            &format!("residual[{}]", r.index),
            e.residual <= allowed,
            format!("stationary residual {:e} (allowed {allowed:e})", e.residual),
        );
        let sep = r.separation.as_ref().expect("converged");
        manifest.check(&format!("separated[{}]", r.index), sep.delta > 0.0, format!("delta = {:e}", sep.delta));
        if let (Some(holds), Some(g), Some(b)) = (sep.grad_bound_holds, sep.grad_l2, sep.grad_bound) {
            manifest.check(&format!("gradient_bound[{}]", r.index), holds, format!("|grad phi| = {g:e} <= {b:e}"));
        }
    }
    let summary = dir.join(run_dir::SUMMARY_FILE);
    std::fs::write(&summary, serde_json::to_string_pretty(&serde_json::json!({ "k": k, "seeds": results }))? + "\n")?;
    files.push(summary);
    manifest.finish(dir, &files)?;
    Ok(manifest)
}
