use std::path::{Path, PathBuf};

use anyhow::Context;
use phasefield::analysis::{analyze as run_analysis, AnalysisReport};
use phasefield::dynamics::RunStatus;

use super::run_dir;
use crate::manifest::{self, RunManifest};

pub const ANALYSIS_DIR: &str = "analysis";

#[derive(Clone, Debug, Default)]
pub struct AnalyzeOverrides {
    pub m_values: Option<Vec<f64>>,
    pub deltas: Option<Vec<f64>>,
}

/// Runs the analysis battery on a finished `simulate` directory and writes
/// `analysis/{report.json, level_sets.csv, degiorgi.csv, manifest.json}`.
/// The `analysis` subdirectory is regenerated on every call.
pub fn analyze(run: &Path, overrides: &AnalyzeOverrides) -> anyhow::Result<(RunManifest, AnalysisReport)> {
    let run_manifest = manifest::read(run).with_context(|| format!("{} is not a finished run directory", run.display()))?;
    if run_manifest.command != "simulate" {
        anyhow::bail!("{} was produced by `{}`, not `simulate`", run.display(), run_manifest.command);
    }
    let mut cfg = run_dir::read_config(run)?;
    if let Some(m) = &overrides.m_values {
        cfg.analysis.m_values = m.clone();
    }
    if let Some(d) = &overrides.deltas {
        cfg.analysis.deltas = d.clone();
    }
    cfg.validate()?;
    let traj = run_dir::load_trajectory(run, &cfg)?;
    if let RunStatus::Aborted(reason) = &traj.status {
        anyhow::bail!("run in {} did not finish: {reason}", run.display());
    }
    let model = cfg.model()?;
    let report = run_analysis(&traj, Some(&model), &cfg.analysis);

    let out = run.join(ANALYSIS_DIR);
    run_dir::prepare(&out, true)?;
    let mut manifest = RunManifest::start("analyze", Some(cfg.digest()), run_manifest.seed);
    let mut files: Vec<PathBuf> = Vec::new();
    let path = out.join("report.json");
    std::fs::write(&path, serde_json::to_string_pretty(&report)? + "\n")?;
    files.push(path);

    let path = out.join("level_sets.csv");
    let mut w = csv::Writer::from_path(&path)?;
    w.write_record(["delta", "t", "measure"])?;
    for entry in &report.level_sets {
        for (t, m) in entry.times.iter().zip(&entry.measures) {
            w.write_record([format!("{:e}", entry.delta), format!("{t:e}"), format!("{m:e}")])?;
        }
    }
    w.flush()?;
    files.push(path);

    if let Some(dg) = &report.degiorgi {
        let path = out.join("degiorgi.csv");
        let mut w = csv::Writer::from_path(&path)?;
        w.write_record(["n", "y_positive", "y_negative"])?;
        for (n, (p, q)) in dg.y.iter().zip(&dg.y_negative).enumerate() {
            w.write_record([n.to_string(), format!("{p:e}"), format!("{q:e}")])?;
        }
        w.flush()?;
        files.push(path);
    }

    for g in &report.good_times_all {
        manifest.check(
            &format!("good_times[M={}]", g.m),
            g.ok,
            format!("bad measure {:e} <= {:e}", g.bad_measure, g.bound),
        );
    }
    if report.good_times_all.len() != cfg.analysis.m_values.len() {
        manifest.check("good_times", false, report.notes.join("; "));
    }
    manifest.finish(&out, &files)?;
    Ok((manifest, report))
}
