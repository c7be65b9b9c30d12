//! Layout of a run directory and the code that writes and re-reads it.
//!
//! ```text
//! <run>/config.toml        resolved configuration
//! <run>/diagnostics.csv    one row per recorded sample
//! <run>/snapshots/snap_<row>.<dat|csv>
//! <run>/summary.json
//! <run>/manifest.json
//! ```

use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use phasefield::dynamics::{Diagnostics, EnergyBounds, Provenance, RunStats, RunStatus, Snapshot, Trajectory};
use phasefield::{DiscreteModel, Field};
use serde::{Deserialize, Serialize};

use crate::config::{self, ExperimentConfig, SnapshotFormat};

pub const CONFIG_FILE: &str = "config.toml";
pub const DIAGNOSTICS_FILE: &str = "diagnostics.csv";
pub const SNAPSHOT_DIR: &str = "snapshots";
pub const SUMMARY_FILE: &str = "summary.json";

/// Creates `dir`, refusing to reuse a non-empty one unless `force` is set.
pub fn prepare(dir: &Path, force: bool) -> anyhow::Result<()> {
    if dir.exists() {
        let empty = dir.read_dir().map(|mut it| it.next().is_none()).unwrap_or(false);
        if !empty {
            if !force {
                bail!("output directory {} already exists (use --force to replace it)", dir.display());
            }
            std::fs::remove_dir_all(dir).with_context(|| format!("removing {}", dir.display()))?;
        }
    }
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    Ok(())
}

pub fn write_config(dir: &Path, cfg: &ExperimentConfig) -> anyhow::Result<PathBuf> {
    let path = dir.join(CONFIG_FILE);
    std::fs::write(&path, cfg.to_toml())?;
    Ok(path)
}

pub fn read_config(dir: &Path) -> anyhow::Result<ExperimentConfig> {
    Ok(config::load(&dir.join(CONFIG_FILE))?)
}

pub fn write_diagnostics(path: &Path, rows: &[Diagnostics<f64>]) -> anyhow::Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(Diagnostics::<f64>::CSV_HEADER)?;
    for r in rows {
        w.write_record(r.to_record())?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_diagnostics(path: &Path) -> anyhow::Result<Vec<Diagnostics<f64>>> {
    let mut r = csv::Reader::from_path(path).with_context(|| format!("reading {}", path.display()))?;
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    if header != Diagnostics::<f64>::CSV_HEADER {
        bail!("{} has an unexpected header", path.display());
    }
    r.records()
        .enumerate()
        .map(|(i, rec)| {
            let rec = rec?;
            let fields: Vec<&str> = rec.iter().collect();
            Diagnostics::from_record(&fields).with_context(|| format!("{} row {}", path.display(), i + 1))
        })
        .collect()
}

pub fn snapshot_name(row: usize, format: SnapshotFormat) -> String {
    let ext = match format {
        SnapshotFormat::Rows => "dat",
        SnapshotFormat::Column => "csv",
    };
    format!("snap_{row:07}.{ext}")
}

pub fn write_snapshots(dir: &Path, snaps: &[Snapshot<f64>], format: SnapshotFormat) -> anyhow::Result<Vec<PathBuf>> {
    let sdir = dir.join(SNAPSHOT_DIR);
    std::fs::create_dir_all(&sdir)?;
    snaps
        .iter()
        .map(|s| {
            let path = sdir.join(snapshot_name(s.step, format));
            phasefield::io::write_snapshot(&path, &s.phi)?;
            Ok(path)
        })
        .collect()
}

/// Snapshots sorted by row index; times come from the diagnostics.
pub fn read_snapshots(dir: &Path, rows: &[Diagnostics<f64>]) -> anyhow::Result<Vec<Snapshot<f64>>> {
    let mut snaps = Vec::new();
    for entry in std::fs::read_dir(dir.join(SNAPSHOT_DIR))? {
        let path = entry?.path();
        let Some(step) = path
            .file_stem()
            .and_then(|s| s.to_str())
            .and_then(|s| s.strip_prefix("snap_"))
            .and_then(|s| s.parse::<usize>().ok())
        else {
            continue;
        };
        let row = rows.get(step).with_context(|| format!("{} has no diagnostics row", path.display()))?;
        let phi: Field<f64> = phasefield::io::read_snapshot(&path).with_context(|| format!("reading {}", path.display()))?;
        snaps.push(Snapshot { step, t: row.t, phi });
    }
    snaps.sort_by_key(|s| s.step);
    Ok(snaps)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Summary {
    pub status: RunStatus,
    pub stats: RunStats,
    pub provenance: Provenance,
    pub bounds: EnergyBounds<f64>,
    pub samples: usize,
    pub snapshots: usize,
    pub t_end: f64,
    pub initial_energy: f64,
    pub final_energy: f64,
    pub max_mass_drift: f64,
    pub max_step_mass_drift: f64,
    pub max_energy_excess: f64,
    pub cumulative_energy_excess: f64,
    pub min_sep_margin: f64,
}

impl Summary {
    pub fn of(traj: &Trajectory<f64>) -> Self {
        Summary {
            status: traj.status.clone(),
            stats: traj.stats.clone(),
            provenance: traj.provenance.clone(),
            bounds: traj.bounds,
            samples: traj.rows.len(),
            snapshots: traj.snapshots.len(),
            t_end: traj.t_end(),
            initial_energy: traj.initial_energy(),
            final_energy: traj.rows.last().map_or(f64::NAN, |r| r.energy),
            max_mass_drift: traj.max_mass_drift(),
            max_step_mass_drift: traj.max_step_mass_drift(),
            max_energy_excess: traj.max_energy_excess(),
            cumulative_energy_excess: traj.cumulative_energy_excess(),
            min_sep_margin: traj.rows.iter().map(|r| r.sep_margin).fold(f64::INFINITY, f64::min),
        }
    }
}

/// Rebuilds the trajectory of a finished `simulate` run.
pub fn load_trajectory(dir: &Path, cfg: &ExperimentConfig) -> anyhow::Result<Trajectory<f64>> {
    let summary: Summary = serde_json::from_str(
        &std::fs::read_to_string(dir.join(SUMMARY_FILE)).with_context(|| format!("{} is not a run directory", dir.display()))?,
    )?;
    let rows = read_diagnostics(&dir.join(DIAGNOSTICS_FILE))?;
    if rows.is_empty() {
        bail!("{} records no samples", dir.display());
    }
    let snapshots = read_snapshots(dir, &rows)?;
    let grid = cfg.grid()?;
    if let Some(s) = snapshots.iter().find(|s| !s.phi.grid().same_as(&grid)) {
        bail!("snapshot of row {} does not match the configured grid", s.step);
    }
    let model = DiscreteModel::new(&cfg.model()?, grid)?;
    Ok(Trajectory {
        grid,
        rows,
        snapshots,
        bounds: EnergyBounds::for_model(&model, cfg.time.stepper.tol_e),
        status: summary.status,
        stats: summary.stats,
        provenance: summary.provenance,
    })
}
