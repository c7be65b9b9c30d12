//! Cartesian parameter sweeps. Each point gets its own run directory
//! `<out>/<key1>=<v1>/<key2>=<v2>/…`; points run concurrently and the sweep
//! directory only collects their manifests.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use rayon::prelude::*;
use serde::Serialize;

use super::simulate::simulate;
use crate::config::{ConfigError, ExperimentConfig};
use crate::manifest::{RunManifest, MANIFEST_FILE};

#[derive(Clone, Debug, PartialEq)]
pub struct Axis {
    /// Dotted path into the configuration, e.g. `model.gamma`.
    pub key: String,
    pub values: Vec<String>,
}

impl std::str::FromStr for Axis {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (key, values) = s.split_once('=').ok_or_else(|| format!("axis `{s}` must look like key=v1,v2"))?;
        let key = key.trim();
        if key.is_empty() || key.split('.').any(str::is_empty) {
            return Err(format!("axis `{s}` has an empty key"));
        }
        let values: Vec<String> = values.split(',').map(|v| v.trim().to_string()).collect();
        if values.iter().any(String::is_empty) {
            return Err(format!("axis `{s}` has an empty value"));
        }
        Ok(Axis { key: key.to_string(), values })
    }
}

/// A TOML literal when it parses as one (`0.01`, `true`, `[1, 2]`),
/// otherwise a bare string.
fn parse_value(raw: &str) -> toml::Value {
    toml::from_str::<toml::Table>(&format!("v = {raw}"))
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()))
}

fn set_path(table: &mut toml::Table, key: &str, value: toml::Value) -> anyhow::Result<()> {
    let mut parts: Vec<&str> = key.split('.').collect();
    let last = parts.pop().expect("non-empty key");
    let mut cur = table;
    for p in parts {
        cur = cur
            .entry(p.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()))
            .as_table_mut()
            .with_context(|| format!("`{p}` in `{key}` is not a table"))?;
    }
    cur.insert(last.to_string(), value);
    Ok(())
}

#[derive(Clone, Debug)]
pub struct SweepPoint {
    pub assignments: Vec<(String, String)>,
    pub dir: PathBuf,
    pub config: ExperimentConfig,
}

/// Expands the axes over the base configuration text. Fails before anything
/// runs if two points share a directory or a directory already exists.
pub fn plan(text: &str, origin: &Path, out: &Path, axes: &[Axis]) -> anyhow::Result<Vec<SweepPoint>> {
    if axes.is_empty() {
        bail!("a sweep needs at least one --axis");
    }
    let base: toml::Table =
        toml::from_str(text).map_err(|e| ConfigError::Parse { path: origin.to_path_buf(), message: e.to_string() })?;
    let mut combos: Vec<Vec<(String, String)>> = vec![Vec::new()];
    for axis in axes {
        combos = combos
            .into_iter()
            .flat_map(|c| {
                axis.values.iter().map(move |v| {
                    let mut next = c.clone();
                    next.push((axis.key.clone(), v.clone()));
                    next
                })
            })
            .collect();
    }
    let config_dir = origin.parent().map(Path::to_path_buf).unwrap_or_default();
    let mut seen = BTreeSet::new();
    let mut points = Vec::new();
    for assignments in combos {
        let dir = assignments.iter().fold(out.to_path_buf(), |d, (k, v)| d.join(format!("{k}={v}")));
        if !seen.insert(dir.clone()) {
            bail!("sweep points collide on {}", dir.display());
        }
        if dir.exists() {
            bail!("sweep directory {} already exists; sweeps never overwrite runs", dir.display());
        }
        let mut table = base.clone();
        for (k, v) in &assignments {
            set_path(&mut table, k, parse_value(v))?;
        }
        set_path(&mut table, "output.dir", toml::Value::String(dir.to_string_lossy().into_owned()))?;
        let text = toml::to_string(&table)?;
        let config = ExperimentConfig::from_toml(&text, origin, &config_dir)
            .with_context(|| format!("sweep point {}", dir.display()))?;
        points.push(SweepPoint { assignments, dir, config });
    }
    Ok(points)
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepEntry {
    pub dir: String,
    pub assignments: Vec<(String, String)>,
    pub config_digest: String,
    pub passed: bool,
    pub error: Option<String>,
}

pub const SWEEP_FILE: &str = "sweep.json";

pub fn sweep(text: &str, origin: &Path, out: &Path, axes: &[Axis]) -> anyhow::Result<RunManifest> {
    if out.join(MANIFEST_FILE).exists() {
        bail!("{} already holds a sweep", out.display());
    }
    let points = plan(text, origin, out, axes)?;
    std::fs::create_dir_all(out)?;
    let mut manifest = RunManifest::start("sweep", None, None);
    let results: Vec<(SweepEntry, Option<PathBuf>)> = points
        .par_iter()
        .map(|p| {
            let dir = p.dir.strip_prefix(out).unwrap_or(&p.dir).to_string_lossy().into_owned();
            let config_digest = p.config.digest();
            match simulate(&p.config, &p.dir, false) {
                Ok(m) => (
                    SweepEntry { dir, assignments: p.assignments.clone(), config_digest, passed: m.passed, error: None },
                    Some(p.dir.join(MANIFEST_FILE)),
                ),
                Err(e) => (
                    SweepEntry {
                        dir,
                        assignments: p.assignments.clone(),
                        config_digest,
                        passed: false,
                        error: Some(format!("{e:#}")),
                    },
                    None,
                ),
            }
        })
        .collect();
    let mut files = Vec::new();
    let mut entries = Vec::new();
    for (entry, child) in results {
        let detail = entry.error.clone().unwrap_or_else(|| if entry.passed { "all checks passed".into() } else { "checks failed".into() });
        manifest.check(&format!("run[{}]", entry.dir), entry.passed, detail);
        files.extend(child);
        entries.push(entry);
    }
    let path = out.join(SWEEP_FILE);
    std::fs::write(&path, serde_json::to_string_pretty(&entries)? + "\n")?;
    files.push(path);
    manifest.finish(out, &files)?;
    Ok(manifest)
}
