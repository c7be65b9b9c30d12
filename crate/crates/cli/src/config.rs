//! Experiment configuration files.
//!
//! A configuration is a TOML document with the sections `[grid]`,
//! `[potential]`, `[mobility]`, `[diffusion]`, `[kernel]`, `[model]`,
//! `[initial]`, `[time]`, `[analysis]`, `[equilibrium]` and `[output]`.
//! Unknown keys are rejected everywhere. After parsing, every default is
//! filled in, so serialising the resolved config reproduces the run exactly;
//! its digest is a SHA-256 over canonical (key-sorted) JSON.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use phasefield::analysis::AnalysisConfig;
use phasefield::dynamics::StepperConfig;
use phasefield::physics::coefficients::Profile;
use phasefield::stationary::{Seed, SolverOptions};
use phasefield::{
    BoundaryMode, DiffusionSpec, FaceAverage, Field, Grid, KernelSpec, MobilitySpec, ModelConfig, PotentialSpec,
    Preset,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{de::Error as _, Deserialize, Deserializer, Serialize};
use sha2::{Digest, Sha256};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("parse error in {path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("invalid configuration: {0}")]
    Validation(String),
}

fn invalid(msg: impl Into<String>) -> ConfigError {
    ConfigError::Validation(msg.into())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    /// Cell counts, one entry per dimension.
    pub n: Vec<usize>,
    /// Side lengths; defaults to 1 along every axis.
    #[serde(default)]
    pub length: Vec<f64>,
    #[serde(default = "neumann")]
    pub bc: BoundaryMode,
}

fn neumann() -> BoundaryMode {
    BoundaryMode::Neumann
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PotentialKind {
    Logarithmic,
}

/// Defaults to the deep quench `θ = 0.3`, `θ₀ = 1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PotentialSection {
    pub kind: PotentialKind,
    pub theta: f64,
    pub theta0: f64,
    /// Distance from ±1 at which derivatives are refused.
    pub guard: Option<f64>,
}

impl Default for PotentialSection {
    fn default() -> Self {
        PotentialSection { kind: PotentialKind::Logarithmic, theta: 0.3, theta0: 1.0, guard: None }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProfileKind {
    #[default]
    Constant,
    Poly,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MobilitySection {
    pub kind: ProfileKind,
    /// Lower bound of `m`; also the value of a constant mobility.
    pub m_star: f64,
    /// `m(s) = Σ coeffs[k]·s^k` for `kind = "poly"`.
    pub coeffs: Vec<f64>,
    pub average: FaceAverage,
}

impl Default for MobilitySection {
    fn default() -> Self {
        MobilitySection { kind: ProfileKind::Constant, m_star: 1.0, coeffs: Vec::new(), average: FaceAverage::Arithmetic }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DiffusionSection {
    pub kind: ProfileKind,
    /// Lower bound of `a`; also the value of a constant coefficient.
    pub a_star: f64,
    pub coeffs: Vec<f64>,
}

impl Default for DiffusionSection {
    fn default() -> Self {
        DiffusionSection { kind: ProfileKind::Constant, a_star: 1.0, coeffs: Vec::new() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelKindName {
    Gaussian,
    Tophat,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelSection {
    pub kind: KernelKindName,
    /// Gaussian amplitude or tophat height.
    pub scale: f64,
    /// Gaussian standard deviation or tophat radius.
    pub support: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ModelSection {
    pub preset: Option<Preset>,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub gamma: Option<f64>,
    pub sigma1: Option<f64>,
    pub sigma2: Option<f64>,
    /// Add `σ₂(J∗1)φ` to `μ` so it is the exact first variation of the energy.
    pub nonlocal_consistency: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitialKind {
    Constant,
    CosinePerturbation,
    RandomAdmissible,
    File,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct InitialSection {
    pub kind: InitialKind,
    /// Prescribed mean `k`, `|k| < 1`.
    pub mean: f64,
    pub amplitude: f64,
    pub seed: u64,
    /// Wave number of the cosine perturbation.
    pub mode: usize,
    /// Snapshot file for `kind = "file"`, relative to the config file.
    pub path: Option<PathBuf>,
}

impl Default for InitialSection {
    fn default() -> Self {
        InitialSection { kind: InitialKind::Constant, mean: 0.0, amplitude: 0.0, seed: 0, mode: 1, path: None }
    }
}

/// `t_max` plus the stepper settings, all in one `[time]` table.
#[derive(Clone, Debug, Serialize)]
pub struct TimeSection {
    pub t_max: f64,
    #[serde(flatten)]
    pub stepper: StepperConfig,
}

impl Default for TimeSection {
    fn default() -> Self {
        TimeSection { t_max: 10.0, stepper: StepperConfig::default() }
    }
}

// `flatten` would silently accept unknown keys, so split the table by hand.
impl<'de> Deserialize<'de> for TimeSection {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let mut table = toml::Table::deserialize(d)?;
        let t_max = match table.remove("t_max") {
            Some(v) => f64::deserialize(v).map_err(D::Error::custom)?,
            None => TimeSection::default().t_max,
        };
        let stepper = StepperConfig::deserialize(toml::Value::Table(table)).map_err(D::Error::custom)?;
        Ok(TimeSection { t_max, stepper })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum SeedSection {
    Constant,
    /// Layers at `centers` (fractions of the first side length).
    Tanh { centers: Vec<f64>, width: f64, amplitude: f64 },
    /// The configured initial datum.
    Initial,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EquilibriumSection {
    pub seeds: Vec<SeedSection>,
    pub tol: f64,
    pub max_iter: usize,
    pub pseudo_shift: f64,
}

impl Default for EquilibriumSection {
    fn default() -> Self {
        let o = SolverOptions::<f64>::default();
        EquilibriumSection {
            seeds: vec![
                SeedSection::Constant,
                SeedSection::Tanh { centers: vec![0.5], width: 0.05, amplitude: 0.9 },
                SeedSection::Tanh { centers: vec![0.25, 0.75], width: 0.05, amplitude: 0.9 },
                SeedSection::Initial,
            ],
            tol: o.tol,
            max_iter: o.max_iter,
            pseudo_shift: o.pseudo_shift,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SnapshotFormat {
    /// Header plus one grid row per line (`.dat`).
    #[default]
    Rows,
    /// Header plus one value per line (`.csv`).
    Column,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    /// Run directory, relative to the output root unless absolute.
    pub dir: PathBuf,
    pub snapshot_format: SnapshotFormat,
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection { dir: PathBuf::from("runs/default"), snapshot_format: SnapshotFormat::Rows }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub grid: GridSection,
    #[serde(default)]
    pub potential: PotentialSection,
    #[serde(default)]
    pub mobility: MobilitySection,
    #[serde(default)]
    pub diffusion: DiffusionSection,
    #[serde(default)]
    pub kernel: Option<KernelSection>,
    #[serde(default)]
    pub model: ModelSection,
    #[serde(default)]
    pub initial: InitialSection,
    #[serde(default)]
    pub time: TimeSection,
    #[serde(default)]
    pub analysis: AnalysisConfig,
    #[serde(default)]
    pub equilibrium: EquilibriumSection,
    #[serde(default)]
    pub output: OutputSection,
}

/// Serialises to JSON with object keys sorted, so the text is independent of
/// the order of keys in the source file.
pub fn canonical_json<T: Serialize>(value: &T) -> String {
    fn sort(v: serde_json::Value) -> serde_json::Value {
        match v {
            serde_json::Value::Object(map) => {
                let sorted: BTreeMap<String, serde_json::Value> = map.into_iter().map(|(k, v)| (k, sort(v))).collect();
                serde_json::Value::Object(sorted.into_iter().collect())
            }
            serde_json::Value::Array(items) => serde_json::Value::Array(items.into_iter().map(sort).collect()),
            other => other,
        }
    }
    let v = serde_json::to_value(value).expect("configuration serialises to JSON");
    serde_json::to_string(&sort(v)).expect("JSON value serialises")
}

impl ExperimentConfig {
    /// Parses and validates `text`; relative file references are resolved
    /// against `base`.
    pub fn from_toml(text: &str, origin: &Path, base: &Path) -> Result<Self, ConfigError> {
        let mut cfg: ExperimentConfig =
            toml::from_str(text).map_err(|e| ConfigError::Parse { path: origin.to_path_buf(), message: e.to_string() })?;
        if let Some(p) = &cfg.initial.path {
            if p.is_relative() {
                cfg.initial.path = Some(base.join(p));
            }
        }
        cfg.resolve()?;
        Ok(cfg)
    }

    /// Fills in defaults that depend on other fields, then validates.
    pub fn resolve(&mut self) -> Result<(), ConfigError> {
        if self.grid.length.is_empty() {
            self.grid.length = vec![1.0; self.grid.n.len()];
        }
        let m = &self.model;
        if m.preset.is_none() && [m.alpha, m.beta, m.gamma, m.sigma1, m.sigma2].iter().all(Option::is_none) {
            self.model.preset = Some(Preset::ChNonlinear);
        }
        if let Some(preset) = self.model.preset {
            let t = preset.table();
            let fill = |slot: &mut Option<f64>, positive: bool, default: f64| {
                if slot.is_none() {
                    *slot = Some(if positive { default } else { 0.0 });
                }
            };
            fill(&mut self.model.alpha, t.alpha_positive, 1.0);
            fill(&mut self.model.beta, t.beta_positive, 1.0);
            fill(&mut self.model.gamma, t.gamma_positive, 0.01);
            fill(&mut self.model.sigma1, true, f64::from(t.sigma1));
            fill(&mut self.model.sigma2, true, f64::from(t.sigma2));
        }
        self.validate()
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.grid()?;
        self.model()?;
        let init = &self.initial;
        if !(init.mean.abs() < 1.0) {
            return Err(invalid(format!(
                "initial.mean = {} violates the admissible-mean constraint |k| < 1",
                init.mean
            )));
        }
        if !(init.amplitude >= 0.0) {
            return Err(invalid("initial.amplitude must be nonnegative"));
        }
        match init.kind {
            InitialKind::CosinePerturbation | InitialKind::RandomAdmissible => {
                if !(init.mean.abs() + init.amplitude < 1.0) {
                    return Err(invalid(format!(
                        "|initial.mean| + initial.amplitude = {} must stay below 1 so that |phi0| < 1",
                        init.mean.abs() + init.amplitude
                    )));
                }
            }
            InitialKind::File => {
                let p = init.path.as_ref().ok_or_else(|| invalid("initial.kind = \"file\" needs initial.path"))?;
                if !p.is_file() {
                    return Err(invalid(format!("initial.path {} does not exist", p.display())));
                }
            }
            InitialKind::Constant => {}
        }
        if init.kind == InitialKind::CosinePerturbation && init.mode == 0 {
            return Err(invalid("initial.mode must be at least 1"));
        }
        self.time.stepper.validate().map_err(|e| invalid(format!("[time]: {e}")))?;
        if !(self.time.t_max > 0.0) || !self.time.t_max.is_finite() {
            return Err(invalid("time.t_max must be positive"));
        }
        let a = &self.analysis;
        if a.m_values.is_empty() || a.m_values.iter().any(|&m| !(m > 0.0)) {
            return Err(invalid("analysis.m_values must be a non-empty list of positive numbers"));
        }
        if a.deltas.iter().any(|&d| !(d > 0.0 && d <= 1.0)) {
            return Err(invalid("analysis.deltas must lie in (0, 1]"));
        }
        if !(self.equilibrium.tol > 0.0) || self.equilibrium.seeds.is_empty() {
            return Err(invalid("equilibrium needs a positive tol and at least one seed"));
        }
        Ok(())
    }

    pub fn grid(&self) -> Result<Grid<f64>, ConfigError> {
        let g = &self.grid;
        if g.n.len() != g.length.len() {
            return Err(invalid("grid.n and grid.length must have the same number of entries"));
        }
        Grid::new(&g.n, &g.length, g.bc).map_err(|e| invalid(format!("[grid]: {e}")))
    }

    pub fn potential(&self) -> Result<PotentialSpec<f64>, ConfigError> {
        let p = &self.potential;
        let spec = PotentialSpec::logarithmic(p.theta, p.theta0).map_err(|e| invalid(format!("[potential]: {e}")))?;
        match p.guard {
            Some(g) => spec.with_guard(g).map_err(|e| invalid(format!("[potential]: {e}"))),
            None => Ok(spec),
        }
    }

    pub fn model(&self) -> Result<ModelConfig<f64>, ConfigError> {
        let mob = &self.mobility;
        let mobility = match mob.kind {
            ProfileKind::Constant => MobilitySpec::constant(mob.m_star),
            ProfileKind::Poly => MobilitySpec::new(Profile::Poly(mob.coeffs.clone()), mob.m_star),
        }
        .map_err(|e| invalid(format!("[mobility]: {e}")))?;
        let dif = &self.diffusion;
        let diffusion = match dif.kind {
            ProfileKind::Constant => DiffusionSpec::constant(dif.a_star),
            ProfileKind::Poly => DiffusionSpec::new(Profile::Poly(dif.coeffs.clone()), dif.a_star),
        }
        .map_err(|e| invalid(format!("[diffusion]: {e}")))?;
        let kernel = match &self.kernel {
            None => None,
            Some(k) => Some(
                match k.kind {
                    KernelKindName::Gaussian => KernelSpec::gaussian(k.scale, k.support),
                    KernelKindName::Tophat => KernelSpec::tophat(k.scale, k.support),
                }
                .map_err(|e| invalid(format!("[kernel]: {e}")))?,
            ),
        };
        let m = &self.model;
        let need = |v: Option<f64>, name: &str| v.ok_or_else(|| invalid(format!("model.{name} is required without a preset")));
        let cfg = ModelConfig {
            alpha: need(m.alpha, "alpha")?,
            beta: need(m.beta, "beta")?,
            gamma: need(m.gamma, "gamma")?,
            sigma1: need(m.sigma1, "sigma1")?,
            sigma2: need(m.sigma2, "sigma2")?,
            potential: self.potential()?,
            mobility,
            diffusion,
            kernel,
            nonlocal_consistency: m.nonlocal_consistency,
            mobility_average: mob.average,
        };
        match m.preset {
            Some(p) => cfg.validate_preset(p),
            None => cfg.validate(),
        }
        .map_err(|e| invalid(format!("[model]: {e}")))?;
        Ok(cfg)
    }

    /// The initial datum. Random data is centred and scaled so that its mean
    /// is `k` and its deviation never exceeds the amplitude.
    pub fn initial_field(&self) -> anyhow::Result<Field<f64>> {
        let g = self.grid()?;
        let init = &self.initial;
        let (k, amp) = (init.mean, init.amplitude);
        let phi = match init.kind {
            InitialKind::Constant => Field::constant(g, k),
            InitialKind::CosinePerturbation => {
                let pi = std::f64::consts::PI;
                // Half-periods fit Neumann boxes, full periods periodic ones.
                let w = if g.bc() == BoundaryMode::Periodic { 2.0 } else { 1.0 } * pi * init.mode as f64;
                let (lx, ly) = (g.length(0), if g.dim() == 2 { g.length(1) } else { 1.0 });
                let two_d = g.dim() == 2;
                Field::from_fn(g, |x| {
                    let c = (w * x[0] / lx).cos();
                    k + amp * if two_d { c * (w * x[1] / ly).cos() } else { c }
                })
            }
            InitialKind::RandomAdmissible => {
                let mut rng = ChaCha8Rng::seed_from_u64(init.seed);
                let noise: Vec<f64> = (0..g.cell_count()).map(|_| rng.gen_range(-1.0..=1.0)).collect();
                let mean = noise.iter().sum::<f64>() / noise.len() as f64;
                let centred: Vec<f64> = noise.iter().map(|v| v - mean).collect();
                let peak = centred.iter().fold(0.0f64, |a, v| a.max(v.abs()));
                let scale = if peak > 0.0 { amp / peak } else { 0.0 };
                Field::new(g, centred.iter().map(|v| k + scale * v).collect())?
            }
            InitialKind::File => {
                let path = init.path.as_ref().expect("validated");
                let phi: Field<f64> = phasefield::io::read_snapshot(path)?;
                if !phi.grid().same_as(&g) {
                    anyhow::bail!("snapshot {} does not match the configured grid", path.display());
                }
                phi
            }
        };
        if !(phi.sup_norm() < 1.0) {
            anyhow::bail!("initial datum reaches |phi| = {} (must stay below 1)", phi.sup_norm());
        }
        Ok(phi)
    }

    pub fn seeds(&self, g: Grid<f64>) -> anyhow::Result<Vec<Seed<f64>>> {
        let lx = g.length(0);
        self.equilibrium
            .seeds
            .iter()
            .map(|s| {
                Ok(match s {
                    SeedSection::Constant => Seed::Constant,
                    SeedSection::Tanh { centers, width, amplitude } => Seed::TanhLayers {
                        centers: centers.iter().map(|c| c * lx).collect(),
                        width: width * lx,
                        amplitude: *amplitude,
                    },
                    SeedSection::Initial => Seed::Field { id: "initial".into(), phi: self.initial_field()? },
                })
            })
            .collect()
    }

    pub fn solver_options(&self) -> SolverOptions<f64> {
        let e = &self.equilibrium;
        SolverOptions { tol: e.tol, max_iter: e.max_iter, pseudo_shift: e.pseudo_shift, ..SolverOptions::default() }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("configuration serialises to TOML")
    }

    /// Hex SHA-256 of the canonical JSON of the resolved configuration.
    pub fn digest(&self) -> String {
        hex::encode(Sha256::digest(canonical_json(self).as_bytes()))
    }
}

pub fn load(path: &Path) -> Result<ExperimentConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read { path: path.to_path_buf(), source })?;
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    ExperimentConfig::from_toml(&text, path, &base)
}

/// The directory a run writes to: `output.dir` under `PHASEFIELD_OUTPUT_ROOT`
/// when that variable is set.
pub fn output_dir(cfg: &ExperimentConfig) -> PathBuf {
    match std::env::var_os(OUTPUT_ROOT_ENV) {
        Some(root) if !cfg.output.dir.is_absolute() => PathBuf::from(root).join(&cfg.output.dir),
        _ => cfg.output.dir.clone(),
    }
}

pub const OUTPUT_ROOT_ENV: &str = "PHASEFIELD_OUTPUT_ROOT";

fn sibling_dir(cfg: &ExperimentConfig, suffix: &str) -> PathBuf {
    let dir = output_dir(cfg);
    let name = dir.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_else(|| "run".into());
    dir.with_file_name(format!("{name}-{suffix}"))
}

/// Equilibrium runs go next to the simulation run: `<output dir>-equilibria`.
pub fn equilibrium_dir(cfg: &ExperimentConfig) -> PathBuf {
    sibling_dir(cfg, "equilibria")
}

pub fn sweep_dir(cfg: &ExperimentConfig) -> PathBuf {
    sibling_dir(cfg, "sweep")
}
