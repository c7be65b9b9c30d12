//! Command-line runner: configuration files, run directories and manifests
//! around the `phasefield` core.
//!
//! Exit status is 0 when every assertion of the command passed, 1 when a run
//! finished but an assertion failed, and 2 on errors (bad input, I/O).

pub mod commands;
pub mod config;
pub mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::commands::{AnalyzeOverrides, Axis};
use crate::manifest::RunManifest;

#[derive(Debug, Parser)]
#[command(name = "phasefield", version, about = "Phase-field gradient flows with singular potentials")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Integrate the model and write diagnostics, snapshots and a manifest.
    Simulate {
        config: PathBuf,
        /// Replace an existing output directory.
        #[arg(long)]
        force: bool,
    },
    /// Solve for equilibria from every seed in the library; results go to
    /// `<output dir>-equilibria`.
    Equilibrium {
        config: PathBuf,
        #[arg(long)]
        force: bool,
    },
    /// Run the analysis battery on a finished simulate directory.
    Analyze {
        run_dir: PathBuf,
        /// Good-time thresholds, replacing `analysis.m_values`.
        #[arg(long = "M", value_delimiter = ',', num_args = 1..)]
        m: Option<Vec<f64>>,
        /// Level-set thresholds, replacing `analysis.deltas`.
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        delta: Option<Vec<f64>>,
    },
    /// Evaluate the De Giorgi and integrability lemmas directly.
    #[command(subcommand)]
    Lemmas(Lemma),
    /// Run the configuration over the cartesian product of the axes.
    Sweep {
        config: PathBuf,
        /// `key=v1,v2,…` with a dotted key such as `model.gamma`; repeatable.
        #[arg(long, required = true)]
        axis: Vec<Axis>,
        /// Sweep directory; defaults to `<output dir>-sweep`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
pub enum Lemma {
    /// Threshold and bound table for `y_{n+1} <= C b^n y_n^{1+eps}`.
    Degiorgi {
        #[arg(long, short = 'c')]
        c: f64,
        #[arg(long, short = 'b')]
        b: f64,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        y0: f64,
        #[arg(long, short = 'n', default_value_t = 10)]
        n: u32,
        #[arg(long)]
        json: bool,
    },
    /// Tail-integrability check on a CSV trace of `Z(t)`.
    Integrability {
        trace: PathBuf,
        #[arg(long)]
        alpha: f64,
        /// Defaults to the smallest admissible value.
        #[arg(long)]
        zeta: Option<f64>,
        #[arg(long, default_value = "t")]
        time_column: String,
        /// Defaults to the first column other than the time column.
        #[arg(long)]
        column: Option<String>,
        #[arg(long)]
        json: bool,
    },
}

fn report(m: &RunManifest, dir: &std::path::Path) -> ExitCode {
    for a in &m.assertions {
        println!("{}  {}: {}", if a.passed { "PASS" } else { "FAIL" }, a.name, a.detail);
    }
    println!("{} files written to {}", m.files.len() + 1, dir.display());
    if m.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    Ok(match cli.command {
        Command::Simulate { config, force } => {
            let cfg = config::load(&config)?;
            let dir = config::output_dir(&cfg);
            report(&commands::simulate(&cfg, &dir, force)?, &dir)
        }
        Command::Equilibrium { config, force } => {
            let cfg = config::load(&config)?;
            let dir = config::equilibrium_dir(&cfg);
            report(&commands::equilibrium(&cfg, &dir, force)?, &dir)
        }
        Command::Analyze { run_dir, m, delta } => {
            let (manifest, _) = commands::analyze(&run_dir, &AnalyzeOverrides { m_values: m, deltas: delta })?;
            report(&manifest, &run_dir.join(commands::analyze::ANALYSIS_DIR))
        }
        Command::Lemmas(Lemma::Degiorgi { c, b, eps, y0, n, json }) => {
            let table = commands::lemmas::degiorgi(c, b, eps, y0, n)?;
            if json {
                println!("{}", serde_json::to_string_pretty(&table)?);
            } else {
                print!("{}", table.render());
            }
            if table.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Command::Lemmas(Lemma::Integrability { trace, alpha, zeta, time_column, column, json }) => {
            let (t, z) = commands::lemmas::read_trace(&trace, &time_column, column.as_deref())?;
            let out = commands::lemmas::integrability(&t, &z, alpha, zeta)?;
            if json {
                println!("{}", serde_json::to_string_pretty(&out)?);
            } else {
                print!("{}", out.render());
            }
            if out.report.holds {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Command::Sweep { config, axis, out } => {
            let text = std::fs::read_to_string(&config)?;
            let dir = match out {
                Some(d) => d,
                None => config::sweep_dir(&config::load(&config)?),
            };
            report(&commands::sweep(&text, &config, &dir, &axis)?, &dir)
        }
    })
}

/// Runs a parsed command line and maps the outcome to an exit status.
pub fn execute(cli: Cli) -> ExitCode {
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
