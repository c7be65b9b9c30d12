//! Direct access to the two lemma utilities: the De Giorgi decay threshold
//! and the tail-integrability checker.

use std::fmt::Write as _;
use std::path::Path;

use anyhow::{bail, Context};
use phasefield::analysis::{degiorgi_predict, degiorgi_threshold, integrability_check, minimal_zeta, IntegrabilityReport};
use serde::Serialize;

#[derive(Clone, Debug, Serialize)]
pub struct DeGiorgiRow {
    pub n: u32,
    /// Worst case allowed by the recursion: `y_{n+1} = C bⁿ y_n^{1+ε}`.
    pub recursion: f64,
    /// The lemma's bound `θ b^{−n/ε}`.
    pub bound: f64,
    pub holds: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct DeGiorgiTable {
    pub c: f64,
    pub b: f64,
    pub eps: f64,
    pub y0: f64,
    pub threshold: f64,
    pub applies: bool,
    pub rows: Vec<DeGiorgiRow>,
}

impl DeGiorgiTable {
    pub fn passed(&self) -> bool {
        self.applies && self.rows.iter().all(|r| r.holds)
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "C = {}, b = {}, eps = {}, y0 = {}", self.c, self.b, self.eps, self.y0);
        let _ = writeln!(s, "threshold = {:e}", self.threshold);
        if !self.applies {
            let _ = writeln!(s, "y0 exceeds the threshold; the lemma does not apply");
            return s;
        }
        let _ = writeln!(s, "{:>4}  {:>24}  {:>24}  holds", "n", "recursion", "bound");
        for r in &self.rows {
            let _ = writeln!(s, "{:>4}  {:>24e}  {:>24e}  {}", r.n, r.recursion, r.bound, r.holds);
        }
        s
    }
}

pub fn degiorgi(c: f64, b: f64, eps: f64, y0: f64, n_max: u32) -> anyhow::Result<DeGiorgiTable> {
    let threshold = degiorgi_threshold(c, b, eps)?;
    let applies = y0 <= threshold;
    let mut rows = Vec::new();
    if applies {
        let mut y = y0;
        for n in 0..=n_max {
            let bound = degiorgi_predict(y0, c, b, eps, n)?;
            // Relative slack for the rounding of the two evaluation orders.
            rows.push(DeGiorgiRow { n, recursion: y, bound, holds: y <= bound * (1.0 + 1e-12) });
            y = c * b.powi(n as i32) * y.powf(1.0 + eps);
        }
    }
    Ok(DeGiorgiTable { c, b, eps, y0, threshold, applies, rows })
}

#[derive(Clone, Debug, Serialize)]
pub struct IntegrabilityOutcome {
    pub samples: usize,
    /// Smallest `ζ` for which the hypothesis holds on the trace.
    pub minimal_zeta: f64,
    pub report: IntegrabilityReport<f64>,
}

impl IntegrabilityOutcome {
    pub fn render(&self) -> String {
        let r = &self.report;
        let mut s = String::new();
        let _ = writeln!(s, "samples = {}, alpha = {}, zeta = {:e}", self.samples, r.alpha, r.zeta);
        let _ = writeln!(s, "minimal zeta = {:e}", self.minimal_zeta);
        let _ = writeln!(s, "integral of Z^2 = {:e}", r.y_total);
        match (r.holds, r.first_violation, r.integral) {
            (true, _, Some(i)) => {
                let _ = writeln!(s, "hypothesis holds; integral of Z = {i:e}");
            }
            (_, Some(t), _) => {
                let _ = writeln!(s, "hypothesis fails first at t = {t:e}");
            }
            _ => {
                let _ = writeln!(s, "hypothesis fails");
            }
        }
        s
    }
}

fn column(header: &csv::StringRecord, name: &str) -> anyhow::Result<usize> {
    header.iter().position(|h| h.trim() == name).with_context(|| format!("trace has no column `{name}`"))
}

/// Reads `(t, Z)` from a CSV trace. Without `value_column` the first column
/// other than the time column is used.
pub fn read_trace(path: &Path, time_column: &str, value_column: Option<&str>) -> anyhow::Result<(Vec<f64>, Vec<f64>)> {
    let mut r = csv::Reader::from_path(path).with_context(|| format!("reading {}", path.display()))?;
    let header = r.headers()?.clone();
    let ti = column(&header, time_column)?;
    let zi = match value_column {
        Some(name) => column(&header, name)?,
        None => (0..header.len()).find(|&i| i != ti).context("trace needs a value column")?,
    };
    let (mut t, mut z) = (Vec::new(), Vec::new());
    for (line, rec) in r.records().enumerate() {
        let rec = rec?;
        let parse = |i: usize| -> anyhow::Result<f64> {
            let cell = rec.get(i).unwrap_or("").trim();
            cell.parse().with_context(|| format!("{} row {}: `{cell}` is not a number", path.display(), line + 1))
        };
        t.push(parse(ti)?);
        z.push(parse(zi)?);
    }
    if t.len() < 2 {
        bail!("{} needs at least two samples", path.display());
    }
    Ok((t, z))
}

/// Checks the tail hypothesis on every sample; `zeta = None` uses the
/// smallest admissible value.
pub fn integrability(times: &[f64], z: &[f64], alpha: f64, zeta: Option<f64>) -> anyhow::Result<IntegrabilityOutcome> {
    let mask = vec![true; z.len()];
    let min_zeta = minimal_zeta(times, z, alpha, &mask)?;
    let zeta = match zeta {
        Some(v) => v,
        None if min_zeta.is_finite() && min_zeta > 0.0 => min_zeta,
        None => bail!("no finite zeta satisfies the hypothesis on this trace (minimal zeta = {min_zeta:e})"),
    };
    let report = integrability_check(times, z, alpha, zeta, &mask)?;
    Ok(IntegrabilityOutcome { samples: z.len(), minimal_zeta: min_zeta, report })
}
