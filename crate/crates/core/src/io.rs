//! Plain-text field snapshots.
//!
//! A snapshot starts with one header line `nx [ny] hx [hy] bc` followed by the
//! cell values in row-major order (`x` fastest), separated by whitespace. The
//! CSV flavour is the same header with one value per line; the reader accepts
//! both, and commas anywhere in the body.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::grid::{BoundaryMode, Grid};
use crate::scalar::Real;

/// Layout of the value block.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SnapshotLayout {
    /// One grid row per line.
    Rows,
    /// One value per line.
    Column,
}

pub fn format_snapshot<T: Real>(phi: &Field<T>, layout: SnapshotLayout) -> String {
    let g = phi.grid();
    let mut s = String::new();
    if g.dim() == 1 {
        let _ = writeln!(s, "{} {} {}", g.n(0), g.h(0).as_f64(), g.bc().as_str());
    } else {
        let _ = writeln!(
            s,
            "{} {} {} {} {}",
            g.n(0),
            g.n(1),
            g.h(0).as_f64(),
            g.h(1).as_f64(),
            g.bc().as_str()
        );
    }
    match layout {
        SnapshotLayout::Column => {
            for v in phi.values() {
                let _ = writeln!(s, "{}", v.as_f64());
            }
        }
        SnapshotLayout::Rows => {
            for row in phi.values().chunks(g.n(0)) {
                let line: Vec<String> = row.iter().map(|v| v.as_f64().to_string()).collect();
                let _ = writeln!(s, "{}", line.join(" "));
            }
        }
    }
    s
}

pub fn parse_snapshot<T: Real>(text: &str) -> Result<Field<T>> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines.next().ok_or_else(|| Error::Parse("empty snapshot".into()))?;
    let tokens: Vec<&str> = header.split(|c: char| c.is_whitespace() || c == ',').filter(|t| !t.is_empty()).collect();
    let bad = |what: &str| Error::Parse(format!("snapshot header: {what} in `{header}`"));
    let count = |t: &str| t.parse::<usize>().map_err(|_| bad("cell count"));
    let spacing = |t: &str| t.parse::<f64>().map_err(|_| bad("spacing"));
    let grid = match tokens.as_slice() {
        [nx, hx, bc] => {
            let n = count(nx)?;
            Grid::new_1d(n, T::lit(spacing(hx)? * n as f64), bc.parse::<BoundaryMode>()?)?
        }
        [nx, ny, hx, hy, bc] => {
            let (nx, ny) = (count(nx)?, count(ny)?);
            Grid::new_2d(
                nx,
                ny,
                T::lit(spacing(hx)? * nx as f64),
                T::lit(spacing(hy)? * ny as f64),
                bc.parse::<BoundaryMode>()?,
            )?
        }
        _ => return Err(bad("expected `nx [ny] hx [hy] bc`")),
    };
    let mut values = Vec::with_capacity(grid.cell_count());
    for line in lines {
        for tok in line.split(|c: char| c.is_whitespace() || c == ',').filter(|t| !t.is_empty()) {
            let v: f64 = tok.parse().map_err(|_| Error::Parse(format!("bad value `{tok}`")))?;
            values.push(T::lit(v));
        }
    }
    Field::new(grid, values)
}

pub fn write_snapshot<T: Real>(path: &Path, phi: &Field<T>) -> Result<()> {
    let layout = match path.extension().and_then(|e| e.to_str()) {
        Some("csv") => SnapshotLayout::Column,
        _ => SnapshotLayout::Rows,
    };
    std::fs::write(path, format_snapshot(phi, layout))?;
    Ok(())
}

pub fn read_snapshot<T: Real>(path: &Path) -> Result<Field<T>> {
    parse_snapshot(&std::fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_both_layouts() {
        let g = Grid::<f64>::new_2d(3, 2, 0.9, 1.0, BoundaryMode::Neumann).unwrap();
        let phi = Field::from_fn(g, |x| 0.1 * x[0] - 0.37 * x[1] + 1e-17);
        for layout in [SnapshotLayout::Rows, SnapshotLayout::Column] {
            let back: Field<f64> = parse_snapshot(&format_snapshot(&phi, layout)).unwrap();
            assert_eq!(back.values(), phi.values());
            assert!(back.grid().same_as(&g));
        }
    }

    #[test]
    fn one_dimensional_header() {
        let f: Field<f64> = parse_snapshot("4 0.25 periodic\n0.1, 0.2\n0.3 0.4\n").unwrap();
        assert_eq!(f.grid().bc(), BoundaryMode::Periodic);
        assert!((f.grid().length(0) - 1.0).abs() < 1e-15);
        assert_eq!(f.len(), 4);
    }

    #[test]
    fn rejects_short_body() {
        assert!(parse_snapshot::<f64>("4 0.25 neumann\n0.1 0.2\n").is_err());
        assert!(parse_snapshot::<f64>("4 0.25 sticky\n0 0 0 0\n").is_err());
    }
}
