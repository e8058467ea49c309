//! CSV emission. Floats are written with 12 significant digits.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::harness::compare::CdfComparison;
use crate::harness::sweep::SweepResult;

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn write_rows(path: &Path, header: &str, rows: impl Iterator<Item = String>) -> Result<()> {
    let file = File::create(path).map_err(io_err(path))?;
    let mut w = BufWriter::new(file);
    writeln!(w, "{header}").map_err(io_err(path))?;
    for row in rows {
        writeln!(w, "{row}").map_err(io_err(path))?;
    }
    w.flush().map_err(io_err(path))
}

pub fn fmt(x: f64) -> String {
    format!("{x:.11e}")
}

/// `mi_nats,empirical_cdf,analytical_cdf`
pub fn write_cdf_csv(path: &Path, comparison: &CdfComparison) -> Result<()> {
    let rows = (0..comparison.grid.len()).map(|i| {
        format!(
            "{},{},{}",
            fmt(comparison.grid[i]),
            fmt(comparison.empirical[i]),
            fmt(comparison.analytical[i])
        )
    });
    write_rows(path, "mi_nats,empirical_cdf,analytical_cdf", rows)
}

/// `tilt_deg,mean_mi_nats,mi_at_cdf_level`
pub fn write_sweep_csv(path: &Path, sweep: &SweepResult) -> Result<()> {
    let rows = sweep
        .rows
        .iter()
        .map(|r| format!("{},{},{}", fmt(r.tilt_deg), fmt(r.mean_mi), fmt(r.mi_at_level)));
    write_rows(path, "tilt_deg,mean_mi_nats,mi_at_cdf_level", rows)
}

#[derive(Debug, Clone, PartialEq)]
pub struct MomentRow {
    pub quantity: String,
    pub monte_carlo: f64,
    pub analytical: f64,
}

impl MomentRow {
    pub fn relative_error(&self) -> f64 {
        (self.monte_carlo - self.analytical).abs() / self.analytical.abs()
    }
}

/// `quantity,monte_carlo,analytical,relative_error`
pub fn write_moments_csv(path: &Path, rows: &[MomentRow]) -> Result<()> {
    let lines = rows.iter().map(|r| {
        format!(
            "{},{},{},{}",
            r.quantity,
            fmt(r.monte_carlo),
            fmt(r.analytical),
            fmt(r.relative_error())
        )
    });
    write_rows(path, "quantity,monte_carlo,analytical,relative_error", lines)
}
