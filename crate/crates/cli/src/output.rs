//! CSV and JSON artifacts. Floats are written with 17 significant digits so
//! that reading a file back reproduces the in-memory values exactly.

use std::path::Path;

use serde::Serialize;

use crate::error::{CliError, CliResult};

pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_csv<I>(path: &Path, header: &[String], rows: I) -> CliResult<()>
where
    I: IntoIterator<Item = Vec<String>>,
{
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_json<V: Serialize>(path: &Path, value: &V) -> CliResult<()> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    std::fs::write(path, s)?;
    Ok(())
}

/// Header and numeric rows of a CSV written by [`write_csv`].
pub fn read_csv(path: &Path) -> CliResult<(Vec<String>, Vec<Vec<f64>>)> {
    let mut r = csv::Reader::from_path(path)?;
    let header = r.headers()?.iter().map(str::to_owned).collect();
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let row = rec
            .iter()
            .map(|f| {
                f.parse::<f64>()
                    .map_err(|e| CliError::Validation(format!("{}: bad number {f:?}: {e}", path.display())))
            })
            .collect::<CliResult<Vec<_>>>()?;
        rows.push(row);
    }
    Ok((header, rows))
}

/// Column names for a point of dimension `dim`: `x, y` in 2-D, else
/// `x0, x1, ...`. `prefix` is prepended to each.
pub fn coord_names(prefix: &str, dim: usize) -> Vec<String> {
    if dim == 2 {
        vec![format!("{prefix}x"), format!("{prefix}y")]
    } else {
        (0..dim).map(|i| format!("{prefix}x{i}")).collect()
    }
}

pub fn ensure_dir(dir: &Path) -> CliResult<()> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))
}
