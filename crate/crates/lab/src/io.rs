//! File formats: field CSVs, diffeomorphism sidecars and JSON reports.

use std::fs;
use std::path::Path;

use bfamily_core::{Diffeo, Grid, ScalarField};
use serde::Serialize;

use crate::error::{LabError, LabResult};

/// Writes `x,value` rows with 17 significant digits.
pub fn write_field(path: &Path, f: &ScalarField) -> LabResult<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_error(path, e))?;
    w.write_record(["x", "value"]).map_err(|e| csv_error(path, e))?;
    let g = f.grid();
    for (j, v) in f.values().iter().enumerate() {
        w.write_record([format!("{:.16e}", g.x(j)), format!("{v:.16e}")])
            .map_err(|e| csv_error(path, e))?;
    }
    w.flush().map_err(|e| LabError::io(path, e))
}

/// Reads a field written by [`write_field`]; the rows must match `grid`.
pub fn read_field(path: &Path, grid: &Grid) -> LabResult<ScalarField> {
    let mut r = csv::Reader::from_path(path).map_err(|e| csv_error(path, e))?;
    let headers = r.headers().map_err(|e| csv_error(path, e))?;
    if headers.len() != 2 || &headers[0] != "x" || &headers[1] != "value" {
        return Err(format_error(path, "expected header `x,value`"));
    }
    let mut values = Vec::with_capacity(grid.n_points());
    for (j, row) in r.records().enumerate() {
        let row = row.map_err(|e| csv_error(path, e))?;
        let parse = |k: usize| {
            row.get(k)
                .and_then(|s| s.trim().parse::<f64>().ok())
                .ok_or_else(|| format_error(path, &format!("row {}: bad number", j + 1)))
        };
        let (x, v) = (parse(0)?, parse(1)?);
        if j < grid.n_points() && (x - grid.x(j)).abs() > 1e-9 * grid.length() {
            return Err(format_error(path, &format!("row {}: x = {x} is not grid point {}", j + 1, grid.x(j))));
        }
        values.push(v);
    }
    if values.len() != grid.n_points() {
        return Err(format_error(
            path,
            &format!("{} rows, grid has {} points", values.len(), grid.n_points()),
        ));
    }
    Ok(ScalarField::new(grid, values)?)
}

#[derive(Serialize)]
struct DiffeoSidecar {
    length: f64,
    n_points: usize,
    min_phi_x: f64,
}

/// Displacement CSV at `stem.csv` plus `{length, n_points, min_phi_x}` at
/// `stem.json`.
pub fn write_diffeo(dir: &Path, stem: &str, phi: &Diffeo) -> LabResult<()> {
    write_field(&dir.join(format!("{stem}.csv")), phi.displacement())?;
    let v = phi.validate(0.0);
    write_json(
        &dir.join(format!("{stem}.json")),
        &DiffeoSidecar {
            length: phi.grid().length(),
            n_points: phi.grid().n_points(),
            min_phi_x: v.min_phi_x,
        },
    )
}

/// Pretty-printed JSON with a trailing newline.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> LabResult<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| format_error(path, &e.to_string()))?;
    text.push('\n');
    fs::write(path, text).map_err(|e| LabError::io(path, e))
}

pub fn create_dir(path: &Path) -> LabResult<()> {
    fs::create_dir_all(path).map_err(|e| LabError::io(path, e))
}

fn csv_error(path: &Path, e: csv::Error) -> LabError {
    if e.is_io_error() {
        match e.into_kind() {
            csv::ErrorKind::Io(io) => LabError::io(path, io),
            _ => unreachable!(),
        }
    } else {
        format_error(path, &e.to_string())
    }
}

fn format_error(path: &Path, message: &str) -> LabError {
    LabError::Format {
        path: path.to_path_buf(),
        message: message.to_string(),
    }
}
