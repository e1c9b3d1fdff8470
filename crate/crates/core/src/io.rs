//! CSV and JSON export. Floats are written with 17 significant digits, enough
//! to round-trip any `f64`.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{Field, GridSpec, Profile1D};
use crate::walls::ZeroSet;

fn io_error(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.display().to_string(),
        source,
    }
}

fn with_file(path: &Path, body: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>) -> Result<()> {
    let file = File::create(path).map_err(io_error(path))?;
    let mut out = BufWriter::new(file);
    body(&mut out).and_then(|_| out.flush()).map_err(io_error(path))
}

/// `x1,x2,u`, one row per node, `x1` varying fastest.
pub fn write_field_csv(out: &mut impl Write, u: &Field) -> std::io::Result<()> {
    writeln!(out, "x1,x2,u")?;
    let g = &u.grid;
    for j in 0..g.ny {
        for i in 0..g.nx {
            writeln!(out, "{:.16e},{:.16e},{:.16e}", g.x1(i), g.x2(j), u.get(i, j))?;
        }
    }
    Ok(())
}

/// `polyline_id,x1,x2`; an empty zero set leaves only the header.
pub fn write_zero_set_csv(out: &mut impl Write, z: &ZeroSet) -> std::io::Result<()> {
    writeln!(out, "polyline_id,x1,x2")?;
    for (id, line) in z.polylines.iter().enumerate() {
        for p in &line.points {
            writeln!(out, "{id},{:.16e},{:.16e}", p[0], p[1])?;
        }
    }
    Ok(())
}

/// `s,y`.
pub fn write_profile_csv(out: &mut impl Write, profile: &Profile1D) -> std::io::Result<()> {
    writeln!(out, "s,y")?;
    for (s, y) in profile.nodes() {
        writeln!(out, "{s:.16e},{y:.16e}")?;
    }
    Ok(())
}

pub fn save_field_csv(path: &Path, u: &Field) -> Result<()> {
    with_file(path, |out| write_field_csv(out, u))
}

pub fn save_zero_set_csv(path: &Path, z: &ZeroSet) -> Result<()> {
    with_file(path, |out| write_zero_set_csv(out, z))
}

pub fn save_profile_csv(path: &Path, profile: &Profile1D) -> Result<()> {
    with_file(path, |out| write_profile_csv(out, profile))
}

/// Pretty-printed JSON followed by a newline.
pub fn save_json(path: &Path, value: &impl Serialize) -> Result<()> {
    with_file(path, |out| {
        serde_json::to_writer_pretty(&mut *out, value)?;
        writeln!(out)
    })
}

/// Reads a field written by [`write_field_csv`] and checks it against `grid`.
pub fn load_field_csv(path: &Path, grid: GridSpec) -> Result<Field> {
    let file = File::open(path).map_err(io_error(path))?;
    let bad = |line: usize, what: &str| Error::InvalidConfig(format!("{}:{line}: {what}", path.display()));
    let mut values = Vec::with_capacity(grid.len());
    for (k, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(io_error(path))?;
        if k == 0 {
            if line.trim() != "x1,x2,u" {
                return Err(bad(1, "expected header x1,x2,u"));
            }
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 3 {
            return Err(bad(k + 1, "expected 3 columns"));
        }
        let parsed: std::result::Result<Vec<f64>, _> = cols.iter().map(|c| c.trim().parse::<f64>()).collect();
        let row = parsed.map_err(|e| bad(k + 1, &e.to_string()))?;
        let n = values.len();
        if n >= grid.len() {
            return Err(bad(k + 1, "more rows than grid nodes"));
        }
        let (i, j) = (n % grid.nx, n / grid.nx);
        let tol = 1e-9 * grid.half_extent;
        if (row[0] - grid.x1(i)).abs() > tol || (row[1] - grid.x2(j)).abs() > tol {
            return Err(bad(k + 1, "node coordinates do not match the grid"));
        }
        values.push(row[2]);
    }
    Field::from_values(grid, values)
}
