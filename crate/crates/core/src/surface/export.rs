use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use super::{ClosureDefect, SurfaceMesh};
use crate::error::{Error, Result};

/// Wavefront OBJ: one `v` per grid point (row-major), one quad `f` per grid cell.
pub fn write_obj<W: Write>(mesh: &SurfaceMesh, mut w: W) -> Result<()> {
    let (rows, cols) = mesh.dims();
    writeln!(w, "# {} lambda0={} H={}", mesh.descriptor, mesh.lambda0, mesh.h)?;
    for p in &mesh.points {
        writeln!(w, "v {:.17e} {:.17e} {:.17e}", p.x[0], p.x[1], p.x[2])?;
    }
    let idx = |i: usize, j: usize| i * cols + j + 1;
    for i in 0..rows - 1 {
        for j in 0..cols - 1 {
            writeln!(w, "f {} {} {} {}", idx(i, j), idx(i + 1, j), idx(i + 1, j + 1), idx(i, j + 1))?;
        }
    }
    Ok(())
}

pub fn write_points_csv<W: Write>(mesh: &SurfaceMesh, mut w: W) -> Result<()> {
    let (_, cols) = mesh.dims();
    writeln!(w, "i,j,x,y,z")?;
    for (k, p) in mesh.points.iter().enumerate() {
        writeln!(w, "{},{},{:.17e},{:.17e},{:.17e}", k / cols, k % cols, p.x[0], p.x[1], p.x[2])?;
    }
    Ok(())
}

/// Writes `path` (OBJ) and the same path with extension `csv`; returns both paths.
pub fn export_mesh(mesh: &SurfaceMesh, path: &Path) -> Result<(PathBuf, PathBuf)> {
    let csv = path.with_extension("csv");
    let mut obj = BufWriter::new(File::create(path)?);
    write_obj(mesh, &mut obj)?;
    obj.flush()?;
    let mut c = BufWriter::new(File::create(&csv)?);
    write_points_csv(mesh, &mut c)?;
    c.flush()?;
    Ok((path.to_path_buf(), csv))
}

/// Read back a point CSV: (rows, cols, row-major points).
pub fn read_points_csv(path: &Path) -> Result<(usize, usize, Vec<[f64; 3]>)> {
    let r = BufReader::new(File::open(path)?);
    let mut out: Vec<(usize, usize, [f64; 3])> = Vec::new();
    for (n, line) in r.lines().enumerate() {
        let line = line?;
        if n == 0 || line.trim().is_empty() {
            continue;
        }
        let parse_err = |message: String| Error::Parse { line: n + 1, message };
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 5 {
            return Err(parse_err(format!("expected 5 fields, found {}", f.len())));
        }
        let i = f[0].trim().parse::<usize>().map_err(|e| parse_err(e.to_string()))?;
        let j = f[1].trim().parse::<usize>().map_err(|e| parse_err(e.to_string()))?;
        let mut x = [0.0; 3];
        for k in 0..3 {
            x[k] = f[k + 2].trim().parse::<f64>().map_err(|e| parse_err(e.to_string()))?;
        }
        out.push((i, j, x));
    }
    let rows = out.iter().map(|p| p.0 + 1).max().unwrap_or(0);
    let cols = out.iter().map(|p| p.1 + 1).max().unwrap_or(0);
    if rows * cols != out.len() {
        return Err(Error::Parse { line: 0, message: format!("{} points do not fill a {rows}×{cols} grid", out.len()) });
    }
    let mut pts = vec![[0.0; 3]; rows * cols];
    for (i, j, x) in out {
        pts[i * cols + j] = x;
    }
    Ok((rows, cols, pts))
}

/// CSV `radius,defect` (plus `predicted` when the monodromy prediction is present).
pub fn export_defects_csv(d: &ClosureDefect, path: &Path) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    match &d.predicted {
        Some(p) => {
            writeln!(w, "radius,defect,predicted")?;
            for ((r, x), q) in d.table.iter().zip(p) {
                writeln!(w, "{r:.17e},{x:.17e},{q:.17e}")?;
            }
        }
        None => {
            writeln!(w, "radius,defect")?;
            for (r, x) in &d.table {
                writeln!(w, "{r:.17e},{x:.17e}")?;
            }
        }
    }
    w.flush()?;
    Ok(())
}
