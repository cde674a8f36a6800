//! CSV and summary artifacts, written atomically.
//!
//! Every file is first written to a temporary file in the target directory and
//! renamed into place, so a failed run never leaves a partial artifact.

use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use tempfile::NamedTempFile;

use crate::error::{Error, Result};
use crate::flow::OrbitRecord;
use crate::grid::{BoolMask, GridFunction, TorusGrid};
use crate::semigroup::EvolveRecord;

/// Writes `bytes` to `path` through a temporary file and a rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    fs::create_dir_all(dir)?;
    let mut tmp = NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

fn csv_bytes(header: &[&str], rows: impl Iterator<Item = Vec<String>>) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let map = |e: csv::Error| Error::Parse(e.to_string());
    w.write_record(header).map_err(map)?;
    for row in rows {
        w.write_record(&row).map_err(map)?;
    }
    w.into_inner().map_err(|e| Error::Parse(e.to_string()))
}

/// Shortest round-trip representation, so exports are lossless and stable.
fn num(v: f64) -> String {
    format!("{v:?}")
}

fn coord_header(grid: &TorusGrid) -> Vec<&'static str> {
    if grid.dim() == 1 {
        vec!["x"]
    } else {
        vec!["x", "y"]
    }
}

fn coord_cells(grid: &TorusGrid, idx: usize) -> Vec<String> {
    grid.coords(idx)[..grid.dim()].iter().map(|&c| num(c)).collect()
}

/// Grid function as `x[,y],value`, one row per node in row-major order.
pub fn grid_csv(f: &GridFunction) -> Result<Vec<u8>> {
    let grid = *f.grid();
    let mut header = coord_header(&grid);
    header.push("value");
    csv_bytes(
        &header,
        (0..grid.len()).map(|i| {
            let mut row = coord_cells(&grid, i);
            row.push(num(f.get(i)));
            row
        }),
    )
}

pub fn write_grid_function(path: &Path, f: &GridFunction) -> Result<()> {
    write_atomic(path, &grid_csv(f)?)
}

/// Mask as `x[,y],flag` with flags 0/1.
pub fn mask_csv(mask: &BoolMask) -> Result<Vec<u8>> {
    let grid = *mask.grid();
    let mut header = coord_header(&grid);
    header.push("flag");
    csv_bytes(
        &header,
        (0..grid.len()).map(|i| {
            let mut row = coord_cells(&grid, i);
            row.push(u8::from(mask.get(i)).to_string());
            row
        }),
    )
}

pub fn write_mask(path: &Path, mask: &BoolMask) -> Result<()> {
    write_atomic(path, &mask_csv(mask)?)
}

/// Reads a grid function written by [`write_grid_function`] onto `grid`.
pub fn read_grid_function(path: &Path, grid: TorusGrid) -> Result<GridFunction> {
    let mut rdr = csv::Reader::from_path(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    let col = grid.dim();
    let mut values = Vec::with_capacity(grid.len());
    for rec in rdr.records() {
        let rec = rec.map_err(|e| Error::Parse(e.to_string()))?;
        let cell = rec
            .get(col)
            .ok_or_else(|| Error::Parse(format!("{}: row with {} columns", path.display(), rec.len())))?;
        let v: f64 = cell.trim().parse().map_err(|_| Error::Parse(format!("{}: bad value {cell:?}", path.display())))?;
        values.push(v);
    }
    if values.len() != grid.len() {
        return Err(Error::Parse(format!("{}: {} rows for a grid of {}", path.display(), values.len(), grid.len())));
    }
    GridFunction::new(grid, values)
}

/// Orbit as `t,x,u,p,H` (1-D) or `t,x1,x2,u,p1,p2,H` (2-D).
pub fn orbit_csv(rec: &OrbitRecord) -> Result<Vec<u8>> {
    let dim = rec.states[0].dim;
    let header: &[&str] = if dim == 1 { &["t", "x", "u", "p", "H"] } else { &["t", "x1", "x2", "u", "p1", "p2", "H"] };
    csv_bytes(
        header,
        rec.times.iter().zip(&rec.states).zip(&rec.h_values).map(|((&t, s), &h)| {
            let mut row = vec![num(t)];
            row.extend(s.x[..dim].iter().map(|&v| num(v)));
            row.push(num(s.u));
            row.extend(s.p[..dim].iter().map(|&v| num(v)));
            row.push(num(h));
            row
        }),
    )
}

pub fn write_orbit(path: &Path, rec: &OrbitRecord) -> Result<()> {
    write_atomic(path, &orbit_csv(rec)?)
}

/// Ordered `key = value` lines.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Summary {
    entries: Vec<(String, String)>,
}

impl Summary {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn put(&mut self, key: impl Into<String>, value: impl ToString) -> &mut Self {
        self.entries.push((key.into(), value.to_string()));
        self
    }

    pub fn num(&mut self, key: impl Into<String>, value: f64) -> &mut Self {
        self.put(key, format!("{value:e}"))
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn entries(&self) -> &[(String, String)] {
        &self.entries
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.entries {
            let _ = writeln!(out, "{k} = {v}");
        }
        out
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        write_atomic(path, self.render().as_bytes())
    }
}

/// Snapshots as `<stem>_0000.csv, …` plus `<stem>_manifest.csv` (`index,t,file,sup_norm`).
pub fn write_evolve_record(dir: &Path, stem: &str, rec: &EvolveRecord) -> Result<Vec<PathBuf>> {
    let mut files = Vec::with_capacity(rec.snapshots.len() + 1);
    let mut rows = Vec::with_capacity(rec.snapshots.len());
    for (i, (snap, &t)) in rec.snapshots.iter().zip(&rec.times).enumerate() {
        let name = format!("{stem}_{i:04}.csv");
        let path = dir.join(&name);
        write_grid_function(&path, snap)?;
        rows.push(vec![i.to_string(), num(t), name, num(rec.sup_norms[i])]);
        files.push(path);
    }
    let manifest = dir.join(format!("{stem}_manifest.csv"));
    write_atomic(&manifest, &csv_bytes(&["index", "t", "file", "sup_norm"], rows.into_iter())?)?;
    files.push(manifest);
    Ok(files)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flow::integrate;
    use crate::model::{ContactModel, PhasePoint};

    #[test]
    fn grid_round_trip_is_lossless() {
        let g = TorusGrid::new(2, 5).unwrap();
        let f = GridFunction::from_fn(g, |x| (x[0] * 3.1).sin() + x[1] / 7.0);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("f.csv");
        write_grid_function(&path, &f).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("x,y,value\n0.0,0.0,"));
        assert_eq!(text.lines().count(), 26);
        assert_eq!(read_grid_function(&path, g).unwrap(), f);
    }

    #[test]
    fn read_rejects_wrong_size() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("f.csv");
        write_grid_function(&path, &GridFunction::constant(TorusGrid::new(1, 8).unwrap(), 1.0)).unwrap();
        assert!(matches!(read_grid_function(&path, TorusGrid::new(1, 9).unwrap()), Err(Error::Parse(_))));
        assert!(read_grid_function(&dir.path().join("missing.csv"), TorusGrid::new(1, 8).unwrap()).is_err());
    }

    #[test]
    fn mask_and_orbit_layout() {
        let g = TorusGrid::new(1, 4).unwrap();
        let text = String::from_utf8(mask_csv(&BoolMask::single(g, 2)).unwrap()).unwrap();
        assert_eq!(text, "x,flag\n0.0,0\n0.25,0\n0.5,1\n0.75,0\n");

        let rec = integrate(&ContactModel::example_well(), &PhasePoint::new(&[0.0], 0.0, &[0.0]), 0.01, 1e-3).unwrap();
        let text = String::from_utf8(orbit_csv(&rec).unwrap()).unwrap();
        assert_eq!(text.lines().next(), Some("t,x,u,p,H"));
        assert_eq!(text.lines().count(), 12);
    }

    #[test]
    fn summary_renders_in_order() {
        let mut s = Summary::new();
        s.put("status", "ok").num("residual", 1.5e-7);
        assert_eq!(s.render(), "status = ok\nresidual = 1.5e-7\n");
        assert_eq!(s.get("residual"), Some("1.5e-7"));
    }

    #[test]
    fn evolve_export_writes_manifest() {
        let g = TorusGrid::new(1, 8).unwrap();
        let f = GridFunction::constant(g, 1.0);
        let rec = EvolveRecord { times: vec![0.0, 0.5], snapshots: vec![f.clone(), f], sup_norms: vec![1.0, 1.0] };
        let dir = tempfile::tempdir().unwrap();
        let files = write_evolve_record(dir.path(), "u", &rec).unwrap();
        assert_eq!(files.len(), 3);
        let manifest = fs::read_to_string(dir.path().join("u_manifest.csv")).unwrap();
        assert_eq!(manifest, "index,t,file,sup_norm\n0,0.0,u_0000.csv,1.0\n1,0.5,u_0001.csv,1.0\n");
    }
}
