//! CSV storage of grid functions with a JSON sidecar.

use std::fs::File;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{FaceValues, TensorGrid, Weight, WeightedGridFunction};
use crate::{Error, Result};

/// Metadata stored next to the CSV samples.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sidecar {
    pub weight: Weight,
    pub weight_formula: String,
    pub order: u32,
    /// Last node on each axis.
    pub truncation: Vec<f64>,
    pub faces: Vec<FaceValues>,
}

fn sidecar_path(path: &Path) -> PathBuf {
    path.with_extension("json")
}

/// Writes `path` (one row per node: coordinates then value) and the sidecar
/// `path` with extension `.json`.
pub fn write_csv(f: &WeightedGridFunction, path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    let d = f.grid().dim();
    let mut header: Vec<String> = (0..d).map(|a| format!("x{a}")).collect();
    header.push("value".into());
    w.write_record(&header)?;
    for (k, v) in f.samples().iter().enumerate() {
        let mut row: Vec<String> = f.grid().point(k).iter().map(|c| format!("{c:.17e}")).collect();
        row.push(format!("{v:.17e}"));
        w.write_record(&row)?;
    }
    w.flush()?;
    let side = Sidecar {
        weight: f.weight().clone(),
        weight_formula: f.weight().describe(),
        order: f.order(),
        truncation: f.grid().axes().iter().map(|a| a[a.len() - 1]).collect(),
        faces: f.faces().to_vec(),
    };
    serde_json::to_writer_pretty(File::create(sidecar_path(path))?, &side)?;
    Ok(())
}

/// Reads a grid function written by [`write_csv`].
pub fn read_csv(path: &Path) -> Result<WeightedGridFunction> {
    let side: Sidecar = serde_json::from_reader(File::open(sidecar_path(path))?)?;
    let mut r = csv::Reader::from_path(path)?;
    let d = r.headers()?.len().checked_sub(1).filter(|d| *d > 0).ok_or_else(|| {
        Error::InvalidArgument("CSV needs coordinate columns and a value column".into())
    })?;
    let mut coords: Vec<Vec<f64>> = vec![Vec::new(); d];
    let mut values = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let row: Vec<f64> = rec
            .iter()
            .map(|s| s.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::InvalidArgument(format!("bad number in CSV: {e}")))?;
        if row.len() != d + 1 {
            return Err(Error::InvalidArgument(format!("row has {} fields, expected {}", row.len(), d + 1)));
        }
        for a in 0..d {
            coords[a].push(row[a]);
        }
        values.push(row[d]);
    }
    let axes: Vec<Vec<f64>> = coords
        .into_iter()
        .map(|mut c| {
            c.sort_by(f64::total_cmp);
            c.dedup();
            c
        })
        .collect();
    let grid = TensorGrid::new(axes)?;
    if grid.len() != values.len() {
        return Err(Error::InvalidArgument("CSV rows do not form a tensor grid".into()));
    }
    Ok(WeightedGridFunction::new(grid, values, side.weight, side.order)?.with_faces(side.faces))
}
