//! Field snapshots: a JSON header `<stem>.json` next to raw little-endian
//! `f64` samples `<stem>.bin`, row-major over `(x_1, …, x_{2n})` with
//! components stored one after another.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::grid::TorusGrid;
use crate::scalar::Real;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SnapshotHeader {
    pub n: usize,
    #[serde(rename = "N")]
    pub size: usize,
    pub field: String,
    pub time: f64,
    #[serde(default = "one")]
    pub components: usize,
    #[serde(default = "dtype")]
    pub dtype: String,
}

fn one() -> usize {
    1
}

fn dtype() -> String {
    "f64le".into()
}

#[derive(Debug, thiserror::Error)]
pub enum SnapshotError {
    #[error("snapshot i/o: {0}")]
    Io(#[from] io::Error),
    #[error("snapshot header: {0}")]
    Header(#[from] serde_json::Error),
    #[error("snapshot payload has {found} values, header implies {expected}")]
    Length { expected: usize, found: usize },
    #[error("unsupported snapshot dtype {0}")]
    Dtype(String),
}

fn paths(stem: &Path) -> (PathBuf, PathBuf) {
    (stem.with_extension("json"), stem.with_extension("bin"))
}

/// Writes one or more component fields under a common header.
pub fn write<T: Real>(stem: &Path, grid: TorusGrid, field: &str, time: f64, comps: &[&[T]]) -> Result<(), SnapshotError> {
    let header = SnapshotHeader {
        n: grid.n,
        size: grid.size,
        field: field.to_string(),
        time,
        components: comps.len(),
        dtype: dtype(),
    };
    let (hp, bp) = paths(stem);
    if let Some(dir) = hp.parent() {
        fs::create_dir_all(dir)?;
    }
    fs::write(&hp, serde_json::to_string_pretty(&header)?)?;
    let mut bytes = Vec::with_capacity(comps.len() * grid.len() * 8);
    for c in comps {
        assert_eq!(c.len(), grid.len());
        for &v in c.iter() {
            bytes.extend_from_slice(&v.to_f64().to_le_bytes());
        }
    }
    fs::write(bp, bytes)?;
    Ok(())
}

/// Reads a snapshot; returns the header and one vector per component.
pub fn read<T: Real>(stem: &Path) -> Result<(SnapshotHeader, Vec<Vec<T>>), SnapshotError> {
    let (hp, bp) = paths(stem);
    let header: SnapshotHeader = serde_json::from_str(&fs::read_to_string(hp)?)?;
    if header.dtype != "f64le" {
        return Err(SnapshotError::Dtype(header.dtype));
    }
    let grid = TorusGrid::new(header.n, header.size);
    let bytes = fs::read(bp)?;
    let expected = header.components * grid.len();
    if bytes.len() != expected * 8 {
        return Err(SnapshotError::Length { expected, found: bytes.len() / 8 });
    }
    let vals: Vec<T> = bytes
        .chunks_exact(8)
        .map(|c| T::lit(f64::from_le_bytes(c.try_into().expect("8 bytes"))))
        .collect();
    let comps = vals.chunks(grid.len()).map(|c| c.to_vec()).collect();
    Ok((header, comps))
}
