//! Raw buffer dumps: `<stem>.bin` holds the scalars as little-endian `f64`,
//! `<stem>.hdr` a small text header followed by the hierarchy dump.
//!
//! ```text
//! scalar_width=8
//! length=523
//!
//! decision_variables[branch,523]@0
//!   X[branch,403]@0
//!   ...
//! ```

use std::fs;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::variable::Hierarchy;

#[derive(Debug, Error)]
pub enum BufferIoError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("malformed buffer header: {0}")]
    Format(String),
    #[error("buffer does not match the hierarchy: {0}")]
    Mismatch(String),
}

const SCALAR_WIDTH: usize = std::mem::size_of::<f64>();

fn paths(stem: &Path) -> (PathBuf, PathBuf) {
    (stem.with_extension("bin"), stem.with_extension("hdr"))
}

pub fn header(hierarchy: &Hierarchy, len: usize) -> String {
    format!("scalar_width={SCALAR_WIDTH}\nlength={len}\n\n{}", hierarchy.render())
}

pub fn encode(data: &[f64]) -> Vec<u8> {
    data.iter().flat_map(|v| v.to_le_bytes()).collect()
}

pub fn decode(bytes: &[u8]) -> Result<Vec<f64>, BufferIoError> {
    if !bytes.len().is_multiple_of(SCALAR_WIDTH) {
        return Err(BufferIoError::Format(format!("{} bytes is not a whole number of scalars", bytes.len())));
    }
    Ok(bytes.chunks_exact(SCALAR_WIDTH).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect())
}

/// Writes `data` and its header next to each other.
pub fn write_buffer(stem: &Path, hierarchy: &Hierarchy, data: &[f64]) -> Result<(), BufferIoError> {
    if data.len() != hierarchy.size() {
        return Err(BufferIoError::Mismatch(format!(
            "{} scalars for a hierarchy of size {}",
            data.len(),
            hierarchy.size()
        )));
    }
    let (bin, hdr) = paths(stem);
    fs::write(hdr, header(hierarchy, data.len()))?;
    fs::write(bin, encode(data))?;
    Ok(())
}

/// Reads a dump back, checking it against `hierarchy`.
pub fn read_buffer(stem: &Path, hierarchy: &Hierarchy) -> Result<Vec<f64>, BufferIoError> {
    let (bin, hdr) = paths(stem);
    let text = fs::read_to_string(hdr)?;
    let (head, tree) =
        text.split_once("\n\n").ok_or_else(|| BufferIoError::Format("missing blank line after the header".into()))?;

    let mut width = None;
    let mut length = None;
    for line in head.lines() {
        let (key, value) =
            line.split_once('=').ok_or_else(|| BufferIoError::Format(format!("expected key=value, got `{line}`")))?;
        let value: usize =
            value.trim().parse().map_err(|_| BufferIoError::Format(format!("`{key}` is not an integer")))?;
        match key.trim() {
            "scalar_width" => width = Some(value),
            "length" => length = Some(value),
            other => return Err(BufferIoError::Format(format!("unknown key `{other}`"))),
        }
    }
    if width != Some(SCALAR_WIDTH) {
        return Err(BufferIoError::Mismatch(format!("scalar width {width:?}, expected {SCALAR_WIDTH}")));
    }
    if length != Some(hierarchy.size()) {
        return Err(BufferIoError::Mismatch(format!("length {length:?}, expected {}", hierarchy.size())));
    }
    if tree != hierarchy.render() {
        return Err(BufferIoError::Mismatch("hierarchy layout differs".into()));
    }

    let data = decode(&fs::read(bin)?)?;
    if data.len() != hierarchy.size() {
        return Err(BufferIoError::Mismatch(format!(
            "{} scalars on disk, header says {}",
            data.len(),
            hierarchy.size()
        )));
    }
    Ok(data)
}
