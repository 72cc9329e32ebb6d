//! `.raw` volumes with a JSON sidecar.
//!
//! Payload: little-endian `f32`, row-major with x fastest, components
//! interleaved per voxel. The sidecar lives next to the payload with a
//! `.json` extension.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{Dims, ScalarField, VectorField};
use crate::error::{Error, Result};

pub const DTYPE_F32LE: &str = "f32le";
pub const ORDER_X_FASTEST: &str = "x-fastest";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawMeta {
    pub dims: [usize; 3],
    pub components: usize,
    pub dtype: String,
    pub order: String,
}

impl RawMeta {
    pub fn new(dims: Dims, components: usize) -> Self {
        Self {
            dims: dims.as_array(),
            components,
            dtype: DTYPE_F32LE.to_string(),
            order: ORDER_X_FASTEST.to_string(),
        }
    }

    fn validate(&self, components: usize) -> Result<Dims> {
        if self.dtype != DTYPE_F32LE {
            return Err(Error::Format(format!("unsupported dtype {:?}", self.dtype)));
        }
        if self.order != ORDER_X_FASTEST {
            return Err(Error::Format(format!("unsupported order {:?}", self.order)));
        }
        if self.components != components {
            return Err(Error::Format(format!(
                "expected {components} components, sidecar declares {}",
                self.components
            )));
        }
        let [nx, ny, nz] = self.dims;
        Dims::new(nx, ny, nz).map_err(|e| Error::Format(e.to_string()))
    }

    fn byte_len(&self) -> usize {
        self.dims.iter().product::<usize>() * self.components * 4
    }
}

/// `volume.raw` -> `volume.json`
pub fn sidecar_path(raw: &Path) -> PathBuf {
    raw.with_extension("json")
}

pub fn read_sidecar(raw: &Path) -> Result<RawMeta> {
    let path = sidecar_path(raw);
    let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::Format(format!("{}: {e}", path.display())))
}

fn write_sidecar(raw: &Path, meta: &RawMeta) -> Result<()> {
    let path = sidecar_path(raw);
    let text = serde_json::to_string_pretty(meta)?;
    fs::write(&path, text).map_err(|e| Error::io(&path, e))
}

fn read_payload(path: &Path, meta: &RawMeta) -> Result<Vec<f32>> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    if bytes.len() != meta.byte_len() {
        return Err(Error::Format(format!(
            "{}: {} bytes on disk, {:?}x{} components needs {}",
            path.display(),
            bytes.len(),
            meta.dims,
            meta.components,
            meta.byte_len()
        )));
    }
    Ok(bytes
        .chunks_exact(4)
        .map(|b| f32::from_le_bytes([b[0], b[1], b[2], b[3]]))
        .collect())
}

fn write_payload(path: &Path, values: impl Iterator<Item = f32>) -> Result<()> {
    let bytes: Vec<u8> = values.flat_map(f32::to_le_bytes).collect();
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

/// Reads a 3-component volume described by `meta`.
pub fn load_raw(path: &Path, meta: &RawMeta) -> Result<VectorField> {
    let dims = meta.validate(3)?;
    let values = read_payload(path, meta)?;
    let data = values.chunks_exact(3).map(|c| [c[0], c[1], c[2]]).collect();
    VectorField::new(dims, data)
}

/// Writes the payload and its sidecar.
pub fn save_raw(field: &VectorField, path: &Path) -> Result<()> {
    write_payload(path, field.data().iter().flatten().copied())?;
    write_sidecar(path, &RawMeta::new(field.dims(), 3))
}

pub fn load_scalar_raw(path: &Path, meta: &RawMeta) -> Result<ScalarField> {
    let dims = meta.validate(1)?;
    ScalarField::new(dims, read_payload(path, meta)?)
}

pub fn save_scalar_raw(field: &ScalarField, path: &Path) -> Result<()> {
    write_payload(path, field.data().iter().copied())?;
    write_sidecar(path, &RawMeta::new(field.dims(), 1))
}
