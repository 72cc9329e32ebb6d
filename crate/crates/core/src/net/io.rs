//! Model files.
//!
//! Binary layout, all little-endian:
//!
//! ```text
//! magic        4 bytes  "SNFN"
//! version      u32
//! hidden       u32      hidden sine layers
//! width        u32
//! omega0       f64
//! seed         u64
//! count        u64      number of parameters
//! params       count x f32
//! ```
//!
//! A JSON manifest with the same stem sits next to the binary.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Architecture, StreamNet};
use crate::error::{Error, Result};

pub const MODEL_MAGIC: &[u8; 4] = b"SNFN";
pub const MODEL_VERSION: u32 = 1;
const HEADER_LEN: usize = 40;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelManifest {
    pub format_version: u32,
    pub architecture: Architecture,
    pub seed: u64,
    pub param_count: usize,
    /// Free-form record of how the model was produced (config, input hashes).
    #[serde(default)]
    pub provenance: serde_json::Value,
}

pub fn to_bytes(net: &StreamNet) -> Vec<u8> {
    let arch = net.arch();
    let mut out = Vec::with_capacity(HEADER_LEN + 4 * net.params().len());
    out.extend_from_slice(MODEL_MAGIC);
    out.extend_from_slice(&MODEL_VERSION.to_le_bytes());
    out.extend_from_slice(&(arch.hidden_layers as u32).to_le_bytes());
    out.extend_from_slice(&(arch.width as u32).to_le_bytes());
    out.extend_from_slice(&arch.omega0.to_le_bytes());
    out.extend_from_slice(&net.seed().to_le_bytes());
    out.extend_from_slice(&(net.params().len() as u64).to_le_bytes());
    for p in net.params() {
        out.extend_from_slice(&p.to_le_bytes());
    }
    out
}

pub fn from_bytes(bytes: &[u8]) -> Result<StreamNet> {
    if bytes.len() < HEADER_LEN {
        return Err(Error::Format(format!("model file too short ({} bytes)", bytes.len())));
    }
    if &bytes[..4] != MODEL_MAGIC {
        return Err(Error::Format("bad magic; not a stream function model".into()));
    }
    let u32_at = |o: usize| u32::from_le_bytes(bytes[o..o + 4].try_into().expect("4 bytes"));
    let u64_at = |o: usize| u64::from_le_bytes(bytes[o..o + 8].try_into().expect("8 bytes"));
    let version = u32_at(4);
    if version != MODEL_VERSION {
        return Err(Error::Format(format!("unsupported model version {version}")));
    }
    let arch = Architecture {
        hidden_layers: u32_at(8) as usize,
        width: u32_at(12) as usize,
        omega0: f64::from_bits(u64_at(16)),
    };
    arch.validate().map_err(|e| Error::Format(e.to_string()))?;
    let seed = u64_at(24);
    let count = u64_at(32) as usize;
    if count != arch.param_count() {
        return Err(Error::Format(format!(
            "header declares {count} parameters, architecture needs {}",
            arch.param_count()
        )));
    }
    let payload = &bytes[HEADER_LEN..];
    if payload.len() != 4 * count {
        return Err(Error::Format(format!(
            "payload is {} bytes, expected {}",
            payload.len(),
            4 * count
        )));
    }
    let params: Vec<f32> = payload
        .chunks_exact(4)
        .map(|b| f32::from_le_bytes([b[0], b[1], b[2], b[3]]))
        .collect();
    if params.iter().any(|p| !p.is_finite()) {
        return Err(Error::Format("model contains non-finite parameters".into()));
    }
    StreamNet::from_params(arch, seed, params)
}

/// Writes the binary model and its JSON manifest (`model.snf` + `model.json`).
pub fn serialize(net: &StreamNet, path: &Path, provenance: serde_json::Value) -> Result<()> {
    fs::write(path, to_bytes(net)).map_err(|e| Error::io(path, e))?;
    let manifest = ModelManifest {
        format_version: MODEL_VERSION,
        architecture: net.arch(),
        seed: net.seed(),
        param_count: net.params().len(),
        provenance,
    };
    let mpath = path.with_extension("json");
    fs::write(&mpath, serde_json::to_string_pretty(&manifest)?).map_err(|e| Error::io(&mpath, e))
}

pub fn deserialize(path: &Path) -> Result<StreamNet> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    from_bytes(&bytes)
}

pub fn read_manifest(model_path: &Path) -> Result<ModelManifest> {
    let mpath = model_path.with_extension("json");
    let text = fs::read_to_string(&mpath).map_err(|e| Error::io(&mpath, e))?;
    serde_json::from_str(&text).map_err(|e| Error::Format(format!("{}: {e}", mpath.display())))
}
