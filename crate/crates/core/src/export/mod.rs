//! Sampling a trained network onto grids and writing files for external viewers.

mod vtk;

pub use vtk::{read_vtk, write_vtk, write_vtk_vectors, VtkData};

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::eval::{err_volume, ErrStats};
use crate::net::{GradientFunction, ScalarFunction};
use crate::volume::{save_scalar_raw, Dims, ScalarField, VectorField};

pub const EXPORT_MANIFEST_VERSION: u32 = 1;

/// Evaluates `f` at every lattice point of `dims` over `[-1, 1]^3`.
pub fn sample_grid<F: ScalarFunction + ?Sized>(f: &F, dims: Dims) -> Result<ScalarField> {
    if dims.as_array().iter().any(|&n| n < 2) {
        return Err(Error::Usage(format!("export grid needs at least 2 samples per axis, got {dims}")));
    }
    let points: Vec<[f64; 3]> = dims.coords().collect();
    let values = f.eval_batch(&points)?;
    ScalarField::new(dims, values.into_iter().map(|v| v as f32).collect())
}

/// Export resolution used when none is given: four times the training grid per axis.
pub fn default_export_dims(training: Dims) -> Dims {
    Dims {
        nx: training.nx * 4,
        ny: training.ny * 4,
        nz: training.nz * 4,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExportOutput {
    ScalarRaw,
    ScalarVtk,
    ErrorRaw,
    ErrorVtk,
}

impl ExportOutput {
    pub fn needs_error(self) -> bool {
        matches!(self, Self::ErrorRaw | Self::ErrorVtk)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExportSpec {
    pub resolution: Dims,
    pub outputs: BTreeSet<ExportOutput>,
    pub directory: PathBuf,
    /// File stem shared by every written artifact.
    #[serde(default = "default_stem")]
    pub stem: String,
}

fn default_stem() -> String {
    "stream_function".to_string()
}

impl ExportSpec {
    pub fn new(resolution: Dims, outputs: impl IntoIterator<Item = ExportOutput>, directory: impl Into<PathBuf>) -> Self {
        Self {
            resolution,
            outputs: outputs.into_iter().collect(),
            directory: directory.into(),
            stem: default_stem(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExportArtifact {
    pub kind: ExportOutput,
    pub path: PathBuf,
    pub dims: [usize; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExportManifest {
    pub schema_version: u32,
    pub artifacts: Vec<ExportArtifact>,
    /// `[min, max]` of the sampled stream function, when a scalar grid was written.
    pub f_range: Option<[f32; 2]>,
    /// Orthogonality statistics on the training field, when an error volume was written.
    pub err_stats: Option<ErrStats>,
    pub manifest_path: PathBuf,
}

/// Writes the requested artifacts plus `<stem>_manifest.json` into the spec's directory.
pub fn export_bundle<F: GradientFunction + ?Sized>(
    net: &F,
    field: &VectorField,
    spec: &ExportSpec,
) -> Result<ExportManifest> {
    fs::create_dir_all(&spec.directory).map_err(|e| Error::io(&spec.directory, e))?;
    let path = |suffix: &str| spec.directory.join(format!("{}{suffix}", spec.stem));
    let mut artifacts = Vec::new();
    let mut f_range = None;
    let mut err_stats = None;

    let wants = |k: ExportOutput| spec.outputs.contains(&k);
    if wants(ExportOutput::ScalarRaw) || wants(ExportOutput::ScalarVtk) {
        let grid = sample_grid(net, spec.resolution)?;
        let (lo, hi) = grid.range();
        f_range = Some([lo, hi]);
        if wants(ExportOutput::ScalarRaw) {
            let p = path(".raw");
            save_scalar_raw(&grid, &p)?;
            artifacts.push(artifact(ExportOutput::ScalarRaw, p, grid.dims()));
        }
        if wants(ExportOutput::ScalarVtk) {
            let p = path(".vtk");
            write_vtk(&grid, "stream_function", &p)?;
            artifacts.push(artifact(ExportOutput::ScalarVtk, p, grid.dims()));
        }
    }
    if spec.outputs.iter().any(|o| o.needs_error()) {
        let (volume, stats) = err_volume(net, field)?;
        // exported in degrees, like the statistics
        let degrees = ScalarField::new(volume.dims(), volume.data().iter().map(|r| r.to_degrees()).collect())?;
        err_stats = Some(stats);
        if wants(ExportOutput::ErrorRaw) {
            let p = path("_err.raw");
            save_scalar_raw(&degrees, &p)?;
            artifacts.push(artifact(ExportOutput::ErrorRaw, p, degrees.dims()));
        }
        if wants(ExportOutput::ErrorVtk) {
            let p = path("_err.vtk");
            write_vtk(&degrees, "err_perp_deg", &p)?;
            artifacts.push(artifact(ExportOutput::ErrorVtk, p, degrees.dims()));
        }
    }

    let manifest = ExportManifest {
        schema_version: EXPORT_MANIFEST_VERSION,
        artifacts,
        f_range,
        err_stats,
        manifest_path: path("_manifest.json"),
    };
    write_json(&manifest.manifest_path, &manifest)?;
    Ok(manifest)
}

fn artifact(kind: ExportOutput, path: PathBuf, dims: Dims) -> ExportArtifact {
    ExportArtifact {
        kind,
        path,
        dims: dims.as_array(),
    }
}

pub(crate) fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::net::FnField;

    #[test]
    fn two_cubed_grid_hits_cube_corners() {
        let f = FnField::new(|x: [f64; 3]| x[0] + 10.0 * x[1] + 100.0 * x[2]);
        let g = sample_grid(&f, Dims::cube(2).unwrap()).unwrap();
        assert_eq!(g.data(), &[-111.0, -109.0, -91.0, -89.0, 89.0, 91.0, 109.0, 111.0]);
        assert_eq!(sample_grid(&f, Dims::cube(2).unwrap()).unwrap(), g);
        assert!(matches!(sample_grid(&f, Dims::new(1, 4, 4).unwrap()), Err(Error::Usage(_))));
    }

    #[test]
    fn coarse_and_fine_lattices_agree_on_shared_points() {
        let f = FnField::new(|x: [f64; 3]| (2.0 * x[0]).sin() * x[1].cos() + x[2].powi(3));
        let a = sample_grid(&f, Dims::cube(3).unwrap()).unwrap();
        let b = sample_grid(&f, Dims::cube(5).unwrap()).unwrap();
        for k in 0..3 {
            for j in 0..3 {
                for i in 0..3 {
                    assert_eq!(a.get(i, j, k).to_bits(), b.get(2 * i, 2 * j, 2 * k).to_bits());
                }
            }
        }
    }

    fn rigid_setup() -> (VectorField, FnField<impl Fn([f64; 3]) -> f64, impl Fn([f64; 3]) -> [f64; 3]>) {
        let field = VectorField::from_fn(Dims::cube(8).unwrap(), |x| [-x[1], x[0], 0.0]).unwrap();
        // slightly tilted so errors are nonzero
        let f = FnField::with_grad(
            |x: [f64; 3]| x[0] * x[0] + x[1] * x[1] + 0.1 * x[2] + 0.05 * x[0],
            |x: [f64; 3]| [2.0 * x[0] + 0.05, 2.0 * x[1], 0.1],
        );
        (field, f)
    }

    #[test]
    fn scalar_raw_bundle_writes_three_files() {
        let dir = tempfile::tempdir().unwrap();
        let (field, f) = rigid_setup();
        let spec = ExportSpec::new(Dims::cube(32).unwrap(), [ExportOutput::ScalarRaw], dir.path());
        let m = export_bundle(&f, &field, &spec).unwrap();
        assert_eq!(m.artifacts.len(), 1);
        let mut names: Vec<_> = fs::read_dir(dir.path())
            .unwrap()
            .map(|e| e.unwrap().file_name().into_string().unwrap())
            .collect();
        names.sort();
        assert_eq!(names, ["stream_function.json", "stream_function.raw", "stream_function_manifest.json"]);
        assert!(m.f_range.is_some() && m.err_stats.is_none());
    }

    #[test]
    fn error_bundle_embeds_eval_median() {
        let dir = tempfile::tempdir().unwrap();
        let (field, f) = rigid_setup();
        let spec = ExportSpec::new(Dims::cube(4).unwrap(), [ExportOutput::ErrorVtk], dir.path());
        let m = export_bundle(&f, &field, &spec).unwrap();
        let (_, stats) = err_volume(&f, &field).unwrap();
        assert_eq!(m.err_stats.unwrap().median_deg, stats.median_deg);
        let text = fs::read_to_string(&m.manifest_path).unwrap();
        let back: ExportManifest = serde_json::from_str(&text).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn empty_outputs_write_manifest_only() {
        let dir = tempfile::tempdir().unwrap();
        let (field, f) = rigid_setup();
        let spec = ExportSpec::new(Dims::cube(4).unwrap(), [], dir.path());
        let m = export_bundle(&f, &field, &spec).unwrap();
        assert!(m.artifacts.is_empty());
        assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
