//! Train once, save the model, reload it and write everything ParaView needs:
//! the stream function on a fine grid and the per-voxel orthogonality error,
//! as raw volumes and as legacy VTK.
//!
//! ```text
//! cargo run --release --example export_paraview -- [field] [iterations] [out_dir]
//! ```
//!
//! In ParaView, open `stream_function.vtk` and add a Contour filter; every
//! isosurface is a stream surface of the field.

use std::path::PathBuf;

use streamfn::export::{default_export_dims, export_bundle, ExportOutput, ExportSpec};
use streamfn::net::{deserialize, serialize, Architecture};
use streamfn::train::LrSchedule;
use streamfn::volume::{gen_analytic, Dims};
use streamfn::{train, TrainConfig};

fn main() -> streamfn::Result<()> {
    let mut args = std::env::args().skip(1);
    let name = args.next().unwrap_or_else(|| "tornado".into());
    let iterations: usize = args.next().map_or(Ok(600), |s| s.parse()).expect("iterations");
    let dir = PathBuf::from(args.next().unwrap_or_else(|| "paraview".into()));

    let field = gen_analytic(&name, Dims::cube(32)?, &Default::default())?;
    let mut architecture = Architecture::new(4, 128)?;
    architecture.omega0 = 10.0;
    let config = TrainConfig {
        iterations,
        batch_size: Some(1000),
        architecture,
        schedule: LrSchedule { lr0: 1e-4, factor: 10.0, every: iterations.div_ceil(3) },
        log_every: 0,
        ..TrainConfig::default()
    };
    let (net, _) = train(&field, &config)?;

    std::fs::create_dir_all(&dir).map_err(|e| streamfn::Error::io(&dir, e))?;
    let model = dir.join(format!("{name}.snf"));
    serialize(&net, &model, serde_json::json!({ "field": name, "iterations": iterations }))?;
    let reloaded = deserialize(&model)?;
    assert_eq!(reloaded.params(), net.params());

    let outputs = [ExportOutput::ScalarRaw, ExportOutput::ScalarVtk, ExportOutput::ErrorRaw, ExportOutput::ErrorVtk];
    let spec = ExportSpec::new(default_export_dims(field.dims()), outputs, &dir);
    let manifest = export_bundle(&reloaded, &field, &spec)?;
    for artifact in &manifest.artifacts {
        println!("{:?} {:?} -> {}", artifact.kind, artifact.dims, artifact.path.display());
    }
    if let Some(stats) = manifest.err_stats {
        println!("Err_perp median {:.3} deg, mean {:.3} deg", stats.median_deg, stats.mean_deg);
    }
    println!("manifest {}", manifest.manifest_path.display());
    Ok(())
}
