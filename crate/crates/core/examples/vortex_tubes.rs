//! Stream surfaces of the vorticity field rather than the velocity.
//!
//! The curl of Hill's spherical vortex is computed with central differences;
//! its field lines are rings around the symmetry axis, so the level sets of a
//! stream function trained on it are nested vortex tubes. Both the vorticity
//! and the learned function are written as legacy VTK for inspection.
//!
//! ```text
//! cargo run --release --example vortex_tubes -- [iterations] [out_dir]
//! ```

use std::path::PathBuf;

use streamfn::export::{sample_grid, write_vtk, write_vtk_vectors};
use streamfn::net::Architecture;
use streamfn::train::LrSchedule;
use streamfn::volume::{curl, gen_analytic, Dims};
use streamfn::{err_volume, train, TrainConfig};

fn main() -> streamfn::Result<()> {
    let mut args = std::env::args().skip(1);
    let iterations: usize = args.next().map_or(Ok(1000), |s| s.parse()).expect("iterations");
    let dir = PathBuf::from(args.next().unwrap_or_else(|| "vortex_tubes".into()));
    std::fs::create_dir_all(&dir).map_err(|e| streamfn::Error::io(&dir, e))?;

    let velocity = gen_analytic("hill_vortex", Dims::cube(32)?, &Default::default())?;
    let vorticity = curl(&velocity)?;
    let live = vorticity.non_degenerate_indices().len();
    println!("vorticity is nonzero at {live} of {} voxels", vorticity.data().len());

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
    let (net, _) = train(&vorticity, &config)?;
    let (_, stats) = err_volume(&net, &vorticity)?;
    println!(
        "Err_perp against the vorticity: median {:.3} deg, mean {:.3} deg ({} masked)",
        stats.median_deg, stats.mean_deg, stats.masked_voxel_count
    );

    write_vtk_vectors(&vorticity, "vorticity", &dir.join("vorticity.vtk"))?;
    write_vtk(&sample_grid(&net, Dims::cube(128)?)?, "stream_function", &dir.join("tubes.vtk"))?;
    println!("wrote vorticity.vtk and tubes.vtk to {}", dir.display());
    Ok(())
}
