//! Fit a stream function to a rigid rotation about the z axis and report how
//! far the learned gradient is from perpendicular to the flow.
//!
//! ```text
//! cargo run --release --example train_rigid_rotation -- [iterations] [width] [omega0]
//! ```
//!
//! The defaults are a 32^3 grid, two residual blocks of width 128, 1000 voxels
//! per batch and a learning rate of 1e-4 divided by ten after each third of the run.

use std::time::Instant;

use streamfn::net::Architecture;
use streamfn::train::LrSchedule;
use streamfn::volume::{gen_analytic, Dims};
use streamfn::{err_volume, train, TrainConfig};

fn main() -> streamfn::Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let mut args = std::env::args().skip(1);
    let iterations: usize = args.next().map_or(Ok(2000), |s| s.parse()).expect("iterations");
    let width = args.next().map_or(Ok(128), |s| s.parse()).expect("width");
    let omega0 = args.next().map_or(Ok(OMEGA0), |s| s.parse()).expect("omega0");

    let field = gen_analytic("rigid_rotation", Dims::cube(32)?, &Default::default())?;
    let mut architecture = Architecture::new(4, width)?;
    architecture.omega0 = omega0;
    let config = TrainConfig {
        iterations,
        batch_size: Some(1000),
        architecture,
        schedule: LrSchedule { lr0: 1e-4, factor: 10.0, every: iterations.div_ceil(3) },
        log_every: 250,
        ..TrainConfig::default()
    };
    let start = Instant::now();
    let (net, history) = train(&field, &config)?;
    let elapsed = start.elapsed().as_secs_f64();
    let (_, stats) = err_volume(&net, &field)?;

    let first = history.first().map_or(f64::NAN, |r| r.total);
    let last = history.last().map_or(f64::NAN, |r| r.total);
    println!("loss {first:.4e} -> {last:.4e} in {elapsed:.1}s");
    println!(
        "Err_perp median {:.4} deg, mean {:.4} deg, max {:.3} deg",
        stats.median_deg, stats.mean_deg, stats.max_deg
    );
    Ok(())
}

const OMEGA0: f64 = 3.0;
