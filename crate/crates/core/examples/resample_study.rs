//! How fine does a sampled grid have to be before trilinear interpolation of
//! it agrees with evaluating the network directly?
//!
//! Trains on the tornado field, then compares interpolated grids at a range of
//! resolutions against direct evaluation at random probe points.
//!
//! ```text
//! cargo run --release --example resample_study -- [iterations] [probes]
//! ```

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use streamfn::eval::resample_fidelity;
use streamfn::net::Architecture;
use streamfn::train::LrSchedule;
use streamfn::volume::{gen_analytic, Dims};
use streamfn::{train, TrainConfig};

fn main() -> streamfn::Result<()> {
    let mut args = std::env::args().skip(1);
    let iterations: usize = args.next().map_or(Ok(600), |s| s.parse()).expect("iterations");
    let probes: usize = args.next().map_or(Ok(10_000), |s| s.parse()).expect("probes");

    let field = gen_analytic("tornado", Dims::cube(32)?, &Default::default())?;
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

    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let rows = resample_fidelity(&net, &[16, 32, 64, 128, 256], probes, &mut rng)?;
    println!("{:>6}  {:>12}  {:>12}", "grid", "mean dev", "max dev");
    for row in rows {
        println!("{:>5}^3  {:>12.3e}  {:>12.3e}", row.resolution, row.mean_abs_dev, row.max_abs_dev);
    }
    println!("(deviations relative to the global range of f)");
    Ok(())
}
