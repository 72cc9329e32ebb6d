//! Pin the zero isosurface of the learned stream function to a seeding rake.
//!
//! Trains on the ABC flow with the orthogonality loss plus a term that pulls
//! `f` towards zero along a line segment through the cube, then reports how
//! close to zero `f` is on the rake and how much orthogonality was given up.
//!
//! ```text
//! cargo run --release --example seeding_rake -- [iterations] [rake]
//! cargo run --release --example seeding_rake -- 600 segment:-0.5,-0.5,-0.5,0.5,0.5,0.5,256
//! cargo run --release --example seeding_rake -- 600 circle:0,0,0,0.5,0,0,1,128
//! ```

use streamfn::eval::global_range;
use streamfn::net::{Architecture, ScalarFunction};
use streamfn::train::{sample_rake, LrSchedule, RakeSpec};
use streamfn::volume::{gen_analytic, Dims};
use streamfn::{err_volume, train, LossKind, TrainConfig};

fn main() -> streamfn::Result<()> {
    let mut args = std::env::args().skip(1);
    let iterations: usize = args.next().map_or(Ok(1000), |s| s.parse()).expect("iterations");
    let rake: RakeSpec = match args.next() {
        Some(s) => s.parse()?,
        None => RakeSpec::segment([-0.5; 3], [0.5; 3], 256),
    };

    let field = gen_analytic("abc", Dims::cube(32)?, &Default::default())?;
    let mut architecture = Architecture::new(4, 128)?;
    architecture.omega0 = 16.0;
    let base = TrainConfig {
        iterations,
        batch_size: Some(1000),
        architecture,
        schedule: LrSchedule { lr0: 1e-4, factor: 10.0, every: iterations.div_ceil(3) },
        log_every: 0,
        ..TrainConfig::default()
    };

    let (plain, _) = train(&field, &base)?;
    let (pinned, _) = train(&field, &TrainConfig { loss: LossKind::PerpSeeds, rake: Some(rake.clone()), ..base })?;

    let samples = sample_rake(&rake)?;
    for (name, net) in [("perp", &plain), ("perp+seeds", &pinned)] {
        let (_, stats) = err_volume(net, &field)?;
        let values = net.eval_batch(&samples)?;
        let mean_abs = values.iter().map(|v| v.abs()).sum::<f64>() / values.len() as f64;
        println!(
            "{name:>10}: Err_perp median {:.3} deg, mean |f| on rake {:.2}% of range",
            stats.median_deg,
            100.0 * mean_abs / global_range(net)?
        );
    }
    Ok(())
}
