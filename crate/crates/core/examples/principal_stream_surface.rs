//! Train against the principal normal of the flow instead of the flow itself.
//!
//! The principal normal `N` of every voxel is computed from the Jacobian of
//! the field; the network is then asked for `grad f` parallel to `N`. For a
//! rigid rotation the level sets should come out as coaxial cylinders, so the
//! learned `f` is checked against the distance from the rotation axis.
//!
//! ```text
//! cargo run --release --example principal_stream_surface -- [iterations] [out.vtk]
//! ```

use std::path::PathBuf;

use streamfn::export::{sample_grid, write_vtk};
use streamfn::net::{Architecture, GradientFunction};
use streamfn::train::LrSchedule;
use streamfn::volume::{frenet_normal, gen_analytic, Dims};
use streamfn::{err_volume, train, LossKind, TrainConfig};

fn main() -> streamfn::Result<()> {
    let mut args = std::env::args().skip(1);
    let iterations: usize = args.next().map_or(Ok(1000), |s| s.parse()).expect("iterations");
    let out = PathBuf::from(args.next().unwrap_or_else(|| "pss_rigid_rotation.vtk".into()));

    let field = gen_analytic("rigid_rotation", Dims::cube(32)?, &Default::default())?;
    let mut architecture = Architecture::new(4, 128)?;
    architecture.omega0 = 3.0;
    let config = TrainConfig {
        loss: LossKind::Pss,
        iterations,
        batch_size: Some(1000),
        architecture,
        schedule: LrSchedule { lr0: 1e-4, factor: 10.0, every: iterations.div_ceil(3) },
        log_every: 0,
        ..TrainConfig::default()
    };
    let (net, _) = train(&field, &config)?;
    let (_, stats) = err_volume(&net, &field)?;
    println!("Err_perp median {:.3} deg, mean {:.3} deg", stats.median_deg, stats.mean_deg);

    let (normals, _) = frenet_normal(&field)?;
    let points: Vec<[f64; 3]> = field.dims().coords().collect();
    let bundles = net.eval_with_grad_batch(&points)?;
    let mut to_normal = Vec::new();
    let mut by_radius = Vec::new();
    for ((p, b), n) in points.iter().zip(&bundles).zip(normals.data()) {
        let n = n.map(f64::from);
        let (gn, nn) = (norm(b.grad), norm(n));
        if gn > 0.0 && nn > 0.0 {
            let cos = (b.grad[0] * n[0] + b.grad[1] * n[1] + b.grad[2] * n[2]) / (gn * nn);
            to_normal.push(cos.abs().min(1.0).acos().to_degrees());
        }
        let r = p[0].hypot(p[1]);
        if (0.1..0.9).contains(&r) {
            by_radius.push((r, b.value));
        }
    }
    to_normal.sort_by(f64::total_cmp);
    println!("median angle between grad f and N: {:.3} deg", to_normal[to_normal.len() / 2]);

    // f should be monotone in the radius: compare mean f over the inner and outer shells
    by_radius.sort_by(|a, b| a.0.total_cmp(&b.0));
    let quarter = by_radius.len() / 4;
    let mean = |s: &[(f64, f64)]| s.iter().map(|x| x.1).sum::<f64>() / s.len() as f64;
    println!(
        "mean f near the axis {:.4}, far from it {:.4}",
        mean(&by_radius[..quarter]),
        mean(&by_radius[by_radius.len() - quarter..])
    );

    write_vtk(&sample_grid(&net, Dims::cube(64)?)?, "stream_function", &out)?;
    println!("wrote {}", out.display());
    Ok(())
}

fn norm(v: [f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}
