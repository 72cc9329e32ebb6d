//! Trace RK4 streamlines through a field and measure how constant a stream
//! function stays along them.
//!
//! With no arguments the exact stream function `x^2 + y^2` of the rigid
//! rotation is checked, which should drift only by integration error. Given a
//! model file (for instance one written by `streamfn train`), the learned
//! function is checked instead.
//!
//! ```text
//! cargo run --release --example trace_streamlines -- [model.snf] [count] [polylines.json]
//! ```

use std::path::PathBuf;

use streamfn::eval::{constancy_check, random_seeds, trace_streamline, ConstancyReport};
use streamfn::net::{deserialize, FnField};
use streamfn::volume::{gen_analytic, Dims};

fn main() -> streamfn::Result<()> {
    let mut args = std::env::args().skip(1);
    let model = args.next().map(PathBuf::from);
    let count: usize = args.next().map_or(Ok(50), |s| s.parse()).expect("count");
    let polylines = args.next().map(PathBuf::from);

    let field = gen_analytic("rigid_rotation", Dims::cube(32)?, &Default::default())?;
    let seeds = random_seeds(&field, count, 0)?;
    let lines = seeds
        .iter()
        .map(|&s| trace_streamline(&field, s, 0.01, 2000))
        .collect::<streamfn::Result<Vec<_>>>()?;
    let steps: usize = lines.iter().map(|l| l.points.len() - 1).sum();
    println!("traced {} streamlines, {steps} RK4 steps", lines.len());

    let report = match &model {
        Some(path) => constancy_check(&deserialize(path)?, &lines)?,
        None => constancy_check(&FnField::new(|p: [f64; 3]| p[0] * p[0] + p[1] * p[1]), &lines)?,
    };
    print_report(&report);

    if let Some(path) = polylines {
        let points: Vec<_> = lines.iter().map(|l| &l.points).collect();
        let text = serde_json::to_string(&points).expect("points serialize");
        std::fs::write(&path, text).map_err(|e| streamfn::Error::io(&path, e))?;
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn print_report(report: &ConstancyReport) {
    let worst = report
        .lines
        .iter()
        .max_by(|a, b| a.relative.total_cmp(&b.relative))
        .expect("at least one line");
    println!("global f range {:.4}", report.global_range);
    println!(
        "relative variation along a line: median {:.2e}, max {:.2e} (seed {:?})",
        report.median_relative, report.max_relative, worst.seed
    );
}
