//! Write every built-in analytic field as `.raw` + sidecar and as a legacy
//! VTK vector volume, then print a few statistics about each one.
//!
//! ```text
//! cargo run --release --example generate_field -- [out_dir] [resolution]
//! ```

use std::collections::BTreeMap;
use std::path::PathBuf;

use streamfn::export::write_vtk_vectors;
use streamfn::volume::{curl, gen_analytic, save_raw, Dims, ANALYTIC_NAMES};

fn main() -> streamfn::Result<()> {
    let mut args = std::env::args().skip(1);
    let dir = PathBuf::from(args.next().unwrap_or_else(|| "fields".into()));
    let n: usize = args.next().map_or(Ok(32), |s| s.parse()).expect("resolution");
    std::fs::create_dir_all(&dir).map_err(|e| streamfn::Error::io(&dir, e))?;

    for name in ANALYTIC_NAMES {
        let field = gen_analytic(name, Dims::cube(n)?, &BTreeMap::new())?;
        save_raw(&field, &dir.join(format!("{name}.raw")))?;
        write_vtk_vectors(&field, name, &dir.join(format!("{name}.vtk")))?;

        let speeds: Vec<f32> = field.data().iter().map(|v| v.iter().map(|c| c * c).sum::<f32>().sqrt()).collect();
        let max_speed = speeds.iter().copied().fold(0.0, f32::max);
        let vorticity = curl(&field)?;
        let mean_vort = vorticity
            .data()
            .iter()
            .map(|w| w.iter().map(|c| c * c).sum::<f32>().sqrt())
            .sum::<f32>()
            / vorticity.data().len() as f32;
        println!(
            "{name:>15}: {} voxels, {} degenerate, max |V| {max_speed:.3}, mean |curl V| {mean_vort:.3}",
            field.data().len(),
            field.data().len() - field.non_degenerate_indices().len(),
        );
    }

    // parameters go through the same map the CLI fills from --A/--B/--C
    let params = BTreeMap::from([("A".to_string(), 3f64.sqrt()), ("B".to_string(), 2f64.sqrt()), ("C".to_string(), 1.0)]);
    let abc = gen_analytic("abc", Dims::cube(n)?, &params)?;
    save_raw(&abc, &dir.join("abc_classic.raw"))?;
    println!("wrote {} fields to {}", ANALYTIC_NAMES.len() + 1, dir.display());
    Ok(())
}
