use std::collections::HashMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::global_range;
use crate::error::{Error, Result};
use crate::net::ScalarFunction;
use crate::volume::Dims;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FidelityRow {
    pub resolution: usize,
    /// Mean of `|trilinear(grid) - f|` over the probes, relative to the global range.
    pub mean_abs_dev: f64,
    pub max_abs_dev: f64,
}

/// Compares direct evaluation of `f` against trilinear interpolation of `f`
/// sampled on `r^3` lattices, at `probe_count` uniform random points.
pub fn resample_fidelity<F: ScalarFunction + ?Sized, R: Rng + ?Sized>(
    f: &F,
    resolutions: &[usize],
    probe_count: usize,
    rng: &mut R,
) -> Result<Vec<FidelityRow>> {
    if probe_count == 0 {
        return Err(Error::Usage("need at least one probe".into()));
    }
    let probes: Vec<[f64; 3]> = (0..probe_count)
        .map(|_| [0; 3].map(|_| rng.random_range(-1.0..=1.0)))
        .collect();
    resample_fidelity_at(f, resolutions, &probes)
}

/// [`resample_fidelity`] at caller-chosen probes.
///
/// Only the lattice vertices surrounding the probes are evaluated; the
/// interpolated values are identical to interpolating the full grid.
pub fn resample_fidelity_at<F: ScalarFunction + ?Sized>(
    f: &F,
    resolutions: &[usize],
    probes: &[[f64; 3]],
) -> Result<Vec<FidelityRow>> {
    if resolutions.is_empty() {
        return Err(Error::Usage("no resolutions requested".into()));
    }
    if probes.is_empty() {
        return Err(Error::Usage("need at least one probe".into()));
    }
    let range = global_range(f)?;
    if !(range >= 1e-9) {
        return Err(Error::Data(format!("function is constant (global range {range:e})")));
    }
    let direct = f.eval_batch(probes)?;
    let mut rows = Vec::with_capacity(resolutions.len());
    for &res in resolutions {
        if res < 2 {
            return Err(Error::Usage(format!("resolution must be at least 2, got {res}")));
        }
        let dims = Dims::cube(res)?;
        let stencils = probes
            .iter()
            .map(|&p| dims.trilinear_stencil(p))
            .collect::<Result<Vec<_>>>()?;
        let mut slots: HashMap<usize, usize> = HashMap::new();
        let mut vertices = Vec::new();
        for st in &stencils {
            for &(idx, _) in st {
                slots.entry(idx).or_insert_with(|| {
                    vertices.push(dims.coord_of(idx));
                    vertices.len() - 1
                });
            }
        }
        // grids are stored in single precision
        let values: Vec<f64> = f
            .eval_batch(&vertices)?
            .into_iter()
            .map(|v| f64::from(v as f32))
            .collect();
        let mut sum = 0.0;
        let mut max: f64 = 0.0;
        for (st, &truth) in stencils.iter().zip(&direct) {
            let interp: f64 = st
                .iter()
                .filter(|(_, w)| *w != 0.0)
                .map(|&(idx, w)| w * values[slots[&idx]])
                .sum();
            let dev = (interp - truth).abs() / range;
            sum += dev;
            max = max.max(dev);
        }
        rows.push(FidelityRow {
            resolution: res,
            mean_abs_dev: sum / probes.len() as f64,
            max_abs_dev: max,
        });
    }
    Ok(rows)
}
