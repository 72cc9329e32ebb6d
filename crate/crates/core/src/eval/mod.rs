//! Accuracy of a learned stream function.
//!
//! The orthogonality error at a point is the absolute deviation from
//! perpendicular between `grad f` and `V`:
//! `|pi/2 - acos(grad f . V / (|grad f| |V|))|`, in radians, with `grad f`
//! taken analytically from the network. Aggregate statistics are reported
//! in degrees.

mod constancy;
mod resample;
mod streamline;

pub use constancy::{constancy_check, global_range, ConstancyReport, LineConstancy, GLOBAL_RANGE_RES};
pub use resample::{resample_fidelity, resample_fidelity_at, FidelityRow};
pub use streamline::{random_seeds, trace_streamline, Streamline, Termination, STAGNATION_SPEED};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::net::GradientFunction;
use crate::volume::{dot3, norm3, widen, ScalarField, VectorField, DEGENERATE_NORM};

/// Angle between `grad` and the plane orthogonal to `v`, in radians.
/// `None` when either vector is too short to define a direction.
pub fn err_perp_point(grad: [f64; 3], v: [f64; 3]) -> Option<f64> {
    let gn = norm3(grad);
    let vn = norm3(v);
    if gn < DEGENERATE_NORM || vn < DEGENERATE_NORM {
        return None;
    }
    let cos = (dot3(grad, v) / (gn * vn)).clamp(-1.0, 1.0);
    Some((std::f64::consts::FRAC_PI_2 - cos.acos()).abs())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrStats {
    pub median_deg: f64,
    pub mean_deg: f64,
    pub max_deg: f64,
    pub masked_voxel_count: usize,
    pub total_voxels: usize,
}

impl ErrStats {
    /// Statistics of per-voxel errors given in radians; `None` entries are masked.
    pub fn from_radians(errors: &[Option<f64>]) -> Result<Self> {
        let mut deg: Vec<f64> = errors.iter().flatten().map(|e| e.to_degrees()).collect();
        if deg.is_empty() {
            return Err(Error::Data(
                "every voxel is masked (zero gradient or zero vector)".into(),
            ));
        }
        deg.sort_by(f64::total_cmp);
        let n = deg.len();
        let median = if n % 2 == 1 {
            deg[n / 2]
        } else {
            0.5 * (deg[n / 2 - 1] + deg[n / 2])
        };
        Ok(Self {
            median_deg: median,
            mean_deg: deg.iter().sum::<f64>() / n as f64,
            max_deg: deg[n - 1],
            masked_voxel_count: errors.len() - n,
            total_voxels: errors.len(),
        })
    }
}

/// Per-voxel orthogonality error (radians, masked voxels stored as 0) and its statistics.
pub fn err_volume<F: GradientFunction + ?Sized>(net: &F, field: &VectorField) -> Result<(ScalarField, ErrStats)> {
    let dims = field.dims();
    let points: Vec<[f64; 3]> = dims.coords().collect();
    let bundles = net.eval_with_grad_batch(&points)?;
    let errors: Vec<Option<f64>> = bundles
        .iter()
        .zip(field.data())
        .map(|(b, &v)| err_perp_point(b.grad, widen(v)))
        .collect();
    let stats = ErrStats::from_radians(&errors)?;
    let volume = ScalarField::new(dims, errors.iter().map(|e| e.unwrap_or(0.0) as f32).collect())?;
    Ok((volume, stats))
}

/// The same metric with `grad f` estimated by finite differences of a sampled
/// grid instead of taken from the network.
pub fn err_volume_from_grid(samples: &ScalarField, field: &VectorField) -> Result<(ScalarField, ErrStats)> {
    if samples.dims() != field.dims() {
        return Err(Error::Usage(format!(
            "sampled grid {} does not match field {}",
            samples.dims(),
            field.dims()
        )));
    }
    let grad = samples.gradient()?;
    let errors: Vec<Option<f64>> = grad
        .data()
        .iter()
        .zip(field.data())
        .map(|(&g, &v)| err_perp_point(widen(g), widen(v)))
        .collect();
    let stats = ErrStats::from_radians(&errors)?;
    let volume = ScalarField::new(field.dims(), errors.iter().map(|e| e.unwrap_or(0.0) as f32).collect())?;
    Ok((volume, stats))
}
