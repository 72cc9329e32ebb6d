//! Closed-form vector fields used as training inputs and test oracles.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use super::{Dims, VectorField};
use crate::error::{Error, Result};

pub const ANALYTIC_NAMES: [&str; 4] = ["rigid_rotation", "abc", "hill_vortex", "tornado"];

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AnalyticField {
    /// `V = (-y, x, 0)` scaled by `omega`.
    RigidRotation { omega: f64 },
    /// Arnold-Beltrami-Childress flow on its periodic cell `[0, 2pi]^3`.
    Abc { a: f64, b: f64, c: f64 },
    /// Hill's spherical vortex of the given radius, in the frame moving with it.
    HillVortex { radius: f64, speed: f64 },
    /// Crawfis' tornado on `[0, 1]^3` at the given time step.
    Tornado { time: f64 },
}

impl AnalyticField {
    /// Builds a generator from its name and `key=value` overrides.
    pub fn from_name(name: &str, params: &BTreeMap<String, f64>) -> Result<Self> {
        let (mut field, allowed): (Self, &[&str]) = match name {
            "rigid_rotation" => (Self::RigidRotation { omega: 1.0 }, &["omega"]),
            "abc" => (Self::Abc { a: 1.0, b: 1.0, c: 1.0 }, &["A", "B", "C"]),
            "hill_vortex" => (Self::HillVortex { radius: 0.75, speed: 1.0 }, &["radius", "U"]),
            "tornado" => (Self::Tornado { time: 0.0 }, &["time"]),
            other => {
                return Err(Error::Usage(format!(
                    "unknown analytic field {other:?}; expected one of {}",
                    ANALYTIC_NAMES.join(", ")
                )))
            }
        };
        for (key, &value) in params {
            if !allowed.contains(&key.as_str()) {
                return Err(Error::Usage(format!(
                    "parameter {key:?} not accepted by {name}; expected {allowed:?}"
                )));
            }
            match (&mut field, key.as_str()) {
                (Self::RigidRotation { omega }, _) => *omega = value,
                (Self::Abc { a, .. }, "A") => *a = value,
                (Self::Abc { b, .. }, "B") => *b = value,
                (Self::Abc { c, .. }, _) => *c = value,
                (Self::HillVortex { radius, .. }, "radius") => *radius = value,
                (Self::HillVortex { speed, .. }, _) => *speed = value,
                (Self::Tornado { time }, _) => *time = value,
            }
        }
        if let Self::HillVortex { radius, .. } = field {
            if radius <= 0.0 {
                return Err(Error::Usage("hill_vortex radius must be positive".into()));
            }
        }
        Ok(field)
    }

    /// Vector at normalized coordinate `x` in `[-1, 1]^3`.
    pub fn eval(&self, x: [f64; 3]) -> [f64; 3] {
        match *self {
            Self::RigidRotation { omega } => [-omega * x[1], omega * x[0], 0.0],
            Self::Abc { a, b, c } => {
                let p = x.map(|v| (v + 1.0) * PI);
                [
                    a * p[2].sin() + c * p[1].cos(),
                    b * p[0].sin() + a * p[2].cos(),
                    c * p[1].sin() + b * p[0].cos(),
                ]
            }
            Self::HillVortex { radius, speed } => hill_vortex(x, radius, speed),
            Self::Tornado { time } => tornado(x.map(|v| (v + 1.0) * 0.5), time),
        }
    }
}

/// Samples a named analytic field at the voxel lattice of `dims`.
pub fn gen_analytic(name: &str, dims: Dims, params: &BTreeMap<String, f64>) -> Result<VectorField> {
    let field = AnalyticField::from_name(name, params)?;
    VectorField::from_fn(dims, |x| field.eval(x))
}

fn hill_vortex(x: [f64; 3], a: f64, u: f64) -> [f64; 3] {
    let rho2 = x[0] * x[0] + x[1] * x[1];
    let z = x[2];
    let r2 = rho2 + z * z;
    let a2 = a * a;
    // velocity in cylindrical form: u_rho / rho and u_z
    let (u_rho_over_rho, u_z) = if r2 <= a2 {
        let k = 1.5 * u / a2;
        (k * z, k * (a2 - 2.0 * rho2 - z * z))
    } else {
        let r = r2.sqrt();
        let a3 = a2 * a;
        let r5 = r2 * r2 * r;
        (
            1.5 * u * a3 * z / r5,
            -u * (1.0 - a3 / (r2 * r)) - 1.5 * u * a3 * rho2 / r5,
        )
    };
    [u_rho_over_rho * x[0], u_rho_over_rho * x[1], u_z]
}

// Port of Crawfis' gen_tornado, evaluated at one point of the unit cube.
fn tornado(p: [f64; 3], time: f64) -> [f64; 3] {
    const SMALL: f64 = 1e-11;
    let [x, y, z] = p;
    let xc = 0.5 + 0.1 * (0.04 * time + 10.0 * z).sin();
    let yc = 0.5 + 0.1 * (0.03 * time + 3.0 * z).cos();
    let r = 0.1 + 0.4 * z * z + 0.1 * z * (8.0 * z).sin();
    let r2 = 0.2 + 0.1 * z;
    let mut temp = ((y - yc) * (y - yc) + (x - xc) * (x - xc)).sqrt();
    let mut scale = (r - temp).abs();
    scale = if scale > r2 { 0.8 - scale } else { 1.0 };
    let z0 = (0.1 * (0.1 - temp * z)).max(0.0);
    temp = (temp * temp + z0 * z0).sqrt();
    scale = (r + r2 - temp) * scale / (temp + SMALL);
    scale /= 1.0 + z;
    [
        scale * (y - yc) + 0.1 * (x - xc),
        scale * -(x - xc) + 0.1 * (y - yc),
        scale * z0,
    ]
}
