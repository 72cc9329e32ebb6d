use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::volume::{norm3, VectorField};

/// Speeds below this stop the tracer.
pub const STAGNATION_SPEED: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    MaxSteps,
    LeftDomain,
    Stagnation,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Streamline {
    pub points: Vec<[f64; 3]>,
    pub step: f64,
    pub termination: Termination,
}

impl Streamline {
    pub fn seed(&self) -> [f64; 3] {
        self.points[0]
    }
}

fn inside(p: [f64; 3]) -> bool {
    p.iter().all(|c| (-1.0..=1.0).contains(c))
}

fn offset(p: [f64; 3], k: [f64; 3], s: f64) -> [f64; 3] {
    [p[0] + s * k[0], p[1] + s * k[1], p[2] + s * k[2]]
}

/// Classical RK4 through the trilinearly interpolated field.
///
/// Stops after `max_steps`, when any stage would leave `[-1, 1]^3` (the last
/// point kept is inside), or when the local speed drops below
/// [`STAGNATION_SPEED`].
pub fn trace_streamline(field: &VectorField, seed: [f64; 3], h: f64, max_steps: usize) -> Result<Streamline> {
    if !inside(seed) {
        return Err(Error::Usage(format!("seed {seed:?} lies outside [-1, 1]^3")));
    }
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::Usage(format!("step size must be positive, got {h}")));
    }
    let mut points = vec![seed];
    let mut p = seed;
    let sample = |x: [f64; 3]| if inside(x) { field.sample_trilinear(x).ok() } else { None };
    let mut termination = Termination::MaxSteps;
    for _ in 0..max_steps {
        let k1 = sample(p).expect("current point is inside");
        if norm3(k1) < STAGNATION_SPEED {
            termination = Termination::Stagnation;
            break;
        }
        let stages = sample(offset(p, k1, 0.5 * h)).and_then(|k2| {
            let k3 = sample(offset(p, k2, 0.5 * h))?;
            let k4 = sample(offset(p, k3, h))?;
            Some((k2, k3, k4))
        });
        let Some((k2, k3, k4)) = stages else {
            termination = Termination::LeftDomain;
            break;
        };
        let next = [0, 1, 2].map(|c| p[c] + h / 6.0 * (k1[c] + 2.0 * k2[c] + 2.0 * k3[c] + k4[c]));
        if !inside(next) {
            termination = Termination::LeftDomain;
            break;
        }
        points.push(next);
        p = next;
    }
    Ok(Streamline {
        points,
        step: h,
        termination,
    })
}

/// Seeds drawn uniformly from the inner cube, skipping near-stagnant voxels.
pub fn random_seeds(field: &VectorField, count: usize, seed: u64) -> Result<Vec<[f64; 3]>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seeds = Vec::with_capacity(count);
    let mut tries = 0usize;
    while seeds.len() < count {
        tries += 1;
        if tries > 1000 * count.max(1) {
            return Err(Error::Data("could not place streamline seeds: field is stagnant almost everywhere".into()));
        }
        let p = [0; 3].map(|_| rng.random_range(-0.95..0.95));
        let v = field.sample_trilinear(p)?;
        if norm3(v) > 1e-6 {
            seeds.push(p);
        }
    }
    Ok(seeds)
}
