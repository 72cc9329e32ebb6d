//! Training a stream function network on a vector field.
//!
//! Each iteration draws `b` voxels, evaluates the network and its input
//! gradients there, forms the configured loss, back-propagates through the
//! tangent-augmented forward pass and takes one Adam step under a stepwise
//! learning-rate decay.

mod adam;
pub mod loss;
mod rake;
mod sampler;

pub use adam::AdamState;
pub use loss::{loss_perp, loss_pss, loss_seeds, PssLoss};
pub use rake::{sample_rake, RakeShape, RakeSpec};
pub use sampler::{sample_batch, VoxelSampler};

use std::fs;
use std::io::Write;
use std::path::Path;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::net::{param_gradients, Architecture, Batch, LossKind, Objective, StreamNet};
use crate::volume::{frenet_normal, VectorField};

/// Default per-iteration batch: 0.5% of the voxels rounded to the nearest
/// thousand, clamped to `[1024, 150000]`. A 128^3 volume gets 10,000.
pub fn default_batch_size(voxels: usize) -> usize {
    let half_percent = voxels as f64 * 0.005;
    let rounded = (half_percent / 1000.0).round() * 1000.0;
    (rounded as usize).clamp(1024, 150_000)
}

/// Piecewise-constant decay: `lr0 * factor^-floor(iteration / every)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LrSchedule {
    pub lr0: f64,
    pub factor: f64,
    pub every: usize,
}

impl Default for LrSchedule {
    fn default() -> Self {
        Self {
            lr0: 5e-5,
            factor: 10.0,
            every: 3333,
        }
    }
}

impl LrSchedule {
    pub fn lr_at(&self, iteration: usize) -> f64 {
        let decays = (iteration / self.every.max(1)) as i32;
        self.lr0 * self.factor.powi(-decays)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub loss: LossKind,
    pub iterations: usize,
    /// `None` picks [`default_batch_size`] from the field's voxel count.
    pub batch_size: Option<usize>,
    pub schedule: LrSchedule,
    pub rake: Option<RakeSpec>,
    pub seed: u64,
    /// Weight of the rake term relative to the orthogonality term.
    pub seed_weight: f64,
    /// Literal signed mean of `f` on the rake instead of mean `|f|`.
    pub signed_seeds: bool,
    /// Rescale every training vector to unit length first.
    pub normalize_vectors: bool,
    pub architecture: Architecture,
    /// Progress is logged every this many iterations (0 disables).
    pub log_every: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            loss: LossKind::Perp,
            iterations: 10_000,
            batch_size: None,
            schedule: LrSchedule::default(),
            rake: None,
            seed: 0,
            seed_weight: 1.0,
            signed_seeds: false,
            normalize_vectors: false,
            architecture: Architecture::default(),
            log_every: 100,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        self.architecture.validate()?;
        if self.iterations == 0 {
            return Err(Error::Usage("iterations must be at least 1".into()));
        }
        if self.batch_size == Some(0) {
            return Err(Error::Usage("batch size must be at least 1".into()));
        }
        if !(self.seed_weight >= 0.0 && self.seed_weight.is_finite()) {
            return Err(Error::Usage(format!("seed weight must be >= 0, got {}", self.seed_weight)));
        }
        if !(self.schedule.lr0 > 0.0 && self.schedule.factor > 0.0) {
            return Err(Error::Usage("learning rate and decay factor must be positive".into()));
        }
        if self.loss.uses_seeds() && self.rake.is_none() {
            return Err(Error::Usage(format!("loss {} needs a rake", self.loss)));
        }
        Ok(())
    }

    pub fn lr_at(&self, iteration: usize) -> f64 {
        self.schedule.lr_at(iteration)
    }

    pub fn batch_size_for(&self, field: &VectorField) -> usize {
        self.batch_size
            .unwrap_or_else(|| default_batch_size(field.dims().count()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HistoryRecord {
    pub iteration: usize,
    pub lr: f64,
    pub total: f64,
    /// `L_perp` or `L_pss`, whichever the loss uses.
    pub primary: f64,
    pub seeds: f64,
    pub wall_time_s: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct History {
    pub loss: Option<LossKind>,
    pub records: Vec<HistoryRecord>,
}

impl History {
    pub fn first(&self) -> Option<&HistoryRecord> {
        self.records.first()
    }

    pub fn last(&self) -> Option<&HistoryRecord> {
        self.records.last()
    }

    pub fn to_csv(&self) -> String {
        let primary = match self.loss {
            Some(k) if k.uses_pss() => "loss_pss",
            _ => "loss_perp",
        };
        let mut out = format!("iteration,lr,loss_total,{primary},loss_seeds,wall_time_s\n");
        for r in &self.records {
            out.push_str(&format!(
                "{},{:e},{:e},{:e},{:e},{:.6}\n",
                r.iteration, r.lr, r.total, r.primary, r.seeds, r.wall_time_s
            ));
        }
        out
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut f = fs::File::create(path).map_err(|e| Error::io(path, e))?;
        f.write_all(self.to_csv().as_bytes()).map_err(|e| Error::io(path, e))
    }
}

/// Training data prepared once per run.
struct Prepared {
    vectors: Vec<[f32; 3]>,
    normals: Option<Vec<[f32; 3]>>,
    seeds: Option<Vec<[f32; 3]>>,
    sampler: VoxelSampler,
}

fn prepare(field: &VectorField, config: &TrainConfig) -> Result<Prepared> {
    let sampler = VoxelSampler::new(field)?;
    let source = if config.normalize_vectors {
        field.normalized()
    } else {
        field.clone()
    };
    let normals = if config.loss.uses_pss() {
        // only the direction of N enters the loss
        let (n, _) = frenet_normal(field)?;
        Some(n.normalized().data().to_vec())
    } else {
        None
    };
    let seeds = match (&config.rake, config.loss.uses_seeds()) {
        (Some(rake), true) => Some(
            sample_rake(rake)?
                .into_iter()
                .map(|p| p.map(|c| c as f32))
                .collect(),
        ),
        (None, true) => return Err(Error::Usage(format!("loss {} needs a rake", config.loss))),
        _ => None,
    };
    Ok(Prepared {
        vectors: source.data().to_vec(),
        normals,
        seeds,
        sampler,
    })
}

/// Trains a fresh network on `field`. Deterministic in `(field, config)`.
pub fn train(field: &VectorField, config: &TrainConfig) -> Result<(StreamNet, History)> {
    let net = StreamNet::init(config.architecture, config.seed)?;
    train_from(net, field, config)
}

/// Continues training an existing network.
pub fn train_from(
    mut net: StreamNet,
    field: &VectorField,
    config: &TrainConfig,
) -> Result<(StreamNet, History)> {
    config.validate()?;
    let prepared = prepare(field, config)?;
    let b = config.batch_size_for(field);
    let dims = field.dims();
    let objective = Objective {
        kind: config.loss,
        seed_weight: config.seed_weight as f32,
        signed_seeds: config.signed_seeds,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(1);
    let mut adam = AdamState::<f32>::new(net.params().len());
    let mut history = History {
        loss: Some(config.loss),
        records: Vec::with_capacity(config.iterations),
    };
    let start = Instant::now();
    log::info!(
        "training {} on {dims}: {} iterations, batch {b}, {} candidate voxels",
        config.loss,
        config.iterations,
        prepared.sampler.candidates()
    );

    for it in 0..config.iterations {
        let lr = config.lr_at(it);
        let batch = if config.loss.uses_perp() || config.loss.uses_pss() {
            let idx = prepared.sampler.sample(&mut rng, b);
            Batch {
                points: idx.iter().map(|&i| dims.coord_of(i).map(|c| c as f32)).collect(),
                vectors: idx.iter().map(|&i| prepared.vectors[i]).collect(),
                normals: prepared
                    .normals
                    .as_ref()
                    .map(|n| idx.iter().map(|&i| n[i]).collect()),
            }
        } else {
            Batch::default()
        };
        let (parts, grads) = param_gradients(&net, &batch, prepared.seeds.as_deref(), &objective)?;
        if !parts.total.is_finite() || grads.iter().any(|g| !g.is_finite()) {
            return Err(Error::Numeric(format!(
                "non-finite loss at iteration {it} (lr {lr:e}): total {}, primary {}, seeds {}",
                parts.total, parts.primary, parts.seeds
            )));
        }
        adam.step(net.params_mut(), &grads, lr)?;
        let record = HistoryRecord {
            iteration: it,
            lr,
            total: f64::from(parts.total),
            primary: f64::from(parts.primary),
            seeds: f64::from(parts.seeds),
            wall_time_s: start.elapsed().as_secs_f64(),
        };
        if config.log_every > 0 && (it % config.log_every == 0 || it + 1 == config.iterations) {
            log::info!(
                "iter {it:>6}  lr {lr:.3e}  loss {:.6e}  primary {:.6e}  seeds {:.6e}  {:.1}s",
                record.total,
                record.primary,
                record.seeds,
                record.wall_time_s
            );
        }
        history.records.push(record);
    }
    Ok((net, history))
}
