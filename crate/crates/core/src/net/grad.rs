use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::pass::Tape;
use super::{Network, Real};
use crate::error::{Error, Result};
use crate::train::loss;
use crate::volume::DEGENERATE_NORM;

/// Which terms make up the training objective.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LossKind {
    #[serde(rename = "perp")]
    Perp,
    #[serde(rename = "pss")]
    Pss,
    #[serde(rename = "seeds")]
    Seeds,
    #[serde(rename = "perp+seeds")]
    PerpSeeds,
    #[serde(rename = "pss+seeds")]
    PssSeeds,
}

impl LossKind {
    pub fn uses_perp(self) -> bool {
        matches!(self, Self::Perp | Self::PerpSeeds)
    }

    pub fn uses_pss(self) -> bool {
        matches!(self, Self::Pss | Self::PssSeeds)
    }

    pub fn uses_seeds(self) -> bool {
        matches!(self, Self::Seeds | Self::PerpSeeds | Self::PssSeeds)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Perp => "perp",
            Self::Pss => "pss",
            Self::Seeds => "seeds",
            Self::PerpSeeds => "perp+seeds",
            Self::PssSeeds => "pss+seeds",
        }
    }
}

impl fmt::Display for LossKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for LossKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "perp" => Self::Perp,
            "pss" => Self::Pss,
            "seeds" => Self::Seeds,
            "perp+seeds" => Self::PerpSeeds,
            "pss+seeds" => Self::PssSeeds,
            other => {
                return Err(Error::Usage(format!(
                    "unknown loss {other:?}; expected perp, pss, seeds, perp+seeds or pss+seeds"
                )))
            }
        })
    }
}

/// Sampled voxels: coordinates `P`, stored vectors `W`, and principal
/// normals `N` when the objective needs them.
#[derive(Debug, Clone, Default)]
pub struct Batch<T> {
    pub points: Vec<[T; 3]>,
    pub vectors: Vec<[T; 3]>,
    pub normals: Option<Vec<[T; 3]>>,
}

#[derive(Debug, Clone, Copy)]
pub struct Objective<T> {
    pub kind: LossKind,
    /// Weight of the rake term when it is enabled.
    pub seed_weight: T,
    /// Use the literal signed mean of `f` on the rake instead of the mean of `|f|`.
    pub signed_seeds: bool,
}

impl<T: Real> Objective<T> {
    pub fn new(kind: LossKind) -> Self {
        Self {
            kind,
            seed_weight: T::one(),
            signed_seeds: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LossParts<T> {
    pub total: T,
    /// `L_perp` or `L_pss`, whichever the objective uses; zero otherwise.
    pub primary: T,
    /// Unweighted rake term; zero when disabled.
    pub seeds: T,
    /// Batch entries excluded as degenerate.
    pub masked: usize,
}

/// Loss value and its gradient with respect to every network parameter.
///
/// The orthogonality terms depend on `grad_x f`, so the forward pass carries
/// input tangents and the reverse sweep differentiates through them. Rake
/// points only need values. Per-sample contributions are reduced in a fixed
/// order, so the result is deterministic.
pub fn param_gradients<T: Real>(
    net: &Network<T>,
    batch: &Batch<T>,
    seeds: Option<&[[T; 3]]>,
    objective: &Objective<T>,
) -> Result<(LossParts<T>, Vec<T>)> {
    net.check_finite()?;
    let kind = objective.kind;
    let mut grads = vec![T::zero(); net.params().len()];
    let mut parts = LossParts::default();

    if kind.uses_perp() || kind.uses_pss() {
        if batch.points.is_empty() {
            return Err(Error::Usage("empty batch".into()));
        }
        if batch.vectors.len() != batch.points.len() {
            return Err(Error::Usage(format!(
                "{} points but {} vectors in batch",
                batch.points.len(),
                batch.vectors.len()
            )));
        }
        let normals = if kind.uses_pss() {
            let n = batch
                .normals
                .as_ref()
                .ok_or_else(|| Error::Usage("pss loss needs principal normals in the batch".into()))?;
            if n.len() != batch.points.len() {
                return Err(Error::Usage("normals and points differ in length".into()));
            }
            Some(n)
        } else {
            None
        };
        let keep: Vec<usize> = (0..batch.points.len())
            .filter(|&i| norm(batch.vectors[i]) >= DEGENERATE_NORM)
            .collect();
        if keep.is_empty() {
            return Err(Error::Usage("every vector in the batch is degenerate".into()));
        }
        parts.masked = batch.points.len() - keep.len();
        let points: Vec<[T; 3]> = keep.iter().map(|&i| batch.points[i]).collect();
        let tape = Tape::run(net, &points, true, true);
        let g = tape.grads.as_ref().expect("tangent pass");
        let (value, gbar) = match normals {
            None => {
                let w: Vec<[T; 3]> = keep.iter().map(|&i| batch.vectors[i]).collect();
                loss::perp_terms(g, &w)?
            }
            Some(normals) => {
                let n: Vec<[T; 3]> = keep.iter().map(|&i| normals[i]).collect();
                let (value, masked, gbar) = loss::pss_terms(g, &n)?;
                parts.masked += masked;
                (value, gbar)
            }
        };
        let zeros = vec![T::zero(); points.len()];
        tape.backward(net, &zeros, Some(&gbar), &mut grads);
        parts.primary = value;
    }

    if kind.uses_seeds() {
        let seeds = seeds.filter(|s| !s.is_empty()).ok_or_else(|| {
            Error::Usage(format!("loss {kind} needs a nonempty set of rake points"))
        })?;
        let tape = Tape::run(net, seeds, false, true);
        let (value, mut fbar) = loss::seeds_terms(&tape.values, objective.signed_seeds)?;
        for v in &mut fbar {
            *v *= objective.seed_weight;
        }
        tape.backward(net, &fbar, None, &mut grads);
        parts.seeds = value;
    }

    parts.total = parts.primary + objective.seed_weight * parts.seeds;
    if !kind.uses_seeds() {
        parts.total = parts.primary;
    }
    Ok((parts, grads))
}

fn norm<T: Real>(v: [T; 3]) -> f64 {
    let v = v.map(Real::as_f64);
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}
