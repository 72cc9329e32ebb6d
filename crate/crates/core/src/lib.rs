//! Neural stream functions.
//!
//! A stream function `f` of a 3D vector field `V` satisfies `grad f . V = 0`,
//! so every level set of `f` is a stream surface. This crate trains a
//! sinusoidal residual network to be such a function for a field sampled on
//! a regular grid, then evaluates, samples and exports the result.
//!
//! * [`volume`]: grids, `.raw` I/O, interpolation, Jacobian / curl / Frenet normal, analytic fields
//! * [`net`]: the network, its exact input gradients and parameter gradients
//! * [`train`]: losses, batch sampling, Adam, learning-rate schedule, rakes, training loop
//! * [`eval`]: orthogonality error, streamline tracing, constancy and resampling studies
//! * [`export`]: grid sampling, legacy VTK, export bundles
//! * [`cli`]: the `streamfn` command-line front end

pub mod cli;
pub mod error;
pub mod eval;
pub mod export;
pub mod net;
pub mod train;
pub mod volume;

pub use error::{Error, Result};
pub use eval::{err_volume, ErrStats};
pub use net::{Architecture, GradientFunction, LossKind, ScalarFunction, StreamNet};
pub use train::{train, TrainConfig};
pub use volume::{Dims, ScalarField, VectorField};
