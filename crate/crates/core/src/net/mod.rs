//! Sinusoidal residual MLP `f: [-1, 1]^3 -> R`.
//!
//! Topology: a `3 -> width` sine layer, `hidden_layers / 2` residual blocks
//! of two `width -> width` sine layers each (`out = block(in) + in`), and a
//! linear `width -> 1` head. Every sine layer computes `sin(omega0 * (W x + b))`.
//!
//! Input gradients are exact: the forward pass carries the three input
//! tangents alongside the activations. Parameter gradients of losses that
//! depend on those input gradients come from a reverse sweep over the
//! tangent-augmented forward pass (see [`param_gradients`]).

mod grad;
mod io;
mod pass;
mod trig;

pub use grad::{param_gradients, Batch, LossKind, LossParts, Objective};
pub use io::{deserialize, from_bytes, read_manifest, serialize, to_bytes, ModelManifest, MODEL_MAGIC, MODEL_VERSION};

use std::fmt::Debug;

use ndarray::{ArrayView1, ArrayView2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Floating-point types the network can run in. Training uses `f32`;
/// finite-difference oracles run the same code in `f64`.
pub trait Real:
    num_traits::Float
    + ndarray::LinalgScalar
    + ndarray::ScalarOperand
    + std::ops::AddAssign
    + std::ops::SubAssign
    + std::ops::MulAssign
    + std::iter::Sum
    + Debug
    + Default
    + Send
    + Sync
    + 'static
{
    fn of(v: f64) -> Self;
    fn as_f64(self) -> f64;

    /// `sin(omega z)` into `sin` and optionally `omega cos(omega z)` into `dcos`.
    fn sine(omega: Self, z: &[Self], sin: &mut [Self], dcos: Option<&mut [Self]>) {
        trig::sine_std(omega, z, sin, dcos);
    }
}

impl Real for f32 {
    fn of(v: f64) -> Self {
        v as f32
    }
    fn as_f64(self) -> f64 {
        f64::from(self)
    }
    fn sine(omega: Self, z: &[Self], sin: &mut [Self], dcos: Option<&mut [Self]>) {
        trig::sine_f32(omega, z, sin, dcos);
    }
}

impl Real for f64 {
    fn of(v: f64) -> Self {
        v
    }
    fn as_f64(self) -> f64 {
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Architecture {
    /// Number of `width x width` sine layers; always even.
    pub hidden_layers: usize,
    pub width: usize,
    /// Frequency applied inside every sine activation.
    pub omega0: f64,
}

impl Default for Architecture {
    fn default() -> Self {
        Self {
            hidden_layers: 4,
            width: 512,
            omega0: 30.0,
        }
    }
}

impl Architecture {
    pub fn new(hidden_layers: usize, width: usize) -> Result<Self> {
        let arch = Self {
            hidden_layers,
            width,
            ..Self::default()
        };
        arch.validate()?;
        Ok(arch)
    }

    pub fn validate(&self) -> Result<()> {
        if self.hidden_layers == 0 || self.hidden_layers % 2 != 0 {
            return Err(Error::Usage(format!(
                "hidden_layers must be a positive even number, got {}",
                self.hidden_layers
            )));
        }
        if self.width == 0 {
            return Err(Error::Usage("width must be at least 1".into()));
        }
        if !(self.omega0.is_finite() && self.omega0 > 0.0) {
            return Err(Error::Usage(format!("omega0 must be positive, got {}", self.omega0)));
        }
        Ok(())
    }

    pub fn blocks(&self) -> usize {
        self.hidden_layers / 2
    }

    /// Total number of scalar parameters, biases included.
    pub fn param_count(&self) -> usize {
        layout(self).last().map(|l| l.end()).unwrap_or(0)
    }
}

/// Shape and offset of one dense layer inside the flat parameter vector:
/// `rows * cols` weights (row-major, `rows` outputs) followed by `rows` biases.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct LayerShape {
    pub rows: usize,
    pub cols: usize,
    pub offset: usize,
}

impl LayerShape {
    pub fn weights(&self) -> std::ops::Range<usize> {
        self.offset..self.offset + self.rows * self.cols
    }

    pub fn biases(&self) -> std::ops::Range<usize> {
        let start = self.offset + self.rows * self.cols;
        start..start + self.rows
    }

    pub fn end(&self) -> usize {
        self.offset + self.rows * (self.cols + 1)
    }
}

pub(crate) fn layout(arch: &Architecture) -> Vec<LayerShape> {
    let w = arch.width;
    let mut shapes = Vec::with_capacity(arch.hidden_layers + 2);
    let mut offset = 0;
    let mut push = |rows, cols| {
        let l = LayerShape { rows, cols, offset };
        offset = l.end();
        shapes.push(l);
    };
    push(w, 3);
    for _ in 0..arch.hidden_layers {
        push(w, w);
    }
    push(1, w);
    shapes
}

/// Value and input gradient of the network at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GradientBundle<T> {
    pub value: T,
    pub grad: [T; 3],
}

/// Network parameters plus the architecture and seed that produced them.
#[derive(Debug, Clone, PartialEq)]
pub struct Network<T> {
    arch: Architecture,
    seed: u64,
    layers: Vec<LayerShape>,
    params: Vec<T>,
}

/// The network as trained and stored: single precision.
pub type StreamNet = Network<f32>;

impl StreamNet {
    /// Sinusoidal initialization, deterministic in `seed`.
    ///
    /// First layer weights ~ U(-1/3, 1/3); hidden weights ~ U(+-sqrt(6/width)/omega0);
    /// head weights ~ U(+-sqrt(6/width)); each layer's bias ~ U(+-1/sqrt(fan_in)).
    ///
    /// The orthogonality loss can always be lowered by shrinking `f`, and Adam
    /// moves every head weight by roughly the learning rate per step whatever
    /// the gradient scale. A head this large outlasts that drift.
    pub fn init(arch: Architecture, seed: u64) -> Result<Self> {
        arch.validate()?;
        let layers = layout(&arch);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut params = vec![0f32; arch.param_count()];
        let last = layers.len() - 1;
        for (l, shape) in layers.iter().enumerate() {
            let fan_in = shape.cols as f64;
            let w_bound = if l == 0 {
                1.0 / fan_in
            } else if l == last {
                (6.0 / fan_in).sqrt()
            } else {
                (6.0 / fan_in).sqrt() / arch.omega0
            };
            let b_bound = 1.0 / fan_in.sqrt();
            for p in &mut params[shape.weights()] {
                *p = rng.random_range(-w_bound..w_bound) as f32;
            }
            for p in &mut params[shape.biases()] {
                *p = rng.random_range(-b_bound..b_bound) as f32;
            }
        }
        Ok(Self {
            arch,
            seed,
            layers,
            params,
        })
    }
}

impl<T: Real> Network<T> {
    pub fn from_params(arch: Architecture, seed: u64, params: Vec<T>) -> Result<Self> {
        arch.validate()?;
        if params.len() != arch.param_count() {
            return Err(Error::Format(format!(
                "{} parameters supplied, architecture needs {}",
                params.len(),
                arch.param_count()
            )));
        }
        Ok(Self {
            arch,
            seed,
            layers: layout(&arch),
            params,
        })
    }

    pub fn arch(&self) -> Architecture {
        self.arch
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn params(&self) -> &[T] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [T] {
        &mut self.params
    }

    /// Same parameters converted to another precision.
    pub fn cast<U: Real>(&self) -> Network<U> {
        Network {
            arch: self.arch,
            seed: self.seed,
            layers: self.layers.clone(),
            params: self.params.iter().map(|&p| U::of(p.as_f64())).collect(),
        }
    }

    pub(crate) fn layers(&self) -> &[LayerShape] {
        &self.layers
    }

    pub(crate) fn weight(&self, layer: usize) -> ArrayView2<'_, T> {
        let l = self.layers[layer];
        ArrayView2::from_shape((l.rows, l.cols), &self.params[l.weights()]).expect("layout")
    }

    pub(crate) fn bias(&self, layer: usize) -> ArrayView1<'_, T> {
        ArrayView1::from(&self.params[self.layers[layer].biases()])
    }

    pub(crate) fn check_finite(&self) -> Result<()> {
        match self.params.iter().position(|p| !p.is_finite()) {
            Some(i) => Err(Error::Numeric(format!("parameter {i} is not finite"))),
            None => Ok(()),
        }
    }

    pub fn forward(&self, x: [T; 3]) -> Result<T> {
        Ok(self.forward_batch(&[x])?[0])
    }

    pub fn forward_with_grad(&self, x: [T; 3]) -> Result<GradientBundle<T>> {
        let (values, grads) = self.forward_with_grad_batch(&[x])?;
        Ok(GradientBundle {
            value: values[0],
            grad: grads[0],
        })
    }

    /// Values at many points; rows never interact.
    pub fn forward_batch(&self, points: &[[T; 3]]) -> Result<Vec<T>> {
        self.check_finite()?;
        let mut out = Vec::with_capacity(points.len());
        for chunk in points.chunks(pass::EVAL_CHUNK) {
            out.extend(pass::Tape::run(self, chunk, false, false).values);
        }
        Ok(out)
    }

    /// Values and input gradients at many points.
    pub fn forward_with_grad_batch(&self, points: &[[T; 3]]) -> Result<(Vec<T>, Vec<[T; 3]>)> {
        self.check_finite()?;
        let mut values = Vec::with_capacity(points.len());
        let mut grads = Vec::with_capacity(points.len());
        for chunk in points.chunks(pass::EVAL_CHUNK) {
            let tape = pass::Tape::run(self, chunk, true, false);
            values.extend(tape.values);
            grads.extend(tape.grads.expect("tangents requested"));
        }
        Ok((values, grads))
    }
}

/// Anything that can be evaluated as a scalar field over the normalized cube.
///
/// Trained networks implement it; tests inject closed-form functions through
/// [`FnField`] to check evaluation code against exact answers.
pub trait ScalarFunction {
    fn eval_batch(&self, points: &[[f64; 3]]) -> Result<Vec<f64>>;
}

/// A [`ScalarFunction`] that also provides its gradient.
pub trait GradientFunction: ScalarFunction {
    fn eval_with_grad_batch(&self, points: &[[f64; 3]]) -> Result<Vec<GradientBundle<f64>>>;
}

impl<T: Real> ScalarFunction for Network<T> {
    fn eval_batch(&self, points: &[[f64; 3]]) -> Result<Vec<f64>> {
        let pts: Vec<[T; 3]> = points.iter().map(|p| p.map(T::of)).collect();
        Ok(self.forward_batch(&pts)?.into_iter().map(Real::as_f64).collect())
    }
}

impl<T: Real> GradientFunction for Network<T> {
    fn eval_with_grad_batch(&self, points: &[[f64; 3]]) -> Result<Vec<GradientBundle<f64>>> {
        let pts: Vec<[T; 3]> = points.iter().map(|p| p.map(T::of)).collect();
        let (values, grads) = self.forward_with_grad_batch(&pts)?;
        Ok(values
            .into_iter()
            .zip(grads)
            .map(|(value, grad)| GradientBundle {
                value: value.as_f64(),
                grad: grad.map(Real::as_f64),
            })
            .collect())
    }
}

/// Closed-form scalar function, optionally with its analytic gradient.
pub struct FnField<F, G = fn([f64; 3]) -> [f64; 3]> {
    pub value: F,
    pub grad: Option<G>,
}

impl<F: Fn([f64; 3]) -> f64> FnField<F> {
    pub fn new(value: F) -> Self {
        Self { value, grad: None }
    }
}

impl<F: Fn([f64; 3]) -> f64, G: Fn([f64; 3]) -> [f64; 3]> FnField<F, G> {
    pub fn with_grad(value: F, grad: G) -> Self {
        Self {
            value,
            grad: Some(grad),
        }
    }
}

impl<F: Fn([f64; 3]) -> f64, G> ScalarFunction for FnField<F, G> {
    fn eval_batch(&self, points: &[[f64; 3]]) -> Result<Vec<f64>> {
        Ok(points.iter().map(|&p| (self.value)(p)).collect())
    }
}

impl<F: Fn([f64; 3]) -> f64, G: Fn([f64; 3]) -> [f64; 3]> GradientFunction for FnField<F, G> {
    fn eval_with_grad_batch(&self, points: &[[f64; 3]]) -> Result<Vec<GradientBundle<f64>>> {
        let grad = self
            .grad
            .as_ref()
            .ok_or_else(|| Error::Usage("function has no gradient".into()))?;
        Ok(points
            .iter()
            .map(|&p| GradientBundle {
                value: (self.value)(p),
                grad: grad(p),
            })
            .collect())
    }
}
