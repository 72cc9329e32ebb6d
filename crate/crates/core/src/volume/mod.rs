//! Regular-grid fields on the normalized cube `[-1, 1]^3`.
//!
//! Every axis is mapped independently onto `[-1, 1]`, so voxel `(i, j, k)` of a
//! grid with dims `(nx, ny, nz)` sits at `(-1 + 2i/(nx-1), -1 + 2j/(ny-1), -1 + 2k/(nz-1))`.
//! Storage is row-major with x fastest. Vector components are taken as already
//! expressed in the normalized frame; they are never rescaled.

mod analytic;
mod diff;
mod raw;

pub use analytic::{gen_analytic, AnalyticField, ANALYTIC_NAMES};
pub use diff::{curl, frenet_normal, jacobian_central, JacobianField};
pub use raw::{load_raw, load_scalar_raw, read_sidecar, save_raw, save_scalar_raw, sidecar_path, RawMeta};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Vectors with a smaller Euclidean norm are treated as critical points and
/// excluded from losses and metrics.
pub const DEGENERATE_NORM: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Dims {
    pub nx: usize,
    pub ny: usize,
    pub nz: usize,
}

impl Dims {
    pub fn new(nx: usize, ny: usize, nz: usize) -> Result<Self> {
        if nx == 0 || ny == 0 || nz == 0 {
            return Err(Error::Usage(format!("dims must be positive, got {nx}x{ny}x{nz}")));
        }
        Ok(Self { nx, ny, nz })
    }

    pub fn cube(n: usize) -> Result<Self> {
        Self::new(n, n, n)
    }

    pub fn as_array(&self) -> [usize; 3] {
        [self.nx, self.ny, self.nz]
    }

    pub fn count(&self) -> usize {
        self.nx * self.ny * self.nz
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        i + self.nx * (j + self.ny * k)
    }

    #[inline]
    pub fn unravel(&self, idx: usize) -> [usize; 3] {
        let i = idx % self.nx;
        let j = (idx / self.nx) % self.ny;
        let k = idx / (self.nx * self.ny);
        [i, j, k]
    }

    /// Grid spacing in normalized units along each axis.
    pub fn spacing(&self) -> [f64; 3] {
        self.as_array().map(axis_spacing)
    }

    /// Normalized coordinate of voxel `(i, j, k)`.
    #[inline]
    pub fn coord(&self, i: usize, j: usize, k: usize) -> [f64; 3] {
        [axis_coord(i, self.nx), axis_coord(j, self.ny), axis_coord(k, self.nz)]
    }

    #[inline]
    pub fn coord_of(&self, idx: usize) -> [f64; 3] {
        let [i, j, k] = self.unravel(idx);
        self.coord(i, j, k)
    }

    /// Coordinates of every voxel in storage order.
    pub fn coords(&self) -> impl Iterator<Item = [f64; 3]> + '_ {
        (0..self.count()).map(move |idx| self.coord_of(idx))
    }

    /// The eight `(voxel index, weight)` pairs of a trilinear blend at `x`.
    pub fn trilinear_stencil(&self, x: [f64; 3]) -> Result<[(usize, f64); 8]> {
        if x.iter().any(|c| !(-1.0..=1.0).contains(c)) {
            return Err(Error::OutOfDomain(x));
        }
        let mut lo = [0usize; 3];
        let mut hi = [0usize; 3];
        let mut frac = [0f64; 3];
        for (axis, &n) in self.as_array().iter().enumerate() {
            if n == 1 {
                continue;
            }
            let mut t = (x[axis] + 1.0) * 0.5 * (n - 1) as f64;
            // snap round-off so lattice points hit stored values exactly
            if (t - t.round()).abs() < 1e-9 {
                t = t.round();
            }
            let i0 = (t.floor() as usize).min(n - 2);
            lo[axis] = i0;
            hi[axis] = i0 + 1;
            frac[axis] = t - i0 as f64;
        }
        let mut out = [(0usize, 0f64); 8];
        for (corner, slot) in out.iter_mut().enumerate() {
            let pick = |axis: usize| corner >> axis & 1 == 1;
            let mut w = 1.0;
            let mut ijk = [0usize; 3];
            for axis in 0..3 {
                if pick(axis) {
                    ijk[axis] = hi[axis];
                    w *= frac[axis];
                } else {
                    ijk[axis] = lo[axis];
                    w *= 1.0 - frac[axis];
                }
            }
            *slot = (self.index(ijk[0], ijk[1], ijk[2]), w);
        }
        Ok(out)
    }
}

impl std::fmt::Display for Dims {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}x{}x{}", self.nx, self.ny, self.nz)
    }
}

#[inline]
fn axis_coord(i: usize, n: usize) -> f64 {
    if n == 1 {
        0.0
    } else {
        -1.0 + 2.0 * i as f64 / (n - 1) as f64
    }
}

#[inline]
fn axis_spacing(n: usize) -> f64 {
    if n == 1 {
        2.0
    } else {
        2.0 / (n - 1) as f64
    }
}

#[inline]
pub(crate) fn norm3(v: [f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

#[inline]
pub(crate) fn dot3(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[inline]
pub(crate) fn cross3(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

#[inline]
pub(crate) fn widen(v: [f32; 3]) -> [f64; 3] {
    v.map(f64::from)
}

/// A 3-component field sampled on a regular grid.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    dims: Dims,
    data: Vec<[f32; 3]>,
}

impl VectorField {
    /// Wraps voxel data, rejecting length mismatches and non-finite components.
    pub fn new(dims: Dims, data: Vec<[f32; 3]>) -> Result<Self> {
        if data.len() != dims.count() {
            return Err(Error::Format(format!(
                "{} voxels supplied for a {dims} grid",
                data.len()
            )));
        }
        if let Some(idx) = data.iter().position(|v| v.iter().any(|c| !c.is_finite())) {
            return Err(Error::Data(format!("non-finite vector at voxel {:?}", dims.unravel(idx))));
        }
        Ok(Self { dims, data })
    }

    /// Samples `f` at every voxel coordinate.
    pub fn from_fn(dims: Dims, mut f: impl FnMut([f64; 3]) -> [f64; 3]) -> Result<Self> {
        let data = dims.coords().map(|x| f(x).map(|c| c as f32)).collect();
        Self::new(dims, data)
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn data(&self) -> &[[f32; 3]] {
        &self.data
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> [f32; 3] {
        self.data[self.dims.index(i, j, k)]
    }

    pub fn is_degenerate(&self, idx: usize) -> bool {
        norm3(widen(self.data[idx])) < DEGENERATE_NORM
    }

    /// Indices of voxels whose vector is long enough to define a direction.
    pub fn non_degenerate_indices(&self) -> Vec<usize> {
        (0..self.data.len()).filter(|&i| !self.is_degenerate(i)).collect()
    }

    /// Trilinear blend of the eight voxels surrounding `x`.
    pub fn sample_trilinear(&self, x: [f64; 3]) -> Result<[f64; 3]> {
        let mut out = [0.0; 3];
        for (idx, w) in self.dims.trilinear_stencil(x)? {
            if w == 0.0 {
                continue;
            }
            let v = self.data[idx];
            for c in 0..3 {
                out[c] += w * f64::from(v[c]);
            }
        }
        Ok(out)
    }

    /// Every vector scaled to unit length; degenerate voxels are left at zero.
    pub fn normalized(&self) -> Self {
        let data = self
            .data
            .iter()
            .map(|&v| {
                let w = widen(v);
                let n = norm3(w);
                if n < DEGENERATE_NORM {
                    [0.0; 3]
                } else {
                    w.map(|c| (c / n) as f32)
                }
            })
            .collect();
        Self { dims: self.dims, data }
    }
}

/// A scalar field sampled on a regular grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    dims: Dims,
    data: Vec<f32>,
}

impl ScalarField {
    pub fn new(dims: Dims, data: Vec<f32>) -> Result<Self> {
        if data.len() != dims.count() {
            return Err(Error::Format(format!(
                "{} values supplied for a {dims} grid",
                data.len()
            )));
        }
        if let Some(idx) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::Data(format!("non-finite value at voxel {:?}", dims.unravel(idx))));
        }
        Ok(Self { dims, data })
    }

    pub fn from_fn(dims: Dims, mut f: impl FnMut([f64; 3]) -> f64) -> Result<Self> {
        let data = dims.coords().map(|x| f(x) as f32).collect();
        Self::new(dims, data)
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn data(&self) -> &[f32] {
        &self.data
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> f32 {
        self.data[self.dims.index(i, j, k)]
    }

    pub fn sample_trilinear(&self, x: [f64; 3]) -> Result<f64> {
        let mut out = 0.0;
        for (idx, w) in self.dims.trilinear_stencil(x)? {
            if w != 0.0 {
                out += w * f64::from(self.data[idx]);
            }
        }
        Ok(out)
    }

    /// `(min, max)` over all voxels.
    pub fn range(&self) -> (f32, f32) {
        self.data
            .iter()
            .fold((f32::INFINITY, f32::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)))
    }

    /// Central-difference gradient of the scalar field (one-sided on the boundary).
    pub fn gradient(&self) -> Result<VectorField> {
        let d = self.dims;
        if d.as_array().iter().any(|&n| n < 2) {
            return Err(Error::Shape(format!("gradient needs at least 2 voxels per axis, got {d}")));
        }
        let h = d.spacing();
        let n = d.as_array();
        let mut out = Vec::with_capacity(d.count());
        for k in 0..d.nz {
            for j in 0..d.ny {
                for i in 0..d.nx {
                    let ijk = [i, j, k];
                    let mut g = [0f32; 3];
                    for axis in 0..3 {
                        let (lo, hi, span) = stencil(ijk[axis], n[axis]);
                        let mut a = ijk;
                        let mut b = ijk;
                        a[axis] = lo;
                        b[axis] = hi;
                        let fa = f64::from(self.get(a[0], a[1], a[2]));
                        let fb = f64::from(self.get(b[0], b[1], b[2]));
                        g[axis] = ((fb - fa) / (span * h[axis])) as f32;
                    }
                    out.push(g);
                }
            }
        }
        VectorField::new(d, out)
    }
}

/// Neighbour indices and their distance in cells for a first-derivative stencil.
#[inline]
pub(crate) fn stencil(i: usize, n: usize) -> (usize, usize, f64) {
    if i == 0 {
        (0, 1, 1.0)
    } else if i == n - 1 {
        (n - 2, n - 1, 1.0)
    } else {
        (i - 1, i + 1, 2.0)
    }
}
