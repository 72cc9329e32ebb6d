//! Finite-difference operators on vector fields.
//!
//! Derivatives are taken in normalized coordinates: central differences at
//! interior voxels, first-order one-sided differences on the boundary.

use super::{cross3, stencil, widen, Dims, VectorField};
use crate::error::{Error, Result};

/// Per-voxel Jacobian, entry `[r][c] = dV_r / dx_c`.
#[derive(Debug, Clone)]
pub struct JacobianField {
    dims: Dims,
    data: Vec<[[f64; 3]; 3]>,
}

impl JacobianField {
    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn data(&self) -> &[[[f64; 3]; 3]] {
        &self.data
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> [[f64; 3]; 3] {
        self.data[self.dims.index(i, j, k)]
    }
}

fn require_stencil(dims: Dims, what: &str) -> Result<()> {
    if dims.as_array().iter().any(|&n| n < 3) {
        return Err(Error::Shape(format!("{what} needs at least 3 voxels per axis, got {dims}")));
    }
    Ok(())
}

pub fn jacobian_central(field: &VectorField) -> Result<JacobianField> {
    let dims = field.dims();
    require_stencil(dims, "jacobian")?;
    let h = dims.spacing();
    let n = dims.as_array();
    let mut data = Vec::with_capacity(dims.count());
    for k in 0..dims.nz {
        for j in 0..dims.ny {
            for i in 0..dims.nx {
                let ijk = [i, j, k];
                let mut jac = [[0f64; 3]; 3];
                for col in 0..3 {
                    let (lo, hi, span) = stencil(ijk[col], n[col]);
                    let mut a = ijk;
                    let mut b = ijk;
                    a[col] = lo;
                    b[col] = hi;
                    let va = widen(field.get(a[0], a[1], a[2]));
                    let vb = widen(field.get(b[0], b[1], b[2]));
                    let denom = span * h[col];
                    for (row, entry) in jac.iter_mut().enumerate() {
                        entry[col] = (vb[row] - va[row]) / denom;
                    }
                }
                data.push(jac);
            }
        }
    }
    Ok(JacobianField { dims, data })
}

/// Vorticity `curl V`, assembled from [`jacobian_central`].
pub fn curl(field: &VectorField) -> Result<VectorField> {
    let jac = jacobian_central(field)?;
    let data = jac
        .data
        .iter()
        .map(|j| {
            [
                (j[2][1] - j[1][2]) as f32,
                (j[0][2] - j[2][0]) as f32,
                (j[1][0] - j[0][1]) as f32,
            ]
        })
        .collect();
    VectorField::new(field.dims(), data)
}

/// Principal normal `N` and binormal `B` of the Frenet frame of the flow.
///
/// `B = (J_V V) x V` and `N = B x V`, so both are orthogonal to `V` by
/// construction and vanish wherever `V` does.
pub fn frenet_normal(field: &VectorField) -> Result<(VectorField, VectorField)> {
    let jac = jacobian_central(field)?;
    let mut normals = Vec::with_capacity(field.data().len());
    let mut binormals = Vec::with_capacity(field.data().len());
    for (v, j) in field.data().iter().zip(&jac.data) {
        let v = widen(*v);
        let jv = [
            j[0][0] * v[0] + j[0][1] * v[1] + j[0][2] * v[2],
            j[1][0] * v[0] + j[1][1] * v[1] + j[1][2] * v[2],
            j[2][0] * v[0] + j[2][1] * v[1] + j[2][2] * v[2],
        ];
        let b = cross3(jv, v);
        let n = cross3(b, v);
        binormals.push(b.map(|c| c as f32));
        normals.push(n.map(|c| c as f32));
    }
    Ok((
        VectorField::new(field.dims(), normals)?,
        VectorField::new(field.dims(), binormals)?,
    ))
}
