use rand::Rng;

use crate::error::{Error, Result};
use crate::volume::VectorField;

/// Uniform sampling, with replacement, over the non-degenerate voxels of a field.
#[derive(Debug, Clone)]
pub struct VoxelSampler {
    valid: Vec<usize>,
}

impl VoxelSampler {
    pub fn new(field: &VectorField) -> Result<Self> {
        let valid = field.non_degenerate_indices();
        if valid.is_empty() {
            return Err(Error::Data("every voxel of the field is degenerate".into()));
        }
        Ok(Self { valid })
    }

    pub fn candidates(&self) -> usize {
        self.valid.len()
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R, b: usize) -> Vec<usize> {
        (0..b)
            .map(|_| self.valid[rng.random_range(0..self.valid.len())])
            .collect()
    }
}

/// Draws `b` voxel centres `P` and their stored vectors `W`.
pub fn sample_batch<R: Rng + ?Sized>(
    field: &VectorField,
    rng: &mut R,
    b: usize,
) -> Result<(Vec<[f32; 3]>, Vec<[f32; 3]>)> {
    if b == 0 {
        return Err(Error::Usage("batch size must be at least 1".into()));
    }
    let idx = VoxelSampler::new(field)?.sample(rng, b);
    let dims = field.dims();
    let points = idx.iter().map(|&i| dims.coord_of(i).map(|c| c as f32)).collect();
    let vectors = idx.iter().map(|&i| field.data()[i]).collect();
    Ok((points, vectors))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::volume::Dims;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn single_valid_voxel_is_always_drawn() {
        let d = Dims::cube(3).unwrap();
        let mut data = vec![[0f32; 3]; 27];
        data[13] = [0.0, 0.0, 1.0];
        let f = VectorField::new(d, data).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let (p, w) = sample_batch(&f, &mut rng, 4).unwrap();
        assert_eq!(p, vec![[0.0, 0.0, 0.0]; 4]);
        assert_eq!(w, vec![[0.0, 0.0, 1.0]; 4]);
    }

    #[test]
    fn all_degenerate_is_data_error() {
        let f = VectorField::from_fn(Dims::cube(2).unwrap(), |_| [0.0; 3]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(matches!(sample_batch(&f, &mut rng, 4), Err(Error::Data(_))));
    }

    #[test]
    fn samples_are_lattice_points_with_their_vectors() {
        let d = Dims::new(5, 7, 4).unwrap();
        let f = VectorField::from_fn(d, |x| [x[0] + 2.0, x[1], x[2]]).unwrap();
        let lattice: std::collections::HashSet<[u32; 3]> =
            d.coords().map(|x| x.map(|c| (c as f32).to_bits())).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let (p, w) = sample_batch(&f, &mut rng, 500).unwrap();
        for (pt, v) in p.iter().zip(&w) {
            assert!(lattice.contains(&pt.map(f32::to_bits)));
            assert!((v[0] - (pt[0] + 2.0)).abs() < 1e-6);
        }
    }
}
