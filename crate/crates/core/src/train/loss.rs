//! Training losses over batches of network input gradients.
//!
//! Each `*_terms` helper returns the loss value together with its derivative
//! with respect to the per-sample inputs, which the reverse sweep in
//! [`crate::net::param_gradients`] consumes.

use crate::error::{Error, Result};
use crate::net::{Network, Real};
use crate::volume::DEGENERATE_NORM;

#[inline]
fn dot<T: Real>(a: [T; 3], b: [T; 3]) -> T {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Subgradient of `|x|` with `0` at the kink.
#[inline]
fn sign<T: Real>(x: T) -> T {
    if x > T::zero() {
        T::one()
    } else if x < T::zero() {
        -T::one()
    } else {
        T::zero()
    }
}

/// Mean of `|grad . v|` over the batch.
pub fn loss_perp<T: Real>(grads: &[[T; 3]], vectors: &[[T; 3]]) -> Result<T> {
    Ok(perp_terms(grads, vectors)?.0)
}

pub(crate) fn perp_terms<T: Real>(grads: &[[T; 3]], vectors: &[[T; 3]]) -> Result<(T, Vec<[T; 3]>)> {
    if grads.is_empty() {
        return Err(Error::Usage("loss over an empty batch".into()));
    }
    if grads.len() != vectors.len() {
        return Err(Error::Usage(format!(
            "{} gradients but {} vectors",
            grads.len(),
            vectors.len()
        )));
    }
    let inv = T::one() / T::of(grads.len() as f64);
    let mut total = T::zero();
    let mut bar = Vec::with_capacity(grads.len());
    for (&g, &v) in grads.iter().zip(vectors) {
        let d = dot(g, v);
        total += d.abs();
        let s = sign(d) * inv;
        bar.push(v.map(|c| c * s));
    }
    Ok((total * inv, bar))
}

/// Mean of `1 - cos^2` between each gradient and principal normal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PssLoss<T> {
    pub value: T,
    /// Entries skipped because the gradient or normal was too short.
    pub masked: usize,
}

pub fn loss_pss<T: Real>(grads: &[[T; 3]], normals: &[[T; 3]]) -> Result<PssLoss<T>> {
    let (value, masked, _) = pss_terms(grads, normals)?;
    Ok(PssLoss { value, masked })
}

pub(crate) fn pss_terms<T: Real>(
    grads: &[[T; 3]],
    normals: &[[T; 3]],
) -> Result<(T, usize, Vec<[T; 3]>)> {
    if grads.len() != normals.len() {
        return Err(Error::Usage(format!(
            "{} gradients but {} normals",
            grads.len(),
            normals.len()
        )));
    }
    let min_sq = T::of(DEGENERATE_NORM * DEGENERATE_NORM);
    let keep: Vec<bool> = grads
        .iter()
        .zip(normals)
        .map(|(&g, &n)| dot(g, g) >= min_sq && dot(n, n) >= min_sq)
        .collect();
    let count = keep.iter().filter(|&&k| k).count();
    if count == 0 {
        return Err(Error::Usage("no usable gradient/normal pairs in batch".into()));
    }
    let inv = T::one() / T::of(count as f64);
    let two = T::one() + T::one();
    let mut total = T::zero();
    let mut bar = Vec::with_capacity(grads.len());
    for ((&g, &n), &k) in grads.iter().zip(normals).zip(&keep) {
        if !k {
            bar.push([T::zero(); 3]);
            continue;
        }
        let c = dot(g, n);
        let q = dot(g, g);
        let m = dot(n, n);
        let cos2 = c * c / (q * m);
        total += T::one() - cos2;
        // d/dg [1 - c^2/(q m)] = -(2c/(q m)) (n - (c/q) g)
        let scale = -(two * c / (q * m)) * inv;
        let ratio = c / q;
        bar.push([0, 1, 2].map(|i| scale * (n[i] - ratio * g[i])));
    }
    Ok((total * inv, grads.len() - count, bar))
}

/// Rake loss from network values at the rake points: mean `|f(s)|`, or the
/// literal signed mean when `signed` is set.
pub fn seeds_from_values<T: Real>(values: &[T], signed: bool) -> Result<T> {
    Ok(seeds_terms(values, signed)?.0)
}

pub(crate) fn seeds_terms<T: Real>(values: &[T], signed: bool) -> Result<(T, Vec<T>)> {
    if values.is_empty() {
        return Err(Error::Usage("rake loss over an empty seed set".into()));
    }
    let inv = T::one() / T::of(values.len() as f64);
    if signed {
        let total: T = values.iter().copied().sum();
        Ok((total * inv, vec![inv; values.len()]))
    } else {
        let total: T = values.iter().map(|v| v.abs()).sum();
        Ok((total * inv, values.iter().map(|&v| sign(v) * inv).collect()))
    }
}

/// Mean `|f(s)|` of the network over the rake points.
pub fn loss_seeds<T: Real>(net: &Network<T>, seeds: &[[T; 3]]) -> Result<T> {
    if seeds.is_empty() {
        return Err(Error::Usage("rake loss over an empty seed set".into()));
    }
    seeds_from_values(&net.forward_batch(seeds)?, false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn perp_examples() {
        assert_eq!(loss_perp(&[[1.0, 0.0, 0.0]], &[[0.0, 2.0, 0.0]]).unwrap(), 0.0);
        assert_eq!(loss_perp(&[[1.0, 1.0, 0.0]], &[[1.0, 0.0, 0.0]]).unwrap(), 1.0);
        let g = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]];
        let w = [[1.0, 0.0, 0.0], [1.0, 0.0, 0.0]];
        assert_eq!(loss_perp(&g, &w).unwrap(), 0.5);
    }

    #[test]
    fn perp_empty_or_mismatched_is_usage_error() {
        assert!(matches!(loss_perp::<f64>(&[], &[]), Err(Error::Usage(_))));
        assert!(matches!(loss_perp(&[[1.0f64; 3]], &[]), Err(Error::Usage(_))));
    }

    #[test]
    fn pss_examples() {
        let n = [[0.0, 3.0, 0.0]];
        assert_eq!(loss_pss(&[[0.0, -0.5, 0.0]], &n).unwrap().value, 0.0);
        assert_eq!(loss_pss(&[[2.0, 0.0, 0.0]], &n).unwrap().value, 1.0);
        let v = loss_pss(&[[1.0f64, 1.0, 0.0]], &n).unwrap().value;
        assert!((v - 0.5).abs() < 1e-15);
    }

    #[test]
    fn pss_masks_short_vectors() {
        let g = [[1.0, 0.0, 0.0], [0.0, 0.0, 0.0], [1.0, 0.0, 0.0]];
        let n = [[1.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1e-14, 0.0]];
        let out = loss_pss(&g, &n).unwrap();
        assert_eq!(out, PssLoss { value: 0.0, masked: 2 });
        assert!(matches!(loss_pss(&g[1..2], &n[1..2]), Err(Error::Usage(_))));
    }

    #[test]
    fn seeds_examples() {
        assert_eq!(seeds_from_values(&[0.0, 0.0], false).unwrap(), 0.0);
        assert_eq!(seeds_from_values(&[1.0, -1.0], false).unwrap(), 1.0);
        assert_eq!(seeds_from_values(&[1.0, -1.0], true).unwrap(), 0.0);
        assert_eq!(seeds_from_values(&[0.5, 0.5], false).unwrap(), 0.5);
        assert!(matches!(seeds_from_values::<f64>(&[], false), Err(Error::Usage(_))));
    }

    #[test]
    fn perp_gradient_matches_finite_differences() {
        let g = [[0.3, -0.2, 0.9], [1.0, 0.4, -0.1]];
        let w = [[0.5, 1.5, -0.3], [0.0, 0.2, 0.7]];
        let (_, bar) = perp_terms(&g, &w).unwrap();
        check_fd(&g, &bar, |g| loss_perp(g, &w).unwrap());
    }

    #[test]
    fn pss_gradient_matches_finite_differences() {
        let g = [[0.3, -0.2, 0.9], [1.0, 0.4, -0.1]];
        let n = [[0.5, 1.5, -0.3], [0.0, 0.2, 0.7]];
        let (_, _, bar) = pss_terms(&g, &n).unwrap();
        check_fd(&g, &bar, |g| loss_pss(g, &n).unwrap().value);
    }

    fn check_fd(g: &[[f64; 3]], bar: &[[f64; 3]], loss: impl Fn(&[[f64; 3]]) -> f64) {
        let h = 1e-6;
        for i in 0..g.len() {
            for c in 0..3 {
                let mut p = g.to_vec();
                let mut m = g.to_vec();
                p[i][c] += h;
                m[i][c] -= h;
                let fd = (loss(&p) - loss(&m)) / (2.0 * h);
                assert!((fd - bar[i][c]).abs() < 1e-7, "{fd} vs {}", bar[i][c]);
            }
        }
    }

    fn vec3() -> impl Strategy<Value = [f64; 3]> {
        [-5.0..5.0f64, -5.0..5.0f64, -5.0..5.0f64]
    }

    proptest! {
        #[test]
        fn perp_nonnegative_and_absolutely_homogeneous(
            pairs in prop::collection::vec((vec3(), vec3()), 1..20),
            c in -4.0..4.0f64,
        ) {
            let (g, w): (Vec<_>, Vec<_>) = pairs.into_iter().unzip();
            let base = loss_perp(&g, &w).unwrap();
            prop_assert!(base >= 0.0);
            let scaled: Vec<[f64; 3]> = w.iter().map(|v| v.map(|x| x * c)).collect();
            let got = loss_perp(&g, &scaled).unwrap();
            prop_assert!((got - c.abs() * base).abs() <= 1e-9 * (1.0 + base));
        }

        #[test]
        fn pss_bounded_and_scale_invariant(
            pairs in prop::collection::vec((vec3(), vec3()), 1..20),
            scales in prop::collection::vec((0.1..10.0f64, 0.1..10.0f64, any::<bool>(), any::<bool>()), 20),
        ) {
            let (g, n): (Vec<_>, Vec<_>) = pairs.into_iter().unzip();
            let Ok(base) = loss_pss(&g, &n) else { return Ok(()) };
            prop_assert!((0.0..=1.0 + 1e-12).contains(&base.value));
            let g2: Vec<[f64; 3]> = g.iter().zip(&scales).map(|(v, s)| {
                let k = if s.2 { -s.0 } else { s.0 };
                v.map(|x| x * k)
            }).collect();
            let n2: Vec<[f64; 3]> = n.iter().zip(&scales).map(|(v, s)| {
                let k = if s.3 { -s.1 } else { s.1 };
                v.map(|x| x * k)
            }).collect();
            let moved = loss_pss(&g2, &n2).unwrap();
            prop_assert!((moved.value - base.value).abs() < 1e-9);
        }
    }
}
