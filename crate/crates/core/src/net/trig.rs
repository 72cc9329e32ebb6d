//! Batched `sin(w z)` and `w cos(w z)` for single precision.
//!
//! Range reduction runs in double precision against `pi/2`; the reduced
//! argument is then fed to short minimax polynomials on `[-pi/4, pi/4]`.
//! Absolute error stays below `2e-7` for `|w z| < 2^20`; larger arguments
//! fall back to the standard library.

const FRAC_2_PI: f64 = std::f64::consts::FRAC_2_PI;
const FRAC_PI_2: f64 = std::f64::consts::FRAC_PI_2;
const REDUCE_LIMIT: f32 = (1 << 20) as f32;

#[inline(always)]
fn sin_cos_reduced(x: f32) -> (f32, f32) {
    // adding 1.5 * 2^52 rounds to the nearest integer and leaves it in the low mantissa bits
    const SHIFT: f64 = 6_755_399_441_055_744.0;
    let xd = f64::from(x);
    let shifted = xd * FRAC_2_PI + SHIFT;
    let k = shifted - SHIFT;
    let r = (xd - k * FRAC_PI_2) as f32;
    let q = shifted.to_bits() as u32;
    let r2 = r * r;
    let s = r + r * r2 * (-1.666_665_5e-1 + r2 * (8.332_161e-3 + r2 * -1.951_529_6e-4));
    let c = 1.0 - 0.5 * r2 + r2 * r2 * (4.166_664_6e-2 + r2 * (-1.388_731_6e-3 + r2 * 2.443_315_7e-5));
    let (s, c) = if q & 1 == 0 { (s, c) } else { (c, s) };
    let s = if q & 2 == 0 { s } else { -s };
    let c = if q.wrapping_add(1) & 2 == 0 { c } else { -c };
    (s, c)
}

/// Writes `sin(omega z)` into `sin` and, when given, `omega cos(omega z)` into `dcos`.
pub(crate) fn sine_f32(omega: f32, z: &[f32], sin: &mut [f32], dcos: Option<&mut [f32]>) {
    #[cfg(target_arch = "x86_64")]
    {
        if std::arch::is_x86_feature_detected!("avx2") && std::arch::is_x86_feature_detected!("fma") {
            // SAFETY: the required features were detected at runtime
            unsafe { sine_f32_avx2(omega, z, sin, dcos) };
            return;
        }
    }
    sine_f32_generic(omega, z, sin, dcos);
}

#[cfg(target_arch = "x86_64")]
#[target_feature(enable = "avx2,fma")]
unsafe fn sine_f32_avx2(omega: f32, z: &[f32], sin: &mut [f32], dcos: Option<&mut [f32]>) {
    sine_f32_generic(omega, z, sin, dcos);
}

#[inline(always)]
fn sine_f32_generic(omega: f32, z: &[f32], sin: &mut [f32], dcos: Option<&mut [f32]>) {
    match dcos {
        Some(dcos) => {
            for ((&v, s), d) in z.iter().zip(sin.iter_mut()).zip(dcos.iter_mut()) {
                let (a, b) = sin_cos_reduced(omega * v);
                *s = a;
                *d = omega * b;
            }
            if z.iter().any(|&v| !((omega * v).abs() < REDUCE_LIMIT)) {
                fixup(omega, z, sin, Some(dcos));
            }
        }
        None => {
            for (&v, s) in z.iter().zip(sin.iter_mut()) {
                *s = sin_cos_reduced(omega * v).0;
            }
            if z.iter().any(|&v| !((omega * v).abs() < REDUCE_LIMIT)) {
                fixup(omega, z, sin, None);
            }
        }
    }
}

#[cold]
fn fixup(omega: f32, z: &[f32], sin: &mut [f32], mut dcos: Option<&mut [f32]>) {
    for (i, &v) in z.iter().enumerate() {
        let x = omega * v;
        if !(x.abs() < REDUCE_LIMIT) {
            sin[i] = x.sin();
            if let Some(d) = dcos.as_deref_mut() {
                d[i] = omega * x.cos();
            }
        }
    }
}

/// Same contract as [`sine_f32`], through the standard library.
pub(crate) fn sine_std<T: num_traits::Float>(omega: T, z: &[T], sin: &mut [T], dcos: Option<&mut [T]>) {
    match dcos {
        Some(dcos) => {
            for ((&v, s), d) in z.iter().zip(sin.iter_mut()).zip(dcos.iter_mut()) {
                let (a, b) = (omega * v).sin_cos();
                *s = a;
                *d = omega * b;
            }
        }
        None => {
            for (&v, s) in z.iter().zip(sin.iter_mut()) {
                *s = (omega * v).sin();
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn matches_double_precision_over_wide_range() {
        let z: Vec<f32> = (-200_000..=200_000).map(|i| i as f32 * 1.7e-3).collect();
        let mut s = vec![0.0; z.len()];
        let mut c = vec![0.0; z.len()];
        sine_f32(1.0, &z, &mut s, Some(&mut c));
        for ((&v, &a), &b) in z.iter().zip(&s).zip(&c) {
            let x = f64::from(v);
            assert!((f64::from(a) - x.sin()).abs() < 2e-7, "sin {x}");
            assert!((f64::from(b) - x.cos()).abs() < 2e-7, "cos {x}");
        }
    }

    #[test]
    fn quadrant_boundaries() {
        use std::f32::consts::{FRAC_PI_2, PI};
        let pts = [0.0f32, 1.0, -1.0, FRAC_PI_2, PI, -PI];
        let mut s = [0.0; 6];
        let mut c = [0.0; 6];
        sine_f32(1.0, &pts, &mut s, Some(&mut c));
        for i in 0..6 {
            assert!((s[i] - pts[i].sin()).abs() < 2e-7);
            assert!((c[i] - pts[i].cos()).abs() < 2e-7);
        }
    }

    #[test]
    fn huge_and_non_finite_arguments_fall_back() {
        let z = [3.0e7f32, f32::NAN, f32::INFINITY];
        let mut s = [0.0; 3];
        let mut c = [0.0; 3];
        sine_f32(30.0, &z, &mut s, Some(&mut c));
        assert_eq!(s[0], (30.0f32 * 3.0e7).sin());
        assert_eq!(c[0], 30.0 * (30.0f32 * 3.0e7).cos());
        assert!(s[1].is_nan() && s[2].is_nan() && c[1].is_nan());
    }

    proptest! {
        #[test]
        fn scaled_cosine_is_omega_times_cos(omega in 0.5f32..60.0, v in -5.0f32..5.0) {
            let mut s = [0.0];
            let mut c = [0.0];
            sine_f32(omega, &[v], &mut s, Some(&mut c));
            let x = f64::from(omega * v);
            prop_assert!((f64::from(c[0]) - f64::from(omega) * x.cos()).abs() < 2e-7 * f64::from(omega) + 1e-12);
            prop_assert!((f64::from(s[0]).powi(2) + (f64::from(c[0]) / f64::from(omega)).powi(2) - 1.0).abs() < 1e-6);
        }
    }
}
