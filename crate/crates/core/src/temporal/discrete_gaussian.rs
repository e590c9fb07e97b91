//! The discrete analogue of the Gaussian kernel, `T(n; s) = e^{-s} I_n(s)`,
//! and convolution with mirrored boundaries.

use super::kernel::SampledKernel;
use crate::error::{invalid, Result};

/// Default truncation tolerance on the discarded tail mass.
pub const DEFAULT_EPSILON: f64 = 1e-6;

const RESCALE_ABOVE: f64 = 1e200;

/// Truncated discrete Gaussian with variance `s` (samples²).
///
/// The kernel is cut at the smallest `N` for which the retained mass
/// exceeds `1 - epsilon` and then renormalized to unit sum.
pub fn discrete_gaussian_kernel(s: f64, epsilon: f64) -> Result<SampledKernel> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(invalid(format!(
            "truncation epsilon must lie in (0, 1), got {epsilon}"
        )));
    }
    if !(s >= 0.0 && s.is_finite()) {
        return Err(invalid(format!(
            "discrete Gaussian scale must be >= 0, got {s}"
        )));
    }
    if s == 0.0 {
        return Ok(SampledKernel::identity());
    }
    let half = scaled_bessel_sequence(s, epsilon);
    let mut mass = half[0];
    let mut n = 0;
    while mass <= 1.0 - epsilon && n + 1 < half.len() {
        n += 1;
        mass += 2.0 * half[n];
    }
    let mut values = Vec::with_capacity(2 * n + 1);
    values.extend(half[1..=n].iter().rev());
    values.extend(&half[..=n]);
    values.iter_mut().for_each(|v| *v /= mass);
    Ok(SampledKernel {
        values,
        origin_index: n,
        dt: 1.0,
    })
}

/// `e^{-s} I_n(s)` for `n = 0..M` by Miller's backward recurrence, normalized
/// through `I_0 + 2 sum I_n = e^s`.
fn scaled_bessel_sequence(s: f64, epsilon: f64) -> Vec<f64> {
    let sigma = s.sqrt();
    // Gaussian tail estimate for the truncation point plus a generous margin
    // for the recurrence to forget its arbitrary start.
    let z = tail_quantile(epsilon);
    let n_est = (z * sigma).ceil() as usize + 2;
    let start = n_est + (6.0 * sigma).ceil() as usize + 30;
    let mut seq = vec![0.0; start + 2];
    seq[start] = 1.0;
    for n in (1..=start).rev() {
        let next = seq[n + 1] + (2.0 * n as f64 / s) * seq[n];
        seq[n - 1] = next;
        if next > RESCALE_ABOVE {
            for v in &mut seq[n - 1..] {
                *v /= RESCALE_ABOVE;
            }
        }
    }
    seq.truncate(start + 1);
    let total = seq[0] + 2.0 * seq[1..].iter().sum::<f64>();
    seq.iter_mut().for_each(|v| *v /= total);
    seq
}

/// `z` with `erfc(z / sqrt 2) ~= epsilon`, conservative by a small margin.
fn tail_quantile(epsilon: f64) -> f64 {
    // sqrt(2 ln(1/eps)) bounds the normal tail quantile from above.
    (2.0 * (1.0 / epsilon).ln()).sqrt() + 1.0
}

/// Index into a signal of length `len` with half-sample mirror extension
/// (`x[-1] = x[0]`, `x[len] = x[len-1]`), repeated as often as needed.
#[inline]
pub fn mirror_index(i: i64, len: usize) -> usize {
    let period = 2 * len as i64;
    let r = i.rem_euclid(period);
    if r < len as i64 {
        r as usize
    } else {
        (period - 1 - r) as usize
    }
}

/// Convolves a real signal with a kernel, mirroring at both boundaries.
pub fn convolve_mirror(signal: &[f64], kernel: &SampledKernel) -> Vec<f64> {
    let len = signal.len();
    if len == 0 {
        return Vec::new();
    }
    let origin = kernel.origin_index as i64;
    (0..len as i64)
        .map(|i| {
            kernel
                .values
                .iter()
                .enumerate()
                .map(|(j, w)| {
                    let offset = j as i64 - origin;
                    w * signal[mirror_index(i - offset, len)]
                })
                .sum()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    /// `e^{-s} I_n(s) = (1/pi) int_0^pi e^{s (cos th - 1)} cos(n th) dth`;
    /// the trapezoid rule is spectrally accurate for this periodic integrand.
    fn bessel_quadrature(n: i64, s: f64) -> f64 {
        let m = 4000;
        let h = PI / m as f64;
        let f = |th: f64| (s * (th.cos() - 1.0)).exp() * (n as f64 * th).cos();
        let mut acc = 0.5 * (f(0.0) + f(PI));
        for i in 1..m {
            acc += f(i as f64 * h);
        }
        acc * h / PI
    }

    #[test]
    fn zero_scale_is_identity() {
        let k = discrete_gaussian_kernel(0.0, 1e-6).unwrap();
        assert_eq!(k.values, vec![1.0]);
        assert_eq!(k.origin_index, 0);
    }

    #[test]
    fn central_tap_at_unit_scale() {
        let k = discrete_gaussian_kernel(1.0, 1e-12).unwrap();
        // I_0(1) = 1.2660658777520082
        assert!((k.at(0) - (-1f64).exp() * 1.266_065_877_752_008_2).abs() < 1e-12);
        assert!((k.at(0) - 0.46576).abs() < 1e-5);
    }

    #[test]
    fn matches_quadrature_over_many_scales() {
        for &s in &[1e-3, 0.3, 1.0, 4.5, 37.0, 400.0, 2.5e4] {
            let k = discrete_gaussian_kernel(s, 1e-13).unwrap();
            let n_max = k.origin_index as i64;
            for n in [0, 1, 2, n_max / 3, n_max / 2] {
                let q = bessel_quadrature(n, s);
                assert!(
                    (k.at(n) - q).abs() < 1e-12,
                    "s={s} n={n}: {} vs {q}",
                    k.at(n)
                );
            }
        }
    }

    #[test]
    fn stable_at_very_large_scale() {
        let s = 2.0e7;
        let k = discrete_gaussian_kernel(s, 1e-6).unwrap();
        assert!((k.sum() - 1.0).abs() < 1e-12);
        assert!((k.variance() - s).abs() / s < 1e-4);
        assert!(k.values.iter().all(|v| v.is_finite() && *v >= 0.0));
    }

    #[test]
    fn truncation_keeps_required_mass() {
        for &eps in &[1e-4, 1e-6, 1e-10] {
            let k = discrete_gaussian_kernel(9.0, eps).unwrap();
            let n = k.origin_index as i64;
            let kept: f64 = (-n..=n).map(|i| bessel_quadrature(i, 9.0)).sum();
            assert!(kept > 1.0 - eps);
            // one tap fewer would not have been enough
            let fewer: f64 = (-(n - 1)..n).map(|i| bessel_quadrature(i, 9.0)).sum();
            assert!(fewer <= 1.0 - eps + 1e-14);
        }
    }

    #[test]
    fn semigroup() {
        let a = discrete_gaussian_kernel(2.0, 1e-14).unwrap();
        let ab = a.convolve(&a);
        let direct = discrete_gaussian_kernel(4.0, 1e-14).unwrap();
        let span = ab.origin_index.max(direct.origin_index) as i64;
        let err = (-span..=span)
            .map(|n| (ab.at(n) - direct.at(n)).abs())
            .fold(0.0, f64::max);
        assert!(err < 1e-8, "{err}");
    }

    #[test]
    fn rejects_bad_epsilon() {
        assert!(discrete_gaussian_kernel(1.0, 0.0).is_err());
        assert!(discrete_gaussian_kernel(1.0, 1.0).is_err());
        assert!(discrete_gaussian_kernel(-1.0, 1e-6).is_err());
    }

    #[test]
    fn mirror_index_reflects_half_sample() {
        let idx: Vec<usize> = (-4..8).map(|i| mirror_index(i, 4)).collect();
        assert_eq!(idx, vec![3, 2, 1, 0, 0, 1, 2, 3, 3, 2, 1, 0]);
    }

    #[test]
    fn mirrored_convolution_preserves_constants() {
        let k = discrete_gaussian_kernel(30.0, 1e-10).unwrap();
        let out = convolve_mirror(&[2.5; 7], &k);
        assert!(out.iter().all(|v| (v - 2.5).abs() < 1e-9));
    }
}
