//! Difference operators over the frame and channel axes.

use ndarray::{Array2, Axis};

/// Backward difference `(v[j] - v[j-1]) / h` with `v[-1] = v[0]`.
pub fn backward_diff(v: &[f64], h: f64) -> Vec<f64> {
    (0..v.len())
        .map(|j| (v[j] - v[j.saturating_sub(1)]) / h)
        .collect()
}

/// Central first difference `(v[j+1] - v[j-1]) / (2h)` with mirrored ends.
pub fn central_diff(v: &[f64], h: f64) -> Vec<f64> {
    let n = v.len();
    (0..n)
        .map(|j| (v[(j + 1).min(n - 1)] - v[j.saturating_sub(1)]) / (2.0 * h))
        .collect()
}

/// Central second difference `(v[j+1] - 2 v[j] + v[j-1]) / h^2` with mirrored ends.
pub fn central_second_diff(v: &[f64], h: f64) -> Vec<f64> {
    let n = v.len();
    (0..n)
        .map(|j| (v[(j + 1).min(n - 1)] - 2.0 * v[j] + v[j.saturating_sub(1)]) / (h * h))
        .collect()
}

/// Temporal derivative of order `order` along each channel.
///
/// Causal data only uses present and past frames, so every order is a chain
/// of backward differences (`(1, -2, 1)` at `j-2, j-1, j` for order two).
/// Non-causal data uses centred second differences and one backward
/// difference for odd orders.
pub fn time_derivative(values: &Array2<f64>, order: usize, dt: f64, causal: bool) -> Array2<f64> {
    if order == 0 {
        return values.clone();
    }
    let mut out = values.clone();
    for mut col in out.axis_iter_mut(Axis(1)) {
        let mut v = col.to_vec();
        if causal {
            for _ in 0..order {
                v = backward_diff(&v, dt);
            }
        } else {
            for _ in 0..order / 2 {
                v = central_second_diff(&v, dt);
            }
            if order % 2 == 1 {
                v = backward_diff(&v, dt);
            }
        }
        col.iter_mut().zip(v).for_each(|(d, x)| *d = x);
    }
    out
}

/// Derivative of order `order` along the MIDI axis of each frame: centred
/// second differences, plus one centred first difference for odd orders.
pub fn nu_derivative(values: &Array2<f64>, order: usize, dnu: f64) -> Array2<f64> {
    if order == 0 {
        return values.clone();
    }
    let mut out = values.clone();
    for mut row in out.axis_iter_mut(Axis(0)) {
        let mut v = row.to_vec();
        for _ in 0..order / 2 {
            v = central_second_diff(&v, dnu);
        }
        if order % 2 == 1 {
            v = central_diff(&v, dnu);
        }
        row.iter_mut().zip(v).for_each(|(d, x)| *d = x);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stencils_on_polynomials() {
        let h = 0.5;
        let v: Vec<f64> = (0..10).map(|i| (i as f64 * h).powi(2)).collect();
        let d1 = central_diff(&v, h);
        let d2 = central_second_diff(&v, h);
        for j in 1..9 {
            assert!((d1[j] - 2.0 * j as f64 * h).abs() < 1e-12);
            assert!((d2[j] - 2.0).abs() < 1e-12);
        }
        let b = backward_diff(&v, h);
        assert_eq!(b[0], 0.0);
        assert!((b[3] - (v[3] - v[2]) / h).abs() < 1e-15);
    }

    #[test]
    fn causal_second_difference_is_backward_shifted() {
        let v = Array2::from_shape_vec((5, 1), vec![0.0, 1.0, 4.0, 9.0, 16.0]).unwrap();
        let d = time_derivative(&v, 2, 1.0, true);
        assert_eq!(d[[4, 0]], 16.0 - 2.0 * 9.0 + 4.0);
    }
}
