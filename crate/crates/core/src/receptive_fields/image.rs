use ndarray::Array2;

use super::RfSpec;
use crate::error::{invalid, Result};
use crate::temporal::{gaussian_derivative_sample, CascadeResponse};

/// A receptive field sampled over (time, log-frequency).
#[derive(Debug, Clone, PartialEq)]
pub struct KernelImage {
    /// `values[[i, m]]` at `times[i]`, `nus[m]`.
    pub values: Array2<f64>,
    pub times: Vec<f64>,
    /// Offsets from the centre frequency, semitones.
    pub nus: Vec<f64>,
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Samples `d_t^alpha d_nu^beta (g(nu - v t; s) T(t; tau_a))` on a grid with
/// steps `dt` (s) and `dnu` (semitones).
///
/// Time runs over `[-t_span/2, t_span/2]` for the Gaussian family and over
/// `[0, t_span]` for causal families; `nu` covers `[-nu_span/2, nu_span/2]`.
pub fn rf_kernel_image(
    spec: &RfSpec,
    t_span: f64,
    nu_span: f64,
    dt: f64,
    dnu: f64,
) -> Result<KernelImage> {
    spec.validate()?;
    if !(t_span > 0.0 && nu_span > 0.0 && dt > 0.0 && dnu > 0.0) {
        return Err(invalid("spans and steps must be positive"));
    }
    if !(spec.tau_a > 0.0 && spec.s > 0.0) {
        return Err(invalid("kernel images need tau_a > 0 and s > 0"));
    }
    let nt = (t_span / dt).round() as usize + 1;
    let nn = (nu_span / dnu).round() as usize + 1;
    let t_start = if spec.temporal.is_causal() {
        0.0
    } else {
        -0.5 * (nt - 1) as f64 * dt
    };
    let times: Vec<f64> = (0..nt).map(|i| t_start + i as f64 * dt).collect();
    let nus: Vec<f64> = (0..nn)
        .map(|m| (m as f64 - 0.5 * (nn - 1) as f64) * dnu)
        .collect();

    // temporal[i][m] = m-th derivative of T at times[i]
    let temporal: Vec<Vec<f64>> = match spec.temporal.continuous_ladder(spec.tau_a)? {
        None => times
            .iter()
            .map(|&t| {
                (0..=spec.alpha)
                    .map(|m| gaussian_derivative_sample(spec.tau_a, 0.0, m, t))
                    .collect()
            })
            .collect(),
        Some(ladder) => {
            let response = CascadeResponse::from_ladder(&ladder)?;
            let prop = response.propagator(dt);
            let mut state = response.initial_state();
            times
                .iter()
                .map(|_| {
                    let row = (0..=spec.alpha)
                        .map(|m| response.derivative(&state, m))
                        .collect();
                    state = response.step(&prop, &state);
                    row
                })
                .collect()
        }
    };

    let norm = spec.normalization();
    let v = spec.v;
    let values = Array2::from_shape_fn((nt, nn), |(i, m)| {
        let x = nus[m] - v * times[i];
        let sum: f64 = (0..=spec.alpha)
            .map(|j| {
                binomial(spec.alpha, j)
                    * (-v).powi(j as i32)
                    * gaussian_derivative_sample(spec.s, 0.0, spec.beta + j, x)
                    * temporal[i][spec.alpha - j]
            })
            .sum();
        sum * norm
    });
    Ok(KernelImage { values, times, nus })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::temporal::{gaussian_kernel_sample, TemporalFamily};

    #[test]
    fn smoothing_kernel_is_separable() {
        let spec = RfSpec::smoothing(TemporalFamily::Gaussian, 4e-4, 1.0);
        let img = rf_kernel_image(&spec, 0.2, 8.0, 2e-3, 0.25).unwrap();
        let mut worst: f64 = 0.0;
        for (i, &t) in img.times.iter().enumerate() {
            for (m, &nu) in img.nus.iter().enumerate() {
                let outer =
                    gaussian_kernel_sample(4e-4, 0.0, t) * gaussian_kernel_sample(1.0, 0.0, nu);
                worst = worst.max((img.values[[i, m]] - outer).abs());
            }
        }
        assert!(worst < 1e-10);
    }

    #[test]
    fn second_nu_derivative_integrates_to_zero() {
        let spec = RfSpec::smoothing(
            TemporalFamily::CausalLog {
                stages: 4,
                c: 2f64.sqrt(),
            },
            1e-4,
            1.0,
        )
        .with_derivative(0, 2);
        let img = rf_kernel_image(&spec, 0.1, 24.0, 1e-3, 0.05).unwrap();
        for row in img.values.outer_iter() {
            let integral: f64 = row.iter().sum::<f64>() * 0.05;
            assert!(integral.abs() < 1e-8);
        }
    }

    #[test]
    fn glissando_kernel_is_a_shear() {
        let base = RfSpec::smoothing(TemporalFamily::Gaussian, 1e-3, 1.0).with_derivative(0, 2);
        let sheared = base.with_glissando(30.0);
        let a = rf_kernel_image(&base, 0.2, 16.0, 5e-3, 0.1).unwrap();
        let b = rf_kernel_image(&sheared, 0.2, 16.0, 5e-3, 0.1).unwrap();
        for (i, &t) in a.times.iter().enumerate() {
            let shift = 30.0 * t / 0.1;
            for m in 40..(a.nus.len() - 40) {
                let src = m as f64 - shift;
                if src < 1.0 || src > (a.nus.len() - 3) as f64 {
                    continue;
                }
                let row: Vec<f64> = a.values.row(i).to_vec();
                let expected = super::super::catmull_rom(&row, src);
                assert!((b.values[[i, m]] - expected).abs() < 2e-3, "{i} {m}");
            }
        }
    }
}
