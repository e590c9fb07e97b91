//! Second-layer spectro-temporal receptive fields over the dB spectrogram.
//!
//! A receptive field smooths the log-spectrogram separably (over time with a
//! Gaussian or time-causal kernel, over the MIDI axis with a Gaussian),
//! optionally along a glissando direction, and then applies difference
//! operators in time and log-frequency.

mod image;
mod smoothing;
pub mod stencil;
mod warp;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::grid::TimeFrequencyGrid;
use crate::temporal::TemporalFamily;

pub use image::{rf_kernel_image, KernelImage};
pub use smoothing::{
    settle_frames, spectral_smooth, spectral_smooth_with_epsilon, temporal_smooth, SETTLE_TAIL,
};
pub use warp::{catmull_rom, glissando_unwarp, glissando_warp};

use smoothing::{spread_warmup, FrameSmoother};

/// Parameters of a second-layer receptive field.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RfSpec {
    pub temporal: TemporalFamily,
    /// Temporal scale, s².
    pub tau_a: f64,
    /// Spectral scale, semitones².
    pub s: f64,
    /// Glissando, semitones per second.
    pub v: f64,
    /// Order of the temporal derivative.
    pub alpha: usize,
    /// Order of the log-frequency derivative.
    pub beta: usize,
    /// Multiply by `tau_a^(alpha/2) s^(beta/2)`.
    pub normalized: bool,
}

impl RfSpec {
    pub fn smoothing(temporal: TemporalFamily, tau_a: f64, s: f64) -> Self {
        Self {
            temporal,
            tau_a,
            s,
            v: 0.0,
            alpha: 0,
            beta: 0,
            normalized: true,
        }
    }

    pub fn with_derivative(mut self, alpha: usize, beta: usize) -> Self {
        self.alpha = alpha;
        self.beta = beta;
        self
    }

    pub fn with_glissando(mut self, v: f64) -> Self {
        self.v = v;
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.temporal.validate()?;
        if !(self.tau_a >= 0.0) || !self.tau_a.is_finite() {
            return Err(invalid(format!(
                "temporal scale must be >= 0, got {}",
                self.tau_a
            )));
        }
        if !(self.s >= 0.0) || !self.s.is_finite() {
            return Err(invalid(format!(
                "spectral scale must be >= 0, got {}",
                self.s
            )));
        }
        if !self.v.is_finite() {
            return Err(invalid("glissando must be finite"));
        }
        if let Some(k) = self.temporal.stages() {
            if self.alpha >= k {
                return Err(invalid(format!(
                    "temporal derivative order {} needs more than {k} cascade stages",
                    self.alpha
                )));
            }
        }
        Ok(())
    }

    /// Scale normalization factor `tau_a^(alpha/2) s^(beta/2)`.
    pub fn normalization(&self) -> f64 {
        if !self.normalized {
            return 1.0;
        }
        self.tau_a.powf(self.alpha as f64 / 2.0) * self.s.powf(self.beta as f64 / 2.0)
    }
}

/// Receptive field response on the axes of the input.
#[derive(Debug, Clone, PartialEq)]
pub struct RfResponse {
    pub grid: TimeFrequencyGrid<f64>,
    pub spec: RfSpec,
}

/// Smooths `input` as described by `spec`, without derivatives.
///
/// A non-zero glissando warps the plane to `nu' = nu - v (t - t_ref)` with
/// padding, smooths separably there and warps back.
pub fn rf_smooth(input: &TimeFrequencyGrid<f64>, spec: &RfSpec) -> Result<TimeFrequencyGrid<f64>> {
    spec.validate()?;
    if input.frames() == 0 || input.channels() == 0 {
        return Err(invalid("empty grid"));
    }
    if spec.v == 0.0 {
        let t = temporal_smooth(input, &spec.temporal, spec.tau_a)?;
        return spectral_smooth(&t, spec.s);
    }
    let frames = input.frames();
    let channels = input.channels();
    let dnu = input.nu_step();
    let t_ref = input.time(frames / 2);
    let max_shift = (0..frames)
        .map(|j| warp::shift_bins(input, spec.v, t_ref, j).abs())
        .fold(0.0, f64::max);
    let pad = max_shift.ceil() as usize + 2;
    let warped_values = warp::resample_rows(&input.values, channels + 2 * pad, |j| {
        warp::shift_bins(input, spec.v, t_ref, j) - pad as f64
    });
    let warped = TimeFrequencyGrid {
        values: warped_values,
        t0: input.t0,
        frame_step: input.frame_step,
        nus: (0..channels + 2 * pad)
            .map(|q| input.nus[0] + (q as f64 - pad as f64) * dnu)
            .collect(),
        warmup: vec![0; channels + 2 * pad],
    };
    let smoother = FrameSmoother::new(&spec.temporal, spec.tau_a, input.frame_step)?;
    let t_reach = smoother.reach();
    let smoothed = spectral_smooth(
        &temporal_smooth(&warped, &spec.temporal, spec.tau_a)?,
        spec.s,
    )?;
    let s_reach = smoothed
        .warmup
        .iter()
        .copied()
        .max()
        .unwrap_or(0)
        .saturating_sub(t_reach);
    let values = warp::resample_rows(&smoothed.values, channels, |j| {
        pad as f64 - warp::shift_bins(input, spec.v, t_ref, j)
    });
    let mut out = input.with_values(values);
    let glide = (spec.v.abs() * t_reach as f64 * input.frame_step / dnu).ceil() as usize;
    out.warmup = spread_warmup(&input.warmup, s_reach + glide + 2)
        .into_iter()
        .map(|w| (w + t_reach).min(frames))
        .collect();
    Ok(out)
}

/// Applies the receptive field `spec` to a dB spectrogram grid.
pub fn apply_rf(input: &TimeFrequencyGrid<f64>, spec: &RfSpec) -> Result<RfResponse> {
    let smoothed = rf_smooth(input, spec)?;
    Ok(RfResponse {
        grid: derivatives(&smoothed, spec),
        spec: *spec,
    })
}

/// Difference operators and normalization on an already smoothed grid.
pub(crate) fn derivatives(
    smoothed: &TimeFrequencyGrid<f64>,
    spec: &RfSpec,
) -> TimeFrequencyGrid<f64> {
    let dt = stencil::time_derivative(
        &smoothed.values,
        spec.alpha,
        smoothed.frame_step,
        spec.temporal.is_causal(),
    );
    let mut d = stencil::nu_derivative(&dt, spec.beta, smoothed.nu_step());
    let norm = spec.normalization();
    if norm != 1.0 {
        d.mapv_inplace(|x| x * norm);
    }
    let mut out = smoothed.with_values(d);
    out.warmup = spread_warmup(&smoothed.warmup, spec.beta)
        .into_iter()
        .map(|w| (w + spec.alpha).min(smoothed.frames()))
        .collect();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::Array2;

    fn grid(values: Array2<f64>, frame_step: f64, nu_step: f64) -> TimeFrequencyGrid<f64> {
        let ch = values.ncols();
        TimeFrequencyGrid {
            values,
            t0: 0.0,
            frame_step,
            nus: (0..ch).map(|c| 40.0 + nu_step * c as f64).collect(),
            warmup: vec![0; ch],
        }
    }

    fn textured(frames: usize, ch: usize) -> Array2<f64> {
        Array2::from_shape_fn((frames, ch), |(j, c)| {
            (0.05 * j as f64).sin() * 10.0 + (0.3 * c as f64).cos() * 5.0
        })
    }

    #[test]
    fn limit_case_is_identity() {
        let g = grid(textured(30, 20), 1e-3, 0.25);
        let out = apply_rf(&g, &RfSpec::smoothing(TemporalFamily::Gaussian, 0.0, 0.0)).unwrap();
        assert_eq!(out.grid.values, g.values);
    }

    #[test]
    fn derivatives_of_constants_vanish() {
        let g = grid(Array2::from_elem((60, 30), -42.0), 1e-3, 0.25);
        for family in [
            TemporalFamily::Gaussian,
            TemporalFamily::CausalUniform { stages: 4 },
        ] {
            for (a, b) in [(1, 0), (0, 1), (2, 0), (0, 2), (1, 1)] {
                let spec = RfSpec::smoothing(family, 4e-6, 0.5).with_derivative(a, b);
                let out = apply_rf(&g, &spec).unwrap();
                assert!(
                    out.grid.values.iter().all(|v| v.abs() < 1e-9),
                    "{family:?} {a} {b}"
                );
            }
        }
    }

    #[test]
    fn db_offset_is_removed_by_derivatives() {
        let base = grid(textured(80, 40), 1e-3, 0.25);
        let shifted = base.map(|v| v + 20.0);
        for spec in [
            RfSpec::smoothing(
                TemporalFamily::CausalLog {
                    stages: 4,
                    c: 2f64.sqrt(),
                },
                2e-5,
                1.0,
            )
            .with_derivative(1, 0),
            RfSpec::smoothing(TemporalFamily::Gaussian, 2e-5, 1.0).with_derivative(0, 2),
            RfSpec::smoothing(TemporalFamily::Gaussian, 2e-5, 1.0)
                .with_derivative(0, 2)
                .with_glissando(20.0),
        ] {
            let a = apply_rf(&base, &spec).unwrap().grid;
            let b = apply_rf(&shifted, &spec).unwrap().grid;
            assert!(a.max_abs_diff_settled(&b) < 1e-9);
        }
    }

    #[test]
    fn rejects_derivative_order_beyond_cascade() {
        let g = grid(textured(10, 5), 1e-3, 0.25);
        let spec = RfSpec::smoothing(TemporalFamily::CausalUniform { stages: 2 }, 1e-5, 0.0)
            .with_derivative(2, 0);
        assert!(apply_rf(&g, &spec).is_err());
    }

    #[test]
    fn normalization_factor() {
        let spec = RfSpec::smoothing(TemporalFamily::Gaussian, 4.0, 9.0).with_derivative(1, 2);
        assert_eq!(spec.normalization(), 2.0 * 9.0);
        let raw = RfSpec {
            normalized: false,
            ..spec
        };
        assert_eq!(raw.normalization(), 1.0);
    }

    #[test]
    fn zero_glissando_warp_is_identity() {
        let g = grid(textured(12, 9), 1e-3, 0.25);
        assert_eq!(glissando_warp(&g, 0.0), g);
        assert_eq!(glissando_unwarp(&g, 0.0), g);
    }

    #[test]
    fn second_nu_difference_converges_quadratically() {
        // analytic oracle: d²/dnu² sin(2 pi nu / 24) = -(2 pi / 24)² sin(2 pi nu / 24)
        let k = 2.0 * std::f64::consts::PI / 24.0;
        let err = |step: f64| {
            let ch = (48.0 / step) as usize;
            let g = TimeFrequencyGrid {
                values: Array2::from_shape_fn((1, ch), |(_, c)| (k * c as f64 * step).sin()),
                t0: 0.0,
                frame_step: 1.0,
                nus: (0..ch).map(|c| c as f64 * step).collect(),
                warmup: vec![0],
            };
            let d = stencil::nu_derivative(&g.values, 2, step);
            (ch / 4..3 * ch / 4)
                .map(|c| (d[[0, c]] + k * k * g.values[[0, c]]).abs())
                .fold(0.0, f64::max)
        };
        let ratio = err(0.5) / err(0.25);
        assert!((ratio - 4.0).abs() < 0.2, "{ratio}");
    }
}
