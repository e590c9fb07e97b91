use std::f64::consts::TAU;

use ndarray::Array2;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::freq_grid::FrequencyGrid;
use super::window::WindowScale;
use crate::error::{invalid, Result};
use crate::grid::TimeFrequencyGrid;
use crate::temporal::{
    discrete_gaussian_kernel, mirror_index, warmup_samples, ScaleLadder, TemporalFamily,
    DEFAULT_EPSILON,
};

/// Smallest per-stage time constant (samples) accepted for a causal channel.
pub const MIN_STAGE_MU: f64 = 1e-6;

/// Samples between exact recomputations of the carrier phase.
const PHASE_RESYNC: usize = 256;

/// Parameters of a multi-scale spectrogram.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrogramConfig {
    pub grid: FrequencyGrid,
    pub window: WindowScale,
    pub family: TemporalFamily,
    /// Samples between stored frames.
    pub hop: usize,
    /// Tail tolerance of the discrete Gaussian window.
    pub epsilon: f64,
}

impl SpectrogramConfig {
    pub fn new(
        grid: FrequencyGrid,
        window: WindowScale,
        family: TemporalFamily,
        hop: usize,
    ) -> Self {
        Self {
            grid,
            window,
            family,
            hop,
            epsilon: DEFAULT_EPSILON,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.hop == 0 {
            return Err(invalid("hop must be at least one sample"));
        }
        if self.grid.is_empty() {
            return Err(invalid("frequency grid has no channels"));
        }
        self.window.validate()?;
        self.family.validate()
    }
}

/// Hop of one millisecond, rounded to whole samples.
pub fn default_hop(sample_rate: f64) -> usize {
    ((sample_rate * 1e-3).round() as usize).max(1)
}

/// Complex spectrogram with its per-channel window parameters.
///
/// Values follow `S = smooth(f cos wt) - i smooth(f sin wt)`: the signal is
/// demodulated by `e^{-i w t}` before smoothing. Multiply by `e^{i w t}` (see
/// [`ComplexSpectrogram::convolution_phase`]) to obtain the phase of a
/// convolution with the complex window `h(t) e^{i w t}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexSpectrogram {
    pub grid: TimeFrequencyGrid<Complex64>,
    pub omegas: Vec<f64>,
    /// Window variance per channel, s².
    pub tau_window: Vec<f64>,
    pub family: TemporalFamily,
    pub sample_rate: f64,
    pub hop: usize,
    pub delay_compensated: bool,
    /// Part of the compensating delay (s) not removed by whole-frame shifts.
    pub residual_delay: Vec<f64>,
}

impl ComplexSpectrogram {
    pub fn frames(&self) -> usize {
        self.grid.frames()
    }

    pub fn channels(&self) -> usize {
        self.grid.channels()
    }

    pub fn magnitude(&self) -> TimeFrequencyGrid<f64> {
        self.grid.map(|z| z.norm())
    }

    /// Values with the carrier phase `e^{i w t}` of each frame restored.
    pub fn convolution_phase(&self) -> TimeFrequencyGrid<Complex64> {
        let mut out = self.grid.clone();
        for ((j, c), z) in out.values.indexed_iter_mut() {
            let t = self.grid.time(j);
            *z *= Complex64::from_polar(1.0, (self.omegas[c] * t).rem_euclid(TAU));
        }
        out
    }
}

/// Computes the multi-scale complex spectrogram of `signal` sampled at `sample_rate` Hz.
///
/// Causal families run the recursive cascade at full rate and keep every
/// `hop`-th output; the Gaussian family evaluates windowed sums at the frame
/// centres with mirrored boundaries. Frame `j` lies at `t = j hop / rate`.
pub fn compute_spectrogram(
    signal: &[f64],
    sample_rate: f64,
    config: &SpectrogramConfig,
) -> Result<ComplexSpectrogram> {
    config.validate()?;
    if signal.is_empty() {
        return Err(invalid("signal is empty"));
    }
    if !(sample_rate > 0.0) {
        return Err(invalid("sample rate must be positive"));
    }
    let hop = config.hop;
    let frames = signal.len().div_ceil(hop);
    let omegas = config.grid.omegas();
    let taus: Vec<f64> = omegas.iter().map(|&w| config.window.tau(w)).collect();

    let ladders = taus
        .iter()
        .map(|&tau| {
            let ladder = config
                .family
                .discrete_ladder(tau * sample_rate * sample_rate)?;
            if let Some(l) = &ladder {
                if l.min_mu() < MIN_STAGE_MU {
                    return Err(invalid(format!(
                        "window scale {tau} s² gives a degenerate stage time constant {} samples",
                        l.min_mu()
                    )));
                }
            }
            Ok(ladder)
        })
        .collect::<Result<Vec<_>>>()?;

    let columns: Vec<Result<(Vec<Complex64>, usize)>> = (0..omegas.len())
        .into_par_iter()
        .map(|c| {
            let phase_step = omegas[c] / sample_rate;
            match &ladders[c] {
                Some(ladder) => {
                    let col = causal_channel(signal, phase_step, ladder, hop, frames);
                    Ok((col, warmup_samples(ladder).div_ceil(hop)))
                }
                None => {
                    let s = taus[c] * sample_rate * sample_rate;
                    let col = gaussian_channel(signal, phase_step, s, config.epsilon, hop, frames)?;
                    Ok((col, 0))
                }
            }
        })
        .collect();

    let mut values = Array2::<Complex64>::zeros((frames, omegas.len()));
    let mut warmup = Vec::with_capacity(omegas.len());
    for (c, col) in columns.into_iter().enumerate() {
        let (col, w) = col?;
        values
            .column_mut(c)
            .iter_mut()
            .zip(col)
            .for_each(|(dst, v)| *dst = v);
        warmup.push(w.min(frames));
    }
    Ok(ComplexSpectrogram {
        grid: TimeFrequencyGrid {
            values,
            t0: 0.0,
            frame_step: hop as f64 / sample_rate,
            nus: config.grid.nus().to_vec(),
            warmup,
        },
        residual_delay: vec![0.0; omegas.len()],
        omegas,
        tau_window: taus,
        family: config.family,
        sample_rate,
        hop,
        delay_compensated: false,
    })
}

/// Carrier `e^{-i phase_step n}` with exact resynchronisation every few hundred samples.
struct Carrier {
    phase_step: f64,
    rotation: Complex64,
    current: Complex64,
}

impl Carrier {
    fn new(phase_step: f64) -> Self {
        Self {
            phase_step,
            rotation: Complex64::from_polar(1.0, -phase_step),
            current: Complex64::new(1.0, 0.0),
        }
    }

    #[inline]
    fn at(&mut self, n: usize) -> Complex64 {
        if n % PHASE_RESYNC == 0 {
            self.current = exact_carrier(self.phase_step, n);
        }
        let z = self.current;
        self.current *= self.rotation;
        z
    }
}

fn exact_carrier(phase_step: f64, n: usize) -> Complex64 {
    Complex64::from_polar(1.0, -(phase_step * n as f64).rem_euclid(TAU))
}

fn causal_channel(
    signal: &[f64],
    phase_step: f64,
    ladder: &ScaleLadder,
    hop: usize,
    frames: usize,
) -> Vec<Complex64> {
    let gains: Vec<f64> = ladder.mus().iter().map(|m| 1.0 / (1.0 + m)).collect();
    let mut state = vec![Complex64::new(0.0, 0.0); gains.len()];
    let mut carrier = Carrier::new(phase_step);
    let mut out = Vec::with_capacity(frames);
    for (n, &x) in signal.iter().enumerate() {
        let mut input = carrier.at(n) * x;
        for (s, g) in state.iter_mut().zip(&gains) {
            *s += (input - *s) * g;
            input = *s;
        }
        if n % hop == 0 {
            out.push(input);
        }
    }
    out
}

fn gaussian_channel(
    signal: &[f64],
    phase_step: f64,
    s: f64,
    epsilon: f64,
    hop: usize,
    frames: usize,
) -> Result<Vec<Complex64>> {
    let kernel = discrete_gaussian_kernel(s, epsilon)?;
    let mut carrier = Carrier::new(phase_step);
    let product: Vec<Complex64> = signal
        .iter()
        .enumerate()
        .map(|(n, &x)| carrier.at(n) * x)
        .collect();
    let len = product.len();
    let half = kernel.origin_index as i64;
    Ok((0..frames)
        .map(|j| {
            let centre = (j * hop) as i64;
            let mut acc = Complex64::new(0.0, 0.0);
            if centre - half >= 0 && centre + half < len as i64 {
                let base = (centre - half) as usize;
                // symmetric kernel: the window sum needs no reversal
                for (w, p) in kernel
                    .values
                    .iter()
                    .zip(&product[base..base + kernel.values.len()])
                {
                    acc += p * *w;
                }
            } else {
                for (i, w) in kernel.values.iter().enumerate() {
                    acc += product[mirror_index(centre - half + i as i64, len)] * *w;
                }
            }
            acc
        })
        .collect())
}
