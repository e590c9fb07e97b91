use ndarray::{Array2, Axis};
use rayon::prelude::*;

use crate::error::{invalid, Result};
use crate::grid::TimeFrequencyGrid;
use crate::temporal::{
    convolve_mirror, discrete_gaussian_kernel, RecursiveSmoother, SampledKernel, ScaleLadder,
    TemporalFamily, DEFAULT_EPSILON,
};

/// Remaining impulse-response mass below which a causal second-layer filter
/// counts as settled.
pub const SETTLE_TAIL: f64 = 1e-10;

pub(crate) fn columns(values: &Array2<f64>) -> Vec<Vec<f64>> {
    values.axis_iter(Axis(1)).map(|c| c.to_vec()).collect()
}

pub(crate) fn from_columns(cols: Vec<Vec<f64>>, frames: usize) -> Array2<f64> {
    let mut out = Array2::zeros((frames, cols.len()));
    for (c, col) in cols.into_iter().enumerate() {
        out.column_mut(c)
            .iter_mut()
            .zip(col)
            .for_each(|(d, v)| *d = v);
    }
    out
}

/// Maximum of `warm` over `c - reach ..= c + reach` for every channel.
pub(crate) fn spread_warmup(warm: &[usize], reach: usize) -> Vec<usize> {
    (0..warm.len())
        .map(|c| {
            let lo = c.saturating_sub(reach);
            let hi = (c + reach).min(warm.len() - 1);
            warm[lo..=hi].iter().copied().max().unwrap_or(0)
        })
        .collect()
}

fn spectral_kernel(s: f64, nu_step: f64, epsilon: f64) -> Result<SampledKernel> {
    if !(s >= 0.0) {
        return Err(invalid(format!("spectral scale must be >= 0, got {s}")));
    }
    discrete_gaussian_kernel(s / (nu_step * nu_step), epsilon)
}

/// Smooths every frame along the MIDI axis with the discrete Gaussian of
/// variance `s` (semitones²), mirrored at the ends.
pub fn spectral_smooth(grid: &TimeFrequencyGrid<f64>, s: f64) -> Result<TimeFrequencyGrid<f64>> {
    spectral_smooth_with_epsilon(grid, s, DEFAULT_EPSILON)
}

/// [`spectral_smooth`] with an explicit kernel truncation tolerance.
pub fn spectral_smooth_with_epsilon(
    grid: &TimeFrequencyGrid<f64>,
    s: f64,
    epsilon: f64,
) -> Result<TimeFrequencyGrid<f64>> {
    let kernel = spectral_kernel(s, grid.nu_step(), epsilon)?;
    if kernel.values.len() == 1 {
        return Ok(grid.clone());
    }
    let rows: Vec<Vec<f64>> = grid
        .values
        .axis_iter(Axis(0))
        .map(|row| row.to_vec())
        .collect();
    let rows: Vec<Vec<f64>> = rows
        .into_par_iter()
        .map(|row| convolve_mirror(&row, &kernel))
        .collect();
    let mut values = Array2::zeros(grid.values.dim());
    for (j, row) in rows.into_iter().enumerate() {
        values
            .row_mut(j)
            .iter_mut()
            .zip(row)
            .for_each(|(d, v)| *d = v);
    }
    let mut out = grid.with_values(values);
    out.warmup = spread_warmup(&grid.warmup, kernel.origin_index);
    Ok(out)
}

/// Frames until the discrete cascade's impulse response has released all but
/// [`SETTLE_TAIL`] of its mass.
pub fn settle_frames(ladder: &ScaleLadder) -> usize {
    let mut smoother = RecursiveSmoother::from_time_constants(ladder.mus(), 0.0);
    let mut remaining = 1.0;
    let mut n = 0;
    let mut input = 1.0;
    loop {
        let out = *smoother.push(input).last().expect("non-empty ladder");
        input = 0.0;
        remaining -= out;
        n += 1;
        if remaining <= SETTLE_TAIL || n > 100_000_000 {
            return n;
        }
    }
}

/// Temporal smoothing kernel used along the frame axis.
pub(crate) enum FrameSmoother {
    Identity,
    Causal(ScaleLadder),
    Gaussian(SampledKernel),
}

impl FrameSmoother {
    pub fn new(family: &TemporalFamily, tau_a: f64, frame_step: f64) -> Result<Self> {
        if !(tau_a >= 0.0) {
            return Err(invalid(format!("temporal scale must be >= 0, got {tau_a}")));
        }
        if tau_a == 0.0 {
            return Ok(Self::Identity);
        }
        let tau_frames = tau_a / (frame_step * frame_step);
        Ok(match family.discrete_ladder(tau_frames)? {
            Some(ladder) => Self::Causal(ladder),
            None => Self::Gaussian(discrete_gaussian_kernel(tau_frames, DEFAULT_EPSILON)?),
        })
    }

    /// Frames of history (or lookahead) that influence one output frame.
    pub fn reach(&self) -> usize {
        match self {
            Self::Identity => 0,
            Self::Causal(ladder) => settle_frames(ladder),
            Self::Gaussian(k) => k.origin_index,
        }
    }

    pub fn apply(&self, column: &[f64]) -> Vec<f64> {
        match self {
            Self::Identity => column.to_vec(),
            Self::Causal(ladder) => {
                // steady-state start at the first value instead of silence
                let start = column.first().copied().unwrap_or(0.0);
                let mut smoother = RecursiveSmoother::from_time_constants(ladder.mus(), start);
                column
                    .iter()
                    .map(|&x| *smoother.push(x).last().expect("non-empty ladder"))
                    .collect()
            }
            Self::Gaussian(k) => convolve_mirror(column, k),
        }
    }
}

/// Smooths every channel along time at scale `tau_a` (s²) with the given family.
///
/// Causal families run the recursive cascade at the frame rate, starting
/// from the first frame's value.
pub fn temporal_smooth(
    grid: &TimeFrequencyGrid<f64>,
    family: &TemporalFamily,
    tau_a: f64,
) -> Result<TimeFrequencyGrid<f64>> {
    let smoother = FrameSmoother::new(family, tau_a, grid.frame_step)?;
    let reach = smoother.reach();
    let cols: Vec<Vec<f64>> = columns(&grid.values)
        .into_par_iter()
        .map(|c| smoother.apply(&c))
        .collect();
    let mut out = grid.with_values(from_columns(cols, grid.frames()));
    out.warmup = grid
        .warmup
        .iter()
        .map(|w| (w + reach).min(grid.frames()))
        .collect();
    Ok(out)
}
