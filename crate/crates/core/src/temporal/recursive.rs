//! Time-recursive smoothing with cascaded first-order recursive filters.

use super::ladder::{LadderUnits, ScaleLadder};
use crate::error::{invalid, Result};

/// Streaming cascade of first-order recursive filters
/// `out(t) = out(t-1) + (in(t) - out(t-1)) / (1 + mu_k)`.
///
/// The channel outputs are the only memory kept between samples.
#[derive(Debug, Clone)]
pub struct RecursiveSmoother {
    gains: Vec<f64>,
    state: Vec<f64>,
}

impl RecursiveSmoother {
    /// Zero initial state.
    pub fn new(ladder: &ScaleLadder) -> Result<Self> {
        Self::with_initial(ladder, 0.0)
    }

    /// All channels start at `initial`, as if the input had been constant
    /// at that value forever.
    pub fn with_initial(ladder: &ScaleLadder, initial: f64) -> Result<Self> {
        if ladder.units() != LadderUnits::Discrete {
            return Err(invalid(
                "recursive smoothing needs a ladder in sample units",
            ));
        }
        Ok(Self::from_time_constants(ladder.mus(), initial))
    }

    /// Cascade with explicit per-stage time constants in samples.
    pub fn from_time_constants(mus: &[f64], initial: f64) -> Self {
        Self {
            gains: mus.iter().map(|m| 1.0 / (1.0 + m)).collect(),
            state: vec![initial; mus.len()],
        }
    }

    /// Feeds one sample and returns the `K` channel values.
    #[inline]
    pub fn push(&mut self, x: f64) -> &[f64] {
        let mut input = x;
        for (out, g) in self.state.iter_mut().zip(&self.gains) {
            *out += (input - *out) * g;
            input = *out;
        }
        &self.state
    }

    pub fn channels(&self) -> &[f64] {
        &self.state
    }
}

/// Smooths `signal` through every level of `ladder`; returns one output per stage.
pub fn discrete_recursive_smooth(signal: &[f64], ladder: &ScaleLadder) -> Result<Vec<Vec<f64>>> {
    let mut smoother = RecursiveSmoother::new(ladder)?;
    let mut channels = vec![Vec::with_capacity(signal.len()); ladder.stages()];
    for &x in signal {
        for (ch, &v) in channels.iter_mut().zip(smoother.push(x)) {
            ch.push(v);
        }
    }
    Ok(channels)
}

/// Temporal derivative of order `order` at scale level `level` (1-based)
/// from differences of the channel outputs:
/// `H^(r)(tau_k) = (H^(r-1)(tau_{k-1}) - H^(r-1)(tau_k)) / mu_k`.
///
/// `channels[k - 1]` holds the output at level `k`. The result is scaled to
/// per-`dt` units (pass `dt = 1` for per-sample derivatives).
pub fn temporal_derivative_channels(
    channels: &[Vec<f64>],
    ladder: &ScaleLadder,
    order: usize,
    level: usize,
    dt: f64,
) -> Result<Vec<f64>> {
    if level == 0 || level > ladder.stages() || channels.len() < level {
        return Err(invalid(format!("level {level} outside the ladder")));
    }
    if order >= level {
        return Err(invalid(format!(
            "derivative order {order} must be below the scale level {level}"
        )));
    }
    let mus = ladder.mus();
    // current[j] holds the order-r derivative at level (level - order + j + ...)
    let lowest = level - order;
    let mut current: Vec<Vec<f64>> = channels[lowest - 1..level].to_vec();
    for r in 1..=order {
        let next: Vec<Vec<f64>> = (1..current.len())
            .map(|j| {
                let k = lowest + r + j - 2; // 1-based level of the result
                let inv_mu = 1.0 / mus[k];
                current[j - 1]
                    .iter()
                    .zip(&current[j])
                    .map(|(lo, hi)| (lo - hi) * inv_mu)
                    .collect()
            })
            .collect();
        current = next;
    }
    let scale = dt.powi(order as i32);
    Ok(current
        .pop()
        .expect("one channel remains")
        .into_iter()
        .map(|v| v / scale)
        .collect())
}

/// Number of leading samples affected by the zero initial state: `ceil(5 sum mu_k)`.
pub fn warmup_samples(ladder: &ScaleLadder) -> usize {
    (5.0 * ladder.mean()).ceil() as usize
}
