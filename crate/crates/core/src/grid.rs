//! Dense time–frequency grids shared by every processing layer.

use ndarray::Array2;

/// Values over (frame, channel) with the axis metadata needed downstream.
///
/// `values[[j, c]]` is frame `j` of channel `c`. Frame times are
/// `t0 + j * frame_step`; channel `c` sits at MIDI value `nus[c]`.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeFrequencyGrid<T> {
    pub values: Array2<T>,
    pub t0: f64,
    /// Seconds between frames.
    pub frame_step: f64,
    /// MIDI values of the channels, ascending and equally spaced.
    pub nus: Vec<f64>,
    /// Per channel, the number of leading frames that still depend on the
    /// zero initial state of a causal filter somewhere upstream.
    pub warmup: Vec<usize>,
}

impl<T: Clone> TimeFrequencyGrid<T> {
    pub fn frames(&self) -> usize {
        self.values.nrows()
    }

    pub fn channels(&self) -> usize {
        self.values.ncols()
    }

    pub fn time(&self, frame: usize) -> f64 {
        self.t0 + frame as f64 * self.frame_step
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.frames()).map(|j| self.time(j)).collect()
    }

    /// Spacing of the MIDI axis in semitones (1 for a single channel).
    pub fn nu_step(&self) -> f64 {
        if self.nus.len() > 1 {
            self.nus[1] - self.nus[0]
        } else {
            1.0
        }
    }

    /// Whether frame `frame` of channel `channel` is outside the warm-up region.
    pub fn is_settled(&self, frame: usize, channel: usize) -> bool {
        frame >= self.warmup[channel]
    }

    /// Same axes, new values.
    pub fn with_values<U>(&self, values: Array2<U>) -> TimeFrequencyGrid<U> {
        assert_eq!(values.dim(), self.values.dim(), "grid shape mismatch");
        TimeFrequencyGrid {
            values,
            t0: self.t0,
            frame_step: self.frame_step,
            nus: self.nus.clone(),
            warmup: self.warmup.clone(),
        }
    }

    pub fn map<U>(&self, f: impl FnMut(&T) -> U) -> TimeFrequencyGrid<U> {
        self.with_values(self.values.map(f))
    }
}

impl TimeFrequencyGrid<f64> {
    /// Channel values as a contiguous vector.
    pub fn channel(&self, channel: usize) -> Vec<f64> {
        self.values.column(channel).to_vec()
    }

    /// Largest absolute difference over cells settled in both grids.
    pub fn max_abs_diff_settled(&self, other: &Self) -> f64 {
        let mut worst: f64 = 0.0;
        for ((j, c), v) in self.values.indexed_iter() {
            if self.is_settled(j, c) && other.is_settled(j, c) {
                worst = worst.max((v - other.values[[j, c]]).abs());
            }
        }
        worst
    }
}
