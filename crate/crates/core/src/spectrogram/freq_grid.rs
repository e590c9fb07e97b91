use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// MIDI note number of the reference tone A4.
pub const NU_REF: f64 = 69.0;
/// Frequency of the reference tone in Hz.
pub const HZ_REF: f64 = 440.0;
/// Semitones per octave: the slope of the MIDI mapping.
pub const SEMITONES_PER_OCTAVE: f64 = 12.0;

pub fn nu_to_hz(nu: f64) -> f64 {
    HZ_REF * 2f64.powf((nu - NU_REF) / SEMITONES_PER_OCTAVE)
}

pub fn hz_to_nu(hz: f64) -> f64 {
    NU_REF + SEMITONES_PER_OCTAVE * (hz / HZ_REF).log2()
}

/// Angular frequency (rad/s) of MIDI value `nu`.
pub fn nu_to_omega(nu: f64) -> f64 {
    2.0 * PI * nu_to_hz(nu)
}

/// Logarithmic frequency axis with equally spaced MIDI values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrequencyGrid {
    pub nu_min: f64,
    pub nu_max: f64,
    pub bins_per_octave: usize,
    nus: Vec<f64>,
}

impl FrequencyGrid {
    /// Channels `nu_min + i * 12 / bins_per_octave` until `nu_max` is covered.
    pub fn new(nu_min: f64, nu_max: f64, bins_per_octave: usize) -> Result<Self> {
        if !(nu_min < nu_max) || !nu_min.is_finite() || !nu_max.is_finite() {
            return Err(invalid(format!(
                "need nu_min < nu_max, got {nu_min} and {nu_max}"
            )));
        }
        if bins_per_octave == 0 {
            return Err(invalid("bins_per_octave must be at least 1"));
        }
        let step = SEMITONES_PER_OCTAVE / bins_per_octave as f64;
        let count = ((nu_max - nu_min) / step - 1e-9).ceil() as usize + 1;
        let nus = (0..count).map(|i| nu_min + i as f64 * step).collect();
        Ok(Self {
            nu_min,
            nu_max,
            bins_per_octave,
            nus,
        })
    }

    /// Grid covering `[f_min, f_max]` Hz.
    pub fn from_hz(f_min: f64, f_max: f64, bins_per_octave: usize) -> Result<Self> {
        if !(f_min > 0.0) {
            return Err(invalid("lowest frequency must be positive"));
        }
        Self::new(hz_to_nu(f_min), hz_to_nu(f_max), bins_per_octave)
    }

    pub fn len(&self) -> usize {
        self.nus.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nus.is_empty()
    }

    pub fn step(&self) -> f64 {
        SEMITONES_PER_OCTAVE / self.bins_per_octave as f64
    }

    pub fn nus(&self) -> &[f64] {
        &self.nus
    }

    pub fn omegas(&self) -> Vec<f64> {
        self.nus.iter().map(|&nu| nu_to_omega(nu)).collect()
    }

    pub fn hz(&self) -> Vec<f64> {
        self.nus.iter().map(|&nu| nu_to_hz(nu)).collect()
    }
}

/// Builds a frequency grid; see [`FrequencyGrid::new`].
pub fn build_frequency_grid(
    nu_min: f64,
    nu_max: f64,
    bins_per_octave: usize,
) -> Result<FrequencyGrid> {
    FrequencyGrid::new(nu_min, nu_max, bins_per_octave)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn midi_reference_points() {
        assert!((nu_to_hz(69.0) - 440.0).abs() < 1e-12);
        assert!((nu_to_hz(81.0) - 880.0).abs() < 1e-12);
        assert!((hz_to_nu(1320.0) - (69.0 + 12.0 * 3f64.log2())).abs() < 1e-12);
    }

    #[test]
    fn full_audio_range_channel_count() {
        let grid = FrequencyGrid::from_hz(80.0, 16_000.0, 48).unwrap();
        let expected = (12.0 * (16_000.0f64 / 80.0).log2() * 4.0).ceil() as usize + 1;
        assert_eq!(expected, 368);
        assert_eq!(grid.len(), 368);
        assert!(grid
            .nus()
            .windows(2)
            .all(|w| (w[1] - w[0] - 0.25).abs() < 1e-12));
    }

    #[test]
    fn rejects_empty_range() {
        assert!(FrequencyGrid::new(60.0, 60.0, 48).is_err());
        assert!(FrequencyGrid::new(60.0, 70.0, 0).is_err());
    }
}
