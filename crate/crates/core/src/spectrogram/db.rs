use super::compute::ComplexSpectrogram;
use crate::error::{invalid, Result};
use crate::grid::TimeFrequencyGrid;

/// Magnitudes are clamped to this fraction of the reference before the log.
pub const MAGNITUDE_FLOOR: f64 = 1e-10;

/// Spectrogram magnitudes in dB relative to `reference`.
#[derive(Debug, Clone, PartialEq)]
pub struct LogSpectrogram {
    pub grid: TimeFrequencyGrid<f64>,
    pub reference: f64,
}

impl LogSpectrogram {
    /// dB value assigned to magnitudes at or below the floor.
    pub fn floor_db(&self) -> f64 {
        20.0 * MAGNITUDE_FLOOR.log10()
    }
}

/// `20 log10(max(|S|, 1e-10 S0) / S0)` per cell.
pub fn to_db(spec: &ComplexSpectrogram, reference: f64) -> Result<LogSpectrogram> {
    if !(reference > 0.0) {
        return Err(invalid(format!(
            "reference amplitude must be positive, got {reference}"
        )));
    }
    let floor = MAGNITUDE_FLOOR * reference;
    Ok(LogSpectrogram {
        grid: spec
            .grid
            .map(|z| 20.0 * (z.norm().max(floor) / reference).log10()),
        reference,
    })
}
