//! Auditory features from second-layer receptive field responses.

mod curves;
mod glissando;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::grid::TimeFrequencyGrid;
use crate::receptive_fields::{apply_rf, stencil, RfSpec};
use crate::temporal::TemporalFamily;

pub use curves::{extract_partial_curves, CurveParams, CurvePoint, PartialCurve};
pub use glissando::{
    glissando_filterbank, second_moment_glissando, GlissandoMap, SecondMomentField, FLOOR_FRACTION,
};

/// Default threshold on `-D_nunu` for ridge cells and partial-tone points.
pub const DEFAULT_C_MIN: f64 = 3.0;

/// Non-negative feature values; cells inside the warm-up region are zero.
pub type FeatureMap = TimeFrequencyGrid<f64>;

/// Second-layer scales shared by the feature operators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeatureScales {
    pub family: TemporalFamily,
    /// Temporal scale, s².
    pub tau_a: f64,
    /// Spectral scale, semitones².
    pub s: f64,
}

impl FeatureScales {
    pub fn new(family: TemporalFamily, tau_a: f64, s: f64) -> Self {
        Self { family, tau_a, s }
    }

    pub(crate) fn spec(&self, alpha: usize, beta: usize) -> RfSpec {
        RfSpec::smoothing(self.family, self.tau_a, self.s).with_derivative(alpha, beta)
    }
}

/// Zeroes warm-up cells and clamps negatives to zero after applying `f`.
pub(crate) fn rectify(grid: &TimeFrequencyGrid<f64>, f: impl Fn(f64) -> f64) -> FeatureMap {
    let mut out = grid.map(|&v| f(v).max(0.0));
    for ((j, c), v) in out.values.indexed_iter_mut() {
        if j < grid.warmup[c] {
            *v = 0.0;
        }
    }
    out
}

/// Rectified scale-normalized first temporal derivative `sqrt(tau_a) d_t`.
pub fn detect_onsets(s_db: &TimeFrequencyGrid<f64>, scales: &FeatureScales) -> Result<FeatureMap> {
    let d = apply_rf(s_db, &scales.spec(1, 0))?;
    Ok(rectify(&d.grid, |v| v))
}

/// Rectified negated first temporal derivative.
pub fn detect_offsets(s_db: &TimeFrequencyGrid<f64>, scales: &FeatureScales) -> Result<FeatureMap> {
    let d = apply_rf(s_db, &scales.spec(1, 0))?;
    Ok(rectify(&d.grid, |v| -v))
}

/// Signed `-D_nunu = -s d_nunu` response with its first and second MIDI derivatives.
#[derive(Debug, Clone, PartialEq)]
pub struct BandResponse {
    pub neg_d_nunu: TimeFrequencyGrid<f64>,
    /// `d_nu (-D_nunu)`.
    pub d_nu: TimeFrequencyGrid<f64>,
    /// `d_nunu (-D_nunu)`.
    pub d_nunu: TimeFrequencyGrid<f64>,
}

pub fn band_response(
    s_db: &TimeFrequencyGrid<f64>,
    scales: &FeatureScales,
) -> Result<BandResponse> {
    let d = apply_rf(s_db, &scales.spec(0, 2))?;
    let neg = d.grid.map(|v| -v);
    Ok(band_response_from(neg))
}

pub(crate) fn band_response_from(neg: TimeFrequencyGrid<f64>) -> BandResponse {
    let dnu = neg.nu_step();
    let mut d_nu = neg.with_values(stencil::nu_derivative(&neg.values, 1, dnu));
    let mut d_nunu = neg.with_values(stencil::nu_derivative(&neg.values, 2, dnu));
    d_nu.warmup = spread(&neg.warmup, 1);
    d_nunu.warmup = spread(&neg.warmup, 1);
    BandResponse {
        neg_d_nunu: neg,
        d_nu,
        d_nunu,
    }
}

fn spread(warm: &[usize], reach: usize) -> Vec<usize> {
    (0..warm.len())
        .map(|c| {
            warm[c.saturating_sub(reach)..=(c + reach).min(warm.len() - 1)]
                .iter()
                .copied()
                .max()
                .unwrap_or(0)
        })
        .collect()
}

/// Rectified `-D_nunu`: enhances partials at fine `s`, formants at coarse `s`.
pub fn enhance_bands(s_db: &TimeFrequencyGrid<f64>, scales: &FeatureScales) -> Result<FeatureMap> {
    let d = apply_rf(s_db, &scales.spec(0, 2))?;
    Ok(rectify(&d.grid, |v| -v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::Array2;

    pub(crate) fn grid(values: Array2<f64>) -> TimeFrequencyGrid<f64> {
        let ch = values.ncols();
        TimeFrequencyGrid {
            values,
            t0: 0.0,
            frame_step: 1e-3,
            nus: (0..ch).map(|c| 50.0 + 0.25 * c as f64).collect(),
            warmup: vec![0; ch],
        }
    }

    fn scales() -> FeatureScales {
        FeatureScales::new(TemporalFamily::CausalUniform { stages: 4 }, 1e-5, 0.25)
    }

    #[test]
    fn constant_input_has_no_features() {
        let g = grid(Array2::from_elem((100, 40), -12.0));
        for map in [
            detect_onsets(&g, &scales()).unwrap(),
            detect_offsets(&g, &scales()).unwrap(),
            enhance_bands(&g, &scales()).unwrap(),
        ] {
            assert!(map.values.iter().all(|v| v.abs() < 1e-9));
        }
    }

    #[test]
    fn onset_and_offset_maps_are_disjoint() {
        let g = grid(Array2::from_shape_fn((200, 10), |(j, c)| {
            (0.07 * j as f64 + c as f64).sin() * 30.0
        }));
        let on = detect_onsets(&g, &scales()).unwrap();
        let off = detect_offsets(&g, &scales()).unwrap();
        for (a, b) in on.values.iter().zip(off.values.iter()) {
            assert!(*a >= 0.0 && *b >= 0.0);
            assert!(*a == 0.0 || *b == 0.0);
        }
    }

    #[test]
    fn band_peak_sits_on_the_bump() {
        let centre = 31;
        let g = grid(Array2::from_shape_fn((20, 64), |(_, c)| {
            let d = (c as f64 - centre as f64) * 0.25;
            40.0 * (-d * d / 2.0).exp()
        }));
        let map = enhance_bands(
            &g,
            &FeatureScales::new(TemporalFamily::Gaussian, 1e-6, 0.25),
        )
        .unwrap();
        let row = map.values.row(10);
        let argmax = (0..64).max_by(|&a, &b| row[a].total_cmp(&row[b])).unwrap();
        assert_eq!(argmax, centre);
    }
}
