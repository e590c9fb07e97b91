//! Shear warping of the time-frequency plane along a glissando.

use ndarray::Array2;

use crate::grid::TimeFrequencyGrid;
use crate::temporal::mirror_index;

/// Catmull-Rom interpolation of `row` at fractional index `x`, mirroring
/// reads outside the row.
pub fn catmull_rom(row: &[f64], x: f64) -> f64 {
    let i = x.floor();
    let f = x - i;
    let i = i as i64;
    let len = row.len();
    let p = |k: i64| row[mirror_index(i + k, len)];
    let (p0, p1, p2, p3) = (p(-1), p(0), p(1), p(2));
    0.5 * (2.0 * p1
        + (p2 - p0) * f
        + (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3) * f * f
        + (3.0 * (p1 - p2) + p3 - p0) * f * f * f)
}

/// Resamples each frame `j` at `q + offset(j)` for `q in 0..out_channels`.
pub(crate) fn resample_rows(
    values: &Array2<f64>,
    out_channels: usize,
    offset: impl Fn(usize) -> f64,
) -> Array2<f64> {
    let mut out = Array2::zeros((values.nrows(), out_channels));
    for (j, row) in values.outer_iter().enumerate() {
        let row = row.to_vec();
        let shift = offset(j);
        for q in 0..out_channels {
            out[[j, q]] = if shift == 0.0 {
                row[mirror_index(q as i64, row.len())]
            } else {
                catmull_rom(&row, q as f64 + shift)
            };
        }
    }
    out
}

/// Glissando shift in bins of frame `j` relative to time `t_ref`.
pub(crate) fn shift_bins(grid: &TimeFrequencyGrid<f64>, v: f64, t_ref: f64, j: usize) -> f64 {
    v * (grid.time(j) - t_ref) / grid.nu_step()
}

/// Warps to `nu' = nu - v t` with `t` measured from the first frame:
/// output channel `c` of frame `j` reads the input at `nu_c + v t_j`.
pub fn glissando_warp(grid: &TimeFrequencyGrid<f64>, v: f64) -> TimeFrequencyGrid<f64> {
    let t_ref = grid.t0;
    grid.with_values(resample_rows(&grid.values, grid.channels(), |j| {
        shift_bins(grid, v, t_ref, j)
    }))
}

/// Inverse of [`glissando_warp`] on the interior of the grid.
pub fn glissando_unwarp(grid: &TimeFrequencyGrid<f64>, v: f64) -> TimeFrequencyGrid<f64> {
    let t_ref = grid.t0;
    grid.with_values(resample_rows(&grid.values, grid.channels(), |j| {
        -shift_bins(grid, v, t_ref, j)
    }))
}
