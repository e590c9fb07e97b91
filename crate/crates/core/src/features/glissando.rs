use ndarray::Array2;

use super::FeatureScales;
use crate::error::{invalid, Result};
use crate::grid::TimeFrequencyGrid;
use crate::receptive_fields::{apply_rf, spectral_smooth, temporal_smooth, RfSpec};

/// Fraction of the median `Upsilon_nunu` below which no estimate is made.
pub const FLOOR_FRACTION: f64 = 1e-6;

/// Per-cell glissando estimate from a bank of adapted filters.
#[derive(Debug, Clone, PartialEq)]
pub struct GlissandoMap {
    /// Selected glissando, semitones per second.
    pub v_hat: TimeFrequencyGrid<f64>,
    /// The winning `-D_nunu` response.
    pub response: TimeFrequencyGrid<f64>,
}

/// For every cell, the glissando in `bank` whose adapted `-D_nunu` response
/// is largest. Ties go to the smallest `|v|`. With `interpolate`, a parabola
/// through the winner and its neighbours in the sorted bank refines the value.
pub fn glissando_filterbank(
    s_db: &TimeFrequencyGrid<f64>,
    bank: &[f64],
    scales: &FeatureScales,
    interpolate: bool,
) -> Result<GlissandoMap> {
    if bank.is_empty() {
        return Err(invalid("glissando bank is empty"));
    }
    if bank.iter().any(|v| !v.is_finite()) {
        return Err(invalid("glissando bank values must be finite"));
    }
    let mut sorted = bank.to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted.dedup();
    let responses = sorted
        .iter()
        .map(|&v| {
            let spec = RfSpec {
                v,
                ..scales.spec(0, 2)
            };
            apply_rf(s_db, &spec).map(|r| r.grid.map(|x| -x))
        })
        .collect::<Result<Vec<_>>>()?;
    // visit candidates by increasing |v| so that strict improvement keeps ties small
    let mut order: Vec<usize> = (0..sorted.len()).collect();
    order.sort_by(|&a, &b| {
        sorted[a]
            .abs()
            .total_cmp(&sorted[b].abs())
            .then(sorted[a].total_cmp(&sorted[b]))
    });

    let dim = s_db.values.dim();
    let mut v_hat = Array2::zeros(dim);
    let mut best_resp = Array2::zeros(dim);
    for ((j, c), out) in v_hat.indexed_iter_mut() {
        let mut best = order[0];
        for &i in &order[1..] {
            if responses[i].values[[j, c]] > responses[best].values[[j, c]] {
                best = i;
            }
        }
        let r = |i: usize| responses[i].values[[j, c]];
        best_resp[[j, c]] = r(best);
        *out = sorted[best];
        if interpolate && best > 0 && best + 1 < sorted.len() {
            let (x0, x1, x2) = (sorted[best - 1], sorted[best], sorted[best + 1]);
            let (y0, y1, y2) = (r(best - 1), r(best), r(best + 1));
            let num = (x1 - x0).powi(2) * (y1 - y2) - (x1 - x2).powi(2) * (y1 - y0);
            let den = (x1 - x0) * (y1 - y2) - (x1 - x2) * (y1 - y0);
            if den != 0.0 {
                let vertex = x1 - 0.5 * num / den;
                if vertex > x0 && vertex < x2 {
                    *out = vertex;
                }
            }
        }
    }
    let mut warmup = vec![0; s_db.channels()];
    for r in &responses {
        for (w, &rw) in warmup.iter_mut().zip(&r.warmup) {
            *w = (*w).max(rw);
        }
    }
    let mut v_grid = s_db.with_values(v_hat);
    v_grid.warmup = warmup.clone();
    let mut resp_grid = s_db.with_values(best_resp);
    resp_grid.warmup = warmup;
    Ok(GlissandoMap {
        v_hat: v_grid,
        response: resp_grid,
    })
}

/// Smoothed products of the first-order derivatives and the glissando that
/// diagonalizes them.
#[derive(Debug, Clone, PartialEq)]
pub struct SecondMomentField {
    pub upsilon_tt: TimeFrequencyGrid<f64>,
    pub upsilon_tnu: TimeFrequencyGrid<f64>,
    pub upsilon_nunu: TimeFrequencyGrid<f64>,
    /// `-Upsilon_tnu / Upsilon_nunu`, or `None` where `Upsilon_nunu` is below
    /// the stability floor.
    pub v_hat: TimeFrequencyGrid<Option<f64>>,
    pub floor: f64,
}

/// Second-moment glissando estimate with derivative scales `derivative` and
/// integration scales `(tau_i, s_i)`.
pub fn second_moment_glissando(
    s_db: &TimeFrequencyGrid<f64>,
    derivative: &FeatureScales,
    tau_i: f64,
    s_i: f64,
) -> Result<SecondMomentField> {
    if !(tau_i >= derivative.tau_a && s_i >= derivative.s) {
        return Err(invalid(
            "integration scales must not be finer than the derivative scales",
        ));
    }
    // unnormalized derivatives keep the ratio in semitones per second
    let raw = |alpha, beta| RfSpec {
        normalized: false,
        ..derivative.spec(alpha, beta)
    };
    let lt = apply_rf(s_db, &raw(1, 0))?.grid;
    let ln = apply_rf(s_db, &raw(0, 1))?.grid;
    let product = |a: &TimeFrequencyGrid<f64>, b: &TimeFrequencyGrid<f64>| {
        let mut p = a.with_values(&a.values * &b.values);
        p.warmup = a
            .warmup
            .iter()
            .zip(&b.warmup)
            .map(|(x, y)| *x.max(y))
            .collect();
        p
    };
    let integrate = |g: TimeFrequencyGrid<f64>| -> Result<TimeFrequencyGrid<f64>> {
        spectral_smooth(&temporal_smooth(&g, &derivative.family, tau_i)?, s_i)
    };
    let upsilon_tt = integrate(product(&lt, &lt))?;
    let upsilon_tnu = integrate(product(&lt, &ln))?;
    let upsilon_nunu = integrate(product(&ln, &ln))?;

    let mut settled: Vec<f64> = upsilon_nunu
        .values
        .indexed_iter()
        .filter(|((j, c), _)| upsilon_nunu.is_settled(*j, *c))
        .map(|(_, v)| *v)
        .collect();
    let floor = if settled.is_empty() {
        0.0
    } else {
        let mid = settled.len() / 2;
        let (_, median, _) = settled.select_nth_unstable_by(mid, f64::total_cmp);
        FLOOR_FRACTION * *median
    };
    let values = Array2::from_shape_fn(s_db.values.dim(), |(j, c)| {
        let d = upsilon_nunu.values[[j, c]];
        if d > floor && d > 0.0 {
            Some(-upsilon_tnu.values[[j, c]] / d)
        } else {
            None
        }
    });
    let mut v_hat = s_db.with_values(values);
    v_hat.warmup = upsilon_nunu.warmup.clone();
    Ok(SecondMomentField {
        upsilon_tt,
        upsilon_tnu,
        upsilon_nunu,
        v_hat,
        floor,
    })
}
