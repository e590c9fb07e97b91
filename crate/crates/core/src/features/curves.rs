use serde::{Deserialize, Serialize};

use super::{BandResponse, DEFAULT_C_MIN};

/// One sub-bin ridge point of a partial tone.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub frame: usize,
    pub time: f64,
    /// MIDI value, interpolated between channels.
    pub nu: f64,
    /// `-D_nunu` at the point.
    pub strength: f64,
}

/// Ridge points linked over consecutive frames.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartialCurve {
    pub points: Vec<CurvePoint>,
}

impl PartialCurve {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn mean_nu(&self) -> f64 {
        self.points.iter().map(|p| p.nu).sum::<f64>() / self.points.len() as f64
    }

    /// Least-squares slope of `nu` over time, semitones per second.
    pub fn slope(&self) -> f64 {
        let n = self.points.len() as f64;
        let mt = self.points.iter().map(|p| p.time).sum::<f64>() / n;
        let mn = self.mean_nu();
        let (mut num, mut den) = (0.0, 0.0);
        for p in &self.points {
            num += (p.time - mt) * (p.nu - mn);
            den += (p.time - mt).powi(2);
        }
        if den > 0.0 {
            num / den
        } else {
            0.0
        }
    }
}

/// Detection and linking thresholds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurveParams {
    /// Minimum `-D_nunu` of a ridge point.
    pub c_min: f64,
    /// Largest change of `nu` between consecutive points, semitones per frame.
    pub max_jump: f64,
    /// Curves with fewer points are dropped.
    pub min_points: usize,
}

impl Default for CurveParams {
    fn default() -> Self {
        Self {
            c_min: DEFAULT_C_MIN,
            max_jump: 1.0,
            min_points: 1,
        }
    }
}

/// Ridge points of one frame: downward zero crossings of `d_nu(-D_nunu)`
/// located by linear interpolation between adjacent settled channels.
fn frame_points(band: &BandResponse, frame: usize, c_min: f64) -> Vec<CurvePoint> {
    let g = &band.d_nu;
    let channels = g.channels();
    let mut points = Vec::new();
    for c in 0..channels.saturating_sub(1) {
        if !g.is_settled(frame, c) || !g.is_settled(frame, c + 1) {
            continue;
        }
        let (a, b) = (g.values[[frame, c]], g.values[[frame, c + 1]]);
        if !(a > 0.0 && b <= 0.0) {
            continue;
        }
        let f = a / (a - b);
        let lerp = |grid: &crate::grid::TimeFrequencyGrid<f64>| {
            grid.values[[frame, c]] * (1.0 - f) + grid.values[[frame, c + 1]] * f
        };
        let strength = lerp(&band.neg_d_nunu);
        if strength < c_min || lerp(&band.d_nunu) >= 0.0 {
            continue;
        }
        points.push(CurvePoint {
            frame,
            time: g.time(frame),
            nu: g.nus[c] + f * (g.nus[c + 1] - g.nus[c]),
            strength,
        });
    }
    points
}

/// Partial-tone curves from a band response: thresholded ridge points
/// linked greedily to the nearest curve of the previous frame.
pub fn extract_partial_curves(band: &BandResponse, params: &CurveParams) -> Vec<PartialCurve> {
    let mut finished: Vec<PartialCurve> = Vec::new();
    let mut active: Vec<PartialCurve> = Vec::new();
    for frame in 0..band.d_nu.frames() {
        let points = frame_points(band, frame, params.c_min);
        let mut pairs: Vec<(f64, usize, usize)> = Vec::new();
        for (ci, curve) in active.iter().enumerate() {
            let last = curve.points.last().expect("curves are non-empty");
            for (pi, p) in points.iter().enumerate() {
                let d = (p.nu - last.nu).abs();
                if d <= params.max_jump {
                    pairs.push((d, ci, pi));
                }
            }
        }
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
        let mut curve_taken = vec![false; active.len()];
        let mut point_taken = vec![false; points.len()];
        for (_, ci, pi) in pairs {
            if !curve_taken[ci] && !point_taken[pi] {
                curve_taken[ci] = true;
                point_taken[pi] = true;
                active[ci].points.push(points[pi]);
            }
        }
        let mut next = Vec::with_capacity(points.len());
        for (ci, curve) in active.into_iter().enumerate() {
            if curve_taken[ci] {
                next.push(curve);
            } else {
                finished.push(curve);
            }
        }
        for (pi, p) in points.into_iter().enumerate() {
            if !point_taken[pi] {
                next.push(PartialCurve { points: vec![p] });
            }
        }
        active = next;
    }
    finished.extend(active);
    finished.retain(|c| c.len() >= params.min_points.max(1));
    finished.sort_by(|a, b| {
        a.points[0]
            .frame
            .cmp(&b.points[0].frame)
            .then(a.points[0].nu.total_cmp(&b.points[0].nu))
    });
    finished
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::band_response_from;
    use crate::features::tests::grid;
    use ndarray::Array2;

    fn ridge(frames: usize, centre: impl Fn(usize) -> f64) -> BandResponse {
        let g = grid(Array2::from_shape_fn((frames, 80), |(j, c)| {
            let nu = 50.0 + 0.25 * c as f64;
            let d = nu - centre(j);
            10.0 * (-d * d / 0.5).exp()
        }));
        band_response_from(g)
    }

    #[test]
    fn sub_bin_location() {
        let band = ridge(10, |_| 59.1);
        let curves = extract_partial_curves(&band, &CurveParams::default());
        assert_eq!(curves.len(), 1);
        assert_eq!(curves[0].len(), 10);
        assert!((curves[0].mean_nu() - 59.1).abs() < 0.02);
    }

    #[test]
    fn linking_follows_a_glide() {
        let band = ridge(40, |j| 55.0 + 0.05 * j as f64);
        let curves = extract_partial_curves(&band, &CurveParams::default());
        assert_eq!(curves.len(), 1);
        assert!((curves[0].slope() - 50.0).abs() < 1.0);
    }

    #[test]
    fn nothing_below_threshold() {
        let band = band_response_from(grid(Array2::zeros((5, 20))));
        assert!(extract_partial_curves(&band, &CurveParams::default()).is_empty());
    }

    #[test]
    fn jumps_split_curves() {
        let band = ridge(20, |j| if j < 10 { 55.0 } else { 60.0 });
        let curves = extract_partial_curves(&band, &CurveParams::default());
        assert_eq!(curves.len(), 2);
    }
}
