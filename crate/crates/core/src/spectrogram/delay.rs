use num_complex::Complex64;

use super::compute::ComplexSpectrogram;
use crate::error::{invalid, Result};
use crate::selectivity::unit_delay_measures;
use crate::temporal::TemporalFamily;

/// Delay (s) of the first inflection point of the window in each channel.
pub fn first_inflection_delays(family: &TemporalFamily, tau_window: &[f64]) -> Result<Vec<f64>> {
    let unit = unit_delay_measures(family)?
        .ok_or_else(|| invalid("delay compensation needs a time-causal family"))?;
    Ok(tau_window
        .iter()
        .map(|tau| unit.t_infl1 * tau.sqrt())
        .collect())
}

/// Shifts every channel earlier by the first inflection point of its window,
/// rounded to whole frames. The sub-frame remainder is kept in
/// `residual_delay`; frames shifted in from beyond the end are zero.
pub fn delay_compensate(spec: &ComplexSpectrogram) -> Result<ComplexSpectrogram> {
    if spec.delay_compensated {
        return Err(invalid("spectrogram is already delay compensated"));
    }
    let delays = first_inflection_delays(&spec.family, &spec.tau_window)?;
    let step = spec.grid.frame_step;
    let frames = spec.frames();
    let mut out = spec.clone();
    for (c, &delay) in delays.iter().enumerate() {
        let shift = (delay / step).round() as usize;
        let src = spec.grid.values.column(c);
        let mut dst = out.grid.values.column_mut(c);
        for j in 0..frames {
            dst[j] = if j + shift < frames {
                src[j + shift]
            } else {
                Complex64::new(0.0, 0.0)
            };
        }
        out.grid.warmup[c] = spec.grid.warmup[c].saturating_sub(shift);
        out.residual_delay[c] = delay - shift as f64 * step;
    }
    out.delay_compensated = true;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_shift_uses_closed_form() {
        let d =
            first_inflection_delays(&TemporalFamily::CausalUniform { stages: 4 }, &[1.0]).unwrap();
        assert!((d[0] - (3.0 - 3f64.sqrt()) * 0.5).abs() < 1e-12);
        assert!((d[0] - 0.634).abs() < 1e-3);
    }

    #[test]
    fn single_stage_has_no_shift() {
        let d =
            first_inflection_delays(&TemporalFamily::CausalUniform { stages: 1 }, &[0.3]).unwrap();
        assert_eq!(d[0], 0.0);
        let d = first_inflection_delays(&TemporalFamily::CausalLog { stages: 1, c: 2.0 }, &[0.3])
            .unwrap();
        assert_eq!(d[0], 0.0);
    }

    #[test]
    fn log_shift_precedes_the_maximum() {
        let d = first_inflection_delays(
            &TemporalFamily::CausalLog {
                stages: 4,
                c: 2f64.sqrt(),
            },
            &[1.0],
        )
        .unwrap();
        assert!(d[0] > 0.0 && d[0] < 1.385);
    }

    #[test]
    fn gaussian_is_rejected() {
        assert!(first_inflection_delays(&TemporalFamily::Gaussian, &[1.0]).is_err());
    }
}
