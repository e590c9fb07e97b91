//! Test signals shared by the integration tests.
#![allow(dead_code)]

use std::f64::consts::{LN_2, TAU};

use auditory_rf::spectrogram::nu_to_hz;

pub fn sine(hz: f64, rate: f64, secs: f64) -> Vec<f64> {
    (0..(rate * secs).round() as usize)
        .map(|n| (TAU * hz * n as f64 / rate).sin())
        .collect()
}

/// Sum of sines with unit amplitude divided by the number of partials.
pub fn harmonic(partials: &[f64], rate: f64, secs: f64) -> Vec<f64> {
    let scale = 1.0 / partials.len() as f64;
    (0..(rate * secs).round() as usize)
        .map(|n| {
            partials
                .iter()
                .map(|hz| (TAU * hz * n as f64 / rate).sin())
                .sum::<f64>()
                * scale
        })
        .collect()
}

/// Tone whose MIDI value rises linearly: `nu(t) = nu0 + v t`.
pub fn chirp(nu0: f64, v: f64, rate: f64, secs: f64) -> Vec<f64> {
    let f0 = nu_to_hz(nu0);
    (0..(rate * secs).round() as usize)
        .map(|n| {
            let t = n as f64 / rate;
            let phase = if v == 0.0 {
                f0 * t
            } else {
                let k = v * LN_2 / 12.0;
                f0 * ((k * t).exp() - 1.0) / k
            };
            (TAU * phase).sin()
        })
        .collect()
}
