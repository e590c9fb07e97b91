//! End-to-end behaviour of the processing chain and its file formats.

mod common;

use std::f64::consts::TAU;

use auditory_rf::features::{detect_onsets, FeatureScales};
use auditory_rf::io::{read_grid_csv, read_wav, write_grid_csv, write_grid_pgm, write_json};
use auditory_rf::spectrogram::{delay_compensate, hz_to_nu};
use auditory_rf::{
    compute_spectrogram, to_db, Error, FrequencyGrid, SpectrogramConfig, TemporalFamily,
    WindowScale, WindowScaleLaw,
};
use tempfile::TempDir;

const RATE: f64 = 16000.0;

fn config(
    family: TemporalFamily,
    nu_min: f64,
    nu_max: f64,
    bins: usize,
    hop: usize,
) -> SpectrogramConfig {
    SpectrogramConfig::new(
        FrequencyGrid::new(nu_min, nu_max, bins).unwrap(),
        WindowScale::Proportional(WindowScaleLaw::new(8.0, 0.0, None).unwrap()),
        family,
        hop,
    )
}

const LOG7: TemporalFamily = TemporalFamily::CausalLog {
    stages: 7,
    c: std::f64::consts::SQRT_2,
};

#[test]
fn causal_spectrogram_shifts_with_the_signal() {
    let hop = 16;
    let cfg = config(LOG7, 60.0, 84.0, 24, hop);
    let x: Vec<f64> = common::harmonic(&[330.0, 523.0, 700.0], RATE, 0.4);
    let shift_frames = 25;
    let mut delayed = vec![0.0; shift_frames * hop];
    delayed.extend(&x);
    let a = compute_spectrogram(&x, RATE, &cfg)
        .unwrap()
        .convolution_phase();
    let b = compute_spectrogram(&delayed, RATE, &cfg)
        .unwrap()
        .convolution_phase();
    let mut worst: f64 = 0.0;
    for j in 0..a.frames() {
        for c in 0..a.channels() {
            worst = worst.max((a.values[[j, c]] - b.values[[j + shift_frames, c]]).norm());
        }
    }
    assert!(worst < 1e-9, "max difference {worst}");
}

#[test]
fn magnitude_of_a_centred_tone_is_half_its_amplitude() {
    // e^{iwt} has a unit response; a real sine splits into two halves.
    for family in [
        TemporalFamily::Gaussian,
        TemporalFamily::CausalUniform { stages: 4 },
        LOG7,
    ] {
        let cfg = config(family, 69.0, 70.0, 12, 16);
        let x = common::sine(440.0, RATE, 0.5);
        let mag = compute_spectrogram(&x, RATE, &cfg).unwrap().magnitude();
        let mid = mag.frames() / 2;
        assert!(
            (mag.values[[mid, 0]] - 0.5).abs() < 2e-3,
            "{family:?}: {}",
            mag.values[[mid, 0]]
        );
    }
}

#[test]
fn loudest_channel_follows_the_tone() {
    let cfg = config(LOG7, 48.0, 96.0, 12, 16);
    for hz in [200.0, 440.0, 1000.0, 2000.0] {
        let x = common::sine(hz, RATE, 0.5);
        let mag = compute_spectrogram(&x, RATE, &cfg).unwrap().magnitude();
        let last = mag.frames() - 1;
        let row = mag.values.row(last);
        let best = (0..row.len())
            .max_by(|&a, &b| row[a].total_cmp(&row[b]))
            .unwrap();
        assert!(
            (mag.nus[best] - hz_to_nu(hz)).abs() <= 0.5,
            "{hz} Hz landed at {}",
            mag.nus[best]
        );
    }
}

#[test]
fn delay_compensation_moves_onsets_earlier() {
    let hop = 16;
    let cfg = config(
        TemporalFamily::CausalUniform { stages: 4 },
        69.0,
        70.0,
        12,
        hop,
    );
    let mut x = vec![0.0; 3200];
    x.extend(common::sine(440.0, RATE, 0.3));
    let spec = compute_spectrogram(&x, RATE, &cfg).unwrap();
    let compensated = delay_compensate(&spec).unwrap();
    assert!(delay_compensate(&compensated).is_err());
    let crossing = |m: &auditory_rf::TimeFrequencyGrid<f64>| {
        (0..m.frames()).find(|&j| m.values[[j, 0]] > 0.25).unwrap()
    };
    let before = crossing(&spec.magnitude());
    let after = crossing(&compensated.magnitude());
    let expected = spec.tau_window[0].sqrt() * (3.0 - 3f64.sqrt()) / 2.0;
    let moved = (before - after) as f64 * hop as f64 / RATE;
    assert!(
        (moved - expected).abs() <= hop as f64 / RATE,
        "moved {moved}, expected {expected}"
    );
}

#[test]
fn gaussian_spectrogram_has_no_delay_compensation() {
    let cfg = config(TemporalFamily::Gaussian, 69.0, 70.0, 12, 16);
    let spec = compute_spectrogram(&common::sine(440.0, RATE, 0.1), RATE, &cfg).unwrap();
    assert!(matches!(
        delay_compensate(&spec),
        Err(Error::InvalidParameter(_))
    ));
}

#[test]
fn onset_map_fires_at_the_tone_start() {
    let hop = 16;
    let cfg = config(
        TemporalFamily::CausalUniform { stages: 4 },
        64.0,
        74.0,
        24,
        hop,
    );
    let mut x: Vec<f64> = common::sine(440.0, RATE, 1.0)
        .iter()
        .map(|v| 1e-3 * v)
        .collect();
    let start = x.len();
    x.extend(common::sine(440.0, RATE, 0.5));
    let db = to_db(&compute_spectrogram(&x, RATE, &cfg).unwrap(), 1.0)
        .unwrap()
        .grid;
    let scales = FeatureScales::new(TemporalFamily::CausalUniform { stages: 4 }, 1e-4, 0.25);
    let onsets = detect_onsets(&db, &scales).unwrap();
    let centre = onsets.nus.iter().position(|&nu| nu == 69.0).unwrap();
    let column = onsets.channel(centre);
    let peak = (0..column.len())
        .max_by(|&a, &b| column[a].total_cmp(&column[b]))
        .unwrap();
    let peak_time = onsets.time(peak);
    let step_time = start as f64 / RATE;
    assert!(
        peak_time > step_time && peak_time < step_time + 0.1,
        "peak at {peak_time}"
    );
    assert!(column[..onsets.warmup[centre]].iter().all(|&v| v == 0.0));
}

#[test]
fn wav_files_written_by_another_encoder_decode_to_the_same_samples() {
    let dir = TempDir::new().unwrap();
    let signal: Vec<f64> = (0..1000)
        .map(|n| 0.8 * (TAU * 0.013 * n as f64).sin())
        .collect();

    let int_path = dir.path().join("int16.wav");
    let spec = hound::WavSpec {
        channels: 1,
        sample_rate: 22050,
        bits_per_sample: 16,
        sample_format: hound::SampleFormat::Int,
    };
    let mut w = hound::WavWriter::create(&int_path, spec).unwrap();
    for &s in &signal {
        w.write_sample((s * 32767.0).round() as i16).unwrap();
    }
    w.finalize().unwrap();

    let float_path = dir.path().join("float.wav");
    let spec = hound::WavSpec {
        channels: 2,
        sample_rate: 48000,
        bits_per_sample: 32,
        sample_format: hound::SampleFormat::Float,
    };
    let mut w = hound::WavWriter::create(&float_path, spec).unwrap();
    for &s in &signal {
        w.write_sample(s as f32).unwrap();
        w.write_sample(-0.5 * s as f32).unwrap();
    }
    w.finalize().unwrap();

    let ints = read_wav(&int_path).unwrap();
    assert_eq!(ints.sample_rate, 22050.0);
    assert_eq!(ints.samples.len(), signal.len());
    // full scale is 32768
    assert!(ints
        .samples
        .iter()
        .zip(&signal)
        .all(|(a, b)| a * 32768.0 == (b * 32767.0).round()));

    let floats = read_wav(&float_path).unwrap();
    assert_eq!(floats.sample_rate, 48000.0);
    assert!(floats
        .samples
        .iter()
        .zip(&signal)
        .all(|(a, b)| (a - 0.25 * b).abs() < 1e-7));
}

#[test]
fn truncated_wav_is_reported() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("cut.wav");
    let spec = hound::WavSpec {
        channels: 1,
        sample_rate: 8000,
        bits_per_sample: 16,
        sample_format: hound::SampleFormat::Int,
    };
    let mut w = hound::WavWriter::create(&path, spec).unwrap();
    for i in 0..100 {
        w.write_sample(i as i16).unwrap();
    }
    w.finalize().unwrap();
    let bytes = std::fs::read(&path).unwrap();
    std::fs::write(&path, &bytes[..bytes.len() - 11]).unwrap();
    assert!(matches!(read_wav(&path), Err(Error::Truncated { .. })));
    assert!(matches!(
        read_wav(dir.path().join("absent.wav")),
        Err(Error::Io { .. })
    ));
}

#[test]
fn spectrogram_files_round_trip() {
    let dir = TempDir::new().unwrap();
    let cfg = config(LOG7, 60.0, 72.0, 12, 80);
    let db = to_db(
        &compute_spectrogram(&common::sine(300.0, RATE, 0.3), RATE, &cfg).unwrap(),
        1.0,
    )
    .unwrap()
    .grid;

    let csv = dir.path().join("s.csv");
    write_grid_csv(&db, &csv).unwrap();
    let back = read_grid_csv(&csv).unwrap();
    assert_eq!(back.values, db.values);
    assert_eq!(back.nus, db.nus);
    assert!((back.frame_step - db.frame_step).abs() < 1e-12);

    let pgm = dir.path().join("s.pgm");
    write_grid_pgm(&db, &pgm, -80.0, 0.0).unwrap();
    let bytes = std::fs::read(&pgm).unwrap();
    let header = format!("P5\n{} {}\n255\n", db.frames(), db.channels());
    assert!(bytes.starts_with(header.as_bytes()));
    assert_eq!(bytes.len(), header.len() + db.frames() * db.channels());
    assert!(write_grid_pgm(&db, &pgm, 0.0, 0.0).is_err());

    let json = dir.path().join("cfg.json");
    write_json(&cfg, &json).unwrap();
    let restored: SpectrogramConfig =
        serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(restored, cfg);
}
