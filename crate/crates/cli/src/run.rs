use std::f64::consts::SQRT_2;
use std::path::{Path, PathBuf};

use auditory_rf::features::{
    band_response, detect_offsets, detect_onsets, enhance_bands, extract_partial_curves,
    glissando_filterbank, second_moment_glissando, CurveParams, FeatureScales, PartialCurve,
    DEFAULT_C_MIN,
};
use auditory_rf::io::{read_wav, write_grid_csv, write_grid_pgm, write_json, AudioBuffer};
use auditory_rf::receptive_fields::{rf_kernel_image, RfSpec};
use auditory_rf::selectivity::{format_table_csv, format_table_text, table1, table2, table3};
use auditory_rf::spectrogram::{default_hop, delay_compensate, nu_to_hz};
use auditory_rf::temporal::{gaussian_kernel_sample, CascadeResponse};
use auditory_rf::{
    compute_spectrogram, to_db, FrequencyGrid, SpectrogramConfig, TemporalFamily,
    TimeFrequencyGrid, WindowScale, WindowScaleLaw,
};
use serde::Serialize;

use crate::args::{FamilyArg, FeatureOpts, KernelOpts, SpectrogramOpts};
use crate::CliError;

const DEFAULT_STAGES: usize = 7;
const DEFAULT_N: f64 = 8.0;
const DEFAULT_TAU0_MS: f64 = 1.0;
const DEFAULT_BINS_PER_OCTAVE: usize = 48;
const DEFAULT_NU_MIN: f64 = 36.0;
const DEFAULT_NU_MAX: f64 = 108.0;
const DEFAULT_PGM_RANGE: (f64, f64) = (-80.0, 0.0);
const DEFAULT_TAU_A_MS: f64 = 5.0;
const DEFAULT_SIGMA_NU: f64 = 0.5;
const DEFAULT_KERNEL_TAU_MS: f64 = 10.0;
const DEFAULT_KERNEL_DT_MS: f64 = 0.1;
const DEFAULT_DNU: f64 = 0.05;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn positive(name: &str, v: f64) -> Result<f64, CliError> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(usage(format!("--{name} must be positive, got {v}")))
    }
}

fn family(
    arg: Option<FamilyArg>,
    k: Option<usize>,
    c: Option<f64>,
) -> Result<TemporalFamily, CliError> {
    let stages = k.unwrap_or(DEFAULT_STAGES);
    let family = match arg.unwrap_or(FamilyArg::RecLog) {
        FamilyArg::Gauss => TemporalFamily::Gaussian,
        FamilyArg::RecUni => TemporalFamily::CausalUniform { stages },
        FamilyArg::RecLog => TemporalFamily::CausalLog {
            stages,
            c: c.unwrap_or(SQRT_2),
        },
    };
    family.validate()?;
    Ok(family)
}

fn ms_to_tau(ms: f64) -> f64 {
    (ms * 1e-3).powi(2)
}

fn spectrogram_config(
    opts: &SpectrogramOpts,
    sample_rate: f64,
) -> Result<SpectrogramConfig, CliError> {
    let family = family(opts.family, opts.k, opts.c)?;
    let window = match opts.window_ms {
        Some(ms) => WindowScale::Fixed {
            tau: ms_to_tau(positive("window-ms", ms)?),
        },
        None => {
            let tau0 = opts.tau0_ms.unwrap_or(DEFAULT_TAU0_MS);
            if !(tau0 >= 0.0) {
                return Err(usage(format!("--tau0-ms must be >= 0, got {tau0}")));
            }
            WindowScale::Proportional(WindowScaleLaw::new(
                opts.n.unwrap_or(DEFAULT_N),
                ms_to_tau(tau0),
                None,
            )?)
        }
    };
    let nu_max = opts.nu_max.unwrap_or(DEFAULT_NU_MAX);
    if nu_to_hz(nu_max) >= 0.5 * sample_rate {
        return Err(usage(format!(
            "--nu-max {nu_max} ({:.0} Hz) is at or above the Nyquist frequency {:.0} Hz",
            nu_to_hz(nu_max),
            0.5 * sample_rate
        )));
    }
    let grid = FrequencyGrid::new(
        opts.nu_min.unwrap_or(DEFAULT_NU_MIN),
        nu_max,
        opts.bins_per_octave.unwrap_or(DEFAULT_BINS_PER_OCTAVE),
    )?;
    let hop = match opts.hop_ms {
        Some(ms) => ((positive("hop-ms", ms)? * 1e-3 * sample_rate).round() as usize).max(1),
        None => default_hop(sample_rate),
    };
    let config = SpectrogramConfig::new(grid, window, family, hop);
    config.validate()?;
    Ok(config)
}

/// dB spectrogram and (when requested) the magnitude grid.
struct Computed {
    db: TimeFrequencyGrid<f64>,
    magnitude: TimeFrequencyGrid<f64>,
}

fn compute(audio: &AudioBuffer, opts: &SpectrogramOpts) -> Result<Computed, CliError> {
    let config = spectrogram_config(opts, audio.sample_rate)?;
    let mut spec = compute_spectrogram(&audio.samples, audio.sample_rate, &config)?;
    if opts.compensate_delay {
        spec = delay_compensate(&spec)?;
    }
    let reference = positive("reference", opts.reference.unwrap_or(1.0))?;
    Ok(Computed {
        db: to_db(&spec, reference)?.grid,
        magnitude: spec.magnitude(),
    })
}

fn load_audio(path: &Path) -> Result<AudioBuffer, CliError> {
    let audio = read_wav(path)?;
    if audio.samples.is_empty() {
        return Err(CliError::Runtime(format!("{}: no samples", path.display())));
    }
    Ok(audio)
}

pub fn spectrogram(wav: &Path, opts: &SpectrogramOpts) -> Result<(), CliError> {
    if opts.out_csv.is_none() && opts.out_pgm.is_none() {
        return Err(usage("no output requested (use --out-csv or --out-pgm)"));
    }
    let audio = load_audio(wav)?;
    let computed = compute(&audio, opts)?;
    if let Some(path) = &opts.out_csv {
        write_grid_csv(
            if opts.db {
                &computed.db
            } else {
                &computed.magnitude
            },
            path,
        )?;
    }
    if let Some(path) = &opts.out_pgm {
        let lo = opts.pgm_min.unwrap_or(DEFAULT_PGM_RANGE.0);
        let hi = opts.pgm_max.unwrap_or(DEFAULT_PGM_RANGE.1);
        write_grid_pgm(&computed.db, path, lo, hi)?;
    }
    Ok(())
}

/// `out.csv` with `name` inserted before the extension: `out.onsets.csv`.
fn suffixed(path: &Path, name: &str) -> PathBuf {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let file = match path.extension() {
        Some(ext) => format!("{stem}.{name}.{}", ext.to_string_lossy()),
        None => format!("{stem}.{name}"),
    };
    path.with_file_name(file)
}

fn value_range(grid: &TimeFrequencyGrid<f64>) -> (f64, f64) {
    let finite = grid.values.iter().copied().filter(|v| v.is_finite());
    let (lo, hi) = finite.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
        (lo.min(v), hi.max(v))
    });
    if !(hi > lo) {
        let base = if lo.is_finite() { lo } else { 0.0 };
        (base, base + 1.0)
    } else {
        (lo, hi)
    }
}

#[derive(Serialize)]
struct FeatureReport<'a> {
    frame_step: f64,
    partials: Option<&'a [PartialCurve]>,
    glissando_bank: Option<&'a [f64]>,
    second_moment_floor: Option<f64>,
}

pub fn features(wav: &Path, opts: &SpectrogramOpts, feat: &FeatureOpts) -> Result<(), CliError> {
    let grid_features = feat.onsets
        || feat.offsets
        || feat.bands
        || feat.glissando_bank.is_some()
        || feat.second_moment;
    if !grid_features && !feat.partials {
        return Err(usage(
            "no feature selected (use --onsets, --offsets, --bands, --partials, --glissando-bank or --second-moment)",
        ));
    }
    let grid_out = opts.out_csv.is_some() || opts.out_pgm.is_some();
    if !grid_out && feat.out_json.is_none() {
        return Err(usage(
            "no output requested (use --out-csv, --out-pgm or --out-json)",
        ));
    }
    if grid_features && !grid_out {
        return Err(usage("feature maps need --out-csv or --out-pgm"));
    }
    if feat.partials && feat.out_json.is_none() {
        return Err(usage("--partials needs --out-json"));
    }
    if matches!(&feat.glissando_bank, Some(bank) if bank.is_empty()) {
        return Err(usage("--glissando-bank needs at least one value"));
    }

    let tau_a_ms = positive("tau-a-ms", feat.tau_a_ms.unwrap_or(DEFAULT_TAU_A_MS))?;
    let sigma_nu = positive("sigma-nu", feat.sigma_nu.unwrap_or(DEFAULT_SIGMA_NU))?;
    let layer_family = family(opts.family, opts.k, opts.c)?;
    let scales = FeatureScales::new(layer_family, ms_to_tau(tau_a_ms), sigma_nu * sigma_nu);

    let audio = load_audio(wav)?;
    let db = compute(&audio, opts)?.db;

    let mut maps: Vec<(&str, TimeFrequencyGrid<f64>)> = Vec::new();
    if feat.onsets {
        maps.push(("onsets", detect_onsets(&db, &scales)?));
    }
    if feat.offsets {
        maps.push(("offsets", detect_offsets(&db, &scales)?));
    }
    if feat.bands {
        maps.push(("bands", enhance_bands(&db, &scales)?));
    }
    if let Some(bank) = &feat.glissando_bank {
        maps.push((
            "glissando",
            glissando_filterbank(&db, bank, &scales, feat.glissando_interpolate)?.v_hat,
        ));
    }
    let mut floor = None;
    if feat.second_moment {
        let tau_i_ms = positive("tau-i-ms", feat.tau_i_ms.unwrap_or(2.0 * tau_a_ms))?;
        let sigma_i = positive("sigma-i-nu", feat.sigma_i_nu.unwrap_or(2.0 * sigma_nu))?;
        let field = second_moment_glissando(&db, &scales, ms_to_tau(tau_i_ms), sigma_i * sigma_i)?;
        floor = Some(field.floor);
        maps.push(("second-moment", field.v_hat.map(|v| v.unwrap_or(f64::NAN))));
    }
    let partials = if feat.partials {
        let params = CurveParams {
            c_min: feat.c_min.unwrap_or(DEFAULT_C_MIN),
            max_jump: positive("max-jump", feat.max_jump.unwrap_or(1.0))?,
            min_points: feat.min_points.unwrap_or(1),
        };
        Some(extract_partial_curves(
            &band_response(&db, &scales)?,
            &params,
        ))
    } else {
        None
    };

    let single = maps.len() == 1;
    for (name, map) in &maps {
        let target = |p: &Path| {
            if single {
                p.to_path_buf()
            } else {
                suffixed(p, name)
            }
        };
        if let Some(path) = &opts.out_csv {
            write_grid_csv(map, target(path))?;
        }
        if let Some(path) = &opts.out_pgm {
            let (lo, hi) = value_range(map);
            write_grid_pgm(
                map,
                target(path),
                opts.pgm_min.unwrap_or(lo),
                opts.pgm_max.unwrap_or(hi),
            )?;
        }
    }
    if let Some(path) = &feat.out_json {
        let report = FeatureReport {
            frame_step: db.frame_step,
            partials: partials.as_deref(),
            glissando_bank: feat.glissando_bank.as_deref(),
            second_moment_floor: floor,
        };
        write_json(&report, path)?;
    }
    Ok(())
}

pub fn analyze(table: Option<u8>, csv: bool) -> Result<(), CliError> {
    let tables = match table {
        Some(1) => vec![table1()?],
        Some(2) => vec![table2()?],
        Some(3) => vec![table3()?],
        Some(n) => return Err(usage(format!("no table {n}"))),
        None => vec![table1()?, table2()?, table3()?],
    };
    let text: Vec<String> = tables
        .iter()
        .map(|t| {
            if csv {
                format_table_csv(t)
            } else {
                format_table_text(t)
            }
        })
        .collect();
    print!("{}", text.join("\n"));
    Ok(())
}

pub fn kernels(opts: &KernelOpts) -> Result<(), CliError> {
    if opts.out_csv.is_none() && opts.out_pgm.is_none() {
        return Err(usage("no output requested (use --out-csv or --out-pgm)"));
    }
    if opts.out_pgm.is_some() && !opts.image {
        return Err(usage("--out-pgm needs --image"));
    }
    let family = family(opts.family, opts.k, opts.c)?;
    let sigma_ms = positive("tau-ms", opts.tau_ms.unwrap_or(DEFAULT_KERNEL_TAU_MS))?;
    let tau = ms_to_tau(sigma_ms);
    let dt = positive("dt-ms", opts.dt_ms.unwrap_or(DEFAULT_KERNEL_DT_MS))? * 1e-3;
    let span = positive("span-ms", opts.span_ms.unwrap_or(10.0 * sigma_ms))? * 1e-3;

    if opts.image {
        let sigma_nu = positive("sigma-nu", opts.sigma_nu.unwrap_or(DEFAULT_SIGMA_NU))?;
        let spec = RfSpec::smoothing(family, tau, sigma_nu * sigma_nu)
            .with_derivative(opts.alpha.unwrap_or(0), opts.beta.unwrap_or(0))
            .with_glissando(opts.v.unwrap_or(0.0));
        let nu_span = positive("nu-span", opts.nu_span.unwrap_or(8.0 * sigma_nu))?;
        let dnu = positive("dnu", opts.dnu.unwrap_or(DEFAULT_DNU))?;
        let image = rf_kernel_image(&spec, span, nu_span, dt, dnu)?;
        let grid = TimeFrequencyGrid {
            t0: image.times[0],
            frame_step: dt,
            warmup: vec![0; image.nus.len()],
            nus: image.nus,
            values: image.values,
        };
        if let Some(path) = &opts.out_csv {
            write_grid_csv(&grid, path)?;
        }
        if let Some(path) = &opts.out_pgm {
            let peak = grid.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            let peak = if peak > 0.0 { peak } else { 1.0 };
            write_grid_pgm(&grid, path, -peak, peak)?;
        }
        return Ok(());
    }

    let samples = (span / dt).round() as usize + 1;
    let rows: Vec<(f64, f64)> = match family.continuous_ladder(tau)? {
        None => (0..samples)
            .map(|i| {
                let t = (i as f64 - 0.5 * (samples - 1) as f64) * dt;
                (t, gaussian_kernel_sample(tau, 0.0, t))
            })
            .collect(),
        Some(ladder) => {
            let response = CascadeResponse::from_ladder(&ladder)?;
            let prop = response.propagator(dt);
            let last = ladder.stages() - 1;
            let mut state = response.initial_state();
            let mut rows = Vec::with_capacity(samples);
            for i in 0..samples {
                rows.push((i as f64 * dt, state[last]));
                state = response.step(&prop, &state);
            }
            rows
        }
    };
    let mut text = String::from("t\th\n");
    for (t, h) in rows {
        text.push_str(&format!("{t}\t{h}\n"));
    }
    let path = opts.out_csv.as_ref().expect("checked above");
    std::fs::write(path, text).map_err(|e| CliError::Runtime(format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suffix_goes_before_the_extension() {
        assert_eq!(
            suffixed(Path::new("out/y.csv"), "onsets"),
            PathBuf::from("out/y.onsets.csv")
        );
        assert_eq!(suffixed(Path::new("y"), "bands"), PathBuf::from("y.bands"));
    }
}
