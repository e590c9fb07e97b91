use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

#[derive(Parser, Debug)]
#[command(
    name = "auditory-rf",
    version,
    about = "Multi-scale spectrograms and auditory receptive field features"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Compute a multi-scale spectrogram of a WAV file.
    Spectrogram {
        /// Input WAV file.
        wav: PathBuf,
        #[command(flatten)]
        opts: SpectrogramOpts,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Compute auditory feature maps from a WAV file.
    Features {
        /// Input WAV file.
        wav: PathBuf,
        #[command(flatten)]
        opts: SpectrogramOpts,
        #[command(flatten)]
        features: FeatureOpts,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Print the frequency selectivity and temporal delay tables.
    Analyze {
        /// Table to print (1, 2 or 3); all tables when omitted.
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=3))]
        table: Option<u8>,
        /// Comma-separated output instead of aligned text.
        #[arg(long)]
        csv: bool,
    },
    /// Dump temporal impulse responses or sampled receptive fields.
    Kernels {
        #[command(flatten)]
        opts: KernelOpts,
        #[command(flatten)]
        common: CommonOpts,
    },
}

#[derive(Args, Debug, Clone, Default)]
pub struct CommonOpts {
    /// JSON run configuration; command-line flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(ValueEnum, Serialize, Deserialize, Debug, Clone, Copy, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyArg {
    Gauss,
    RecUni,
    RecLog,
}

/// First-layer options. Unset values fall back to the config file, then to
/// the defaults shown in the help text.
#[derive(Args, Serialize, Deserialize, Debug, Clone, Default, PartialEq)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct SpectrogramOpts {
    /// Window family [default: rec-log].
    #[arg(long, value_enum)]
    pub family: Option<FamilyArg>,
    /// Number of recursive filter stages [default: 7].
    #[arg(long = "K")]
    #[serde(rename = "K")]
    pub k: Option<usize>,
    /// Ratio between successive scale levels of rec-log [default: 1.4142135623730951].
    #[arg(long)]
    pub c: Option<f64>,
    /// Window extent in periods of the channel frequency [default: 8].
    #[arg(long)]
    pub n: Option<f64>,
    /// Soft lower threshold on the window extent, ms [default: 1].
    #[arg(long = "tau0-ms")]
    pub tau0_ms: Option<f64>,
    /// Use a fixed window with this extent (ms) in every channel instead of wavelength-proportional windows.
    #[arg(long = "window-ms")]
    pub window_ms: Option<f64>,
    /// Frequency channels per octave [default: 48].
    #[arg(long = "bins-per-octave")]
    pub bins_per_octave: Option<usize>,
    /// Lowest channel, MIDI note number [default: 36].
    #[arg(long = "nu-min")]
    pub nu_min: Option<f64>,
    /// Highest channel, MIDI note number [default: 108].
    #[arg(long = "nu-max")]
    pub nu_max: Option<f64>,
    /// Frame step, ms [default: 1].
    #[arg(long = "hop-ms")]
    pub hop_ms: Option<f64>,
    /// Write dB values instead of magnitudes.
    #[arg(long)]
    pub db: bool,
    /// Reference magnitude of 0 dB [default: 1].
    #[arg(long)]
    pub reference: Option<f64>,
    /// Shift each channel earlier by the first inflection point of its window (causal families only).
    #[arg(long = "compensate-delay")]
    pub compensate_delay: bool,
    /// Output grid as tab-separated text.
    #[arg(long = "out-csv")]
    pub out_csv: Option<PathBuf>,
    /// Output grid as a binary PGM image.
    #[arg(long = "out-pgm")]
    pub out_pgm: Option<PathBuf>,
    /// Value mapped to black in PGM output [default: -80 for spectrograms, map minimum for features].
    #[arg(long = "pgm-min", allow_hyphen_values = true)]
    pub pgm_min: Option<f64>,
    /// Value mapped to white in PGM output [default: 0 for spectrograms, map maximum for features].
    #[arg(long = "pgm-max", allow_hyphen_values = true)]
    pub pgm_max: Option<f64>,
}

/// Second-layer feature options.
#[derive(Args, Serialize, Deserialize, Debug, Clone, Default, PartialEq)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct FeatureOpts {
    /// Rectified first temporal derivative.
    #[arg(long)]
    pub onsets: bool,
    /// Rectified negated first temporal derivative.
    #[arg(long)]
    pub offsets: bool,
    /// Rectified negated second derivative over log-frequency.
    #[arg(long)]
    pub bands: bool,
    /// Partial-tone curves (written with --out-json).
    #[arg(long)]
    pub partials: bool,
    /// Glissando filter bank, semitones per second, e.g. -20,0,20.
    #[arg(
        long = "glissando-bank",
        value_delimiter = ',',
        allow_hyphen_values = true
    )]
    pub glissando_bank: Option<Vec<f64>>,
    /// Refine the bank maximum by parabolic interpolation.
    #[arg(long = "glissando-interpolate")]
    pub glissando_interpolate: bool,
    /// Second-moment glissando estimate.
    #[arg(long = "second-moment")]
    pub second_moment: bool,
    /// Temporal scale of the second layer, standard deviation in ms [default: 5].
    #[arg(long = "tau-a-ms")]
    pub tau_a_ms: Option<f64>,
    /// Spectral scale of the second layer, semitones [default: 0.5].
    #[arg(long = "sigma-nu")]
    pub sigma_nu: Option<f64>,
    /// Temporal integration scale of the second-moment estimate, ms [default: 2 x tau-a-ms].
    #[arg(long = "tau-i-ms")]
    pub tau_i_ms: Option<f64>,
    /// Spectral integration scale of the second-moment estimate, semitones [default: 2 x sigma-nu].
    #[arg(long = "sigma-i-nu")]
    pub sigma_i_nu: Option<f64>,
    /// Minimum -D_nunu of partial-tone points [default: 3].
    #[arg(long = "c-min")]
    pub c_min: Option<f64>,
    /// Largest change of a partial between frames, semitones [default: 1].
    #[arg(long = "max-jump")]
    pub max_jump: Option<f64>,
    /// Drop partial curves with fewer points [default: 1].
    #[arg(long = "min-points")]
    pub min_points: Option<usize>,
    /// Partial curves and glissando summaries as JSON.
    #[arg(long = "out-json")]
    pub out_json: Option<PathBuf>,
}

/// Options of the `kernels` command.
#[derive(Args, Serialize, Deserialize, Debug, Clone, Default, PartialEq)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct KernelOpts {
    /// Temporal family [default: rec-log].
    #[arg(long, value_enum)]
    pub family: Option<FamilyArg>,
    /// Number of recursive filter stages [default: 7].
    #[arg(long = "K")]
    #[serde(rename = "K")]
    pub k: Option<usize>,
    /// Ratio between successive scale levels of rec-log [default: 1.4142135623730951].
    #[arg(long)]
    pub c: Option<f64>,
    /// Temporal scale, standard deviation in ms [default: 10].
    #[arg(long = "tau-ms")]
    pub tau_ms: Option<f64>,
    /// Time step, ms [default: 0.1].
    #[arg(long = "dt-ms")]
    pub dt_ms: Option<f64>,
    /// Time span, ms [default: 10 x tau-ms].
    #[arg(long = "span-ms")]
    pub span_ms: Option<f64>,
    /// Sample a spectro-temporal receptive field instead of the temporal kernel.
    #[arg(long)]
    pub image: bool,
    /// Order of the temporal derivative [default: 0].
    #[arg(long)]
    pub alpha: Option<usize>,
    /// Order of the log-frequency derivative [default: 0].
    #[arg(long)]
    pub beta: Option<usize>,
    /// Glissando of the receptive field, semitones per second [default: 0].
    #[arg(long, allow_hyphen_values = true)]
    pub v: Option<f64>,
    /// Spectral scale, semitones [default: 0.5].
    #[arg(long = "sigma-nu")]
    pub sigma_nu: Option<f64>,
    /// Log-frequency span, semitones [default: 8 x sigma-nu].
    #[arg(long = "nu-span")]
    pub nu_span: Option<f64>,
    /// Log-frequency step, semitones [default: 0.05].
    #[arg(long = "dnu")]
    pub dnu: Option<f64>,
    /// Output as tab-separated text.
    #[arg(long = "out-csv")]
    pub out_csv: Option<PathBuf>,
    /// Receptive field image as a binary PGM (with --image).
    #[arg(long = "out-pgm")]
    pub out_pgm: Option<PathBuf>,
}
