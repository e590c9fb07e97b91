//! Idealized auditory receptive fields built on temporal scale-space theory.
//!
//! The crate is organised as a pipeline:
//!
//! * [`temporal`]: Gaussian and time-causal temporal kernels, their discrete
//!   implementations (recursive filters, discrete Gaussian) and scale ladders.
//! * [`spectrogram`]: multi-scale complex spectrograms (Gabor, Gammatone and
//!   generalized Gammatone windows) over a MIDI-spaced frequency axis.
//! * [`receptive_fields`]: second-layer spectro-temporal derivative filters on
//!   the dB spectrogram, including glissando-adapted filters.
//! * [`features`]: onsets, spectral bands, partial-tone curves and glissando
//!   estimates.
//! * [`selectivity`]: closed-form frequency selectivity and temporal delay
//!   analysis of the window families.
//! * [`io`]: WAV input and CSV / PGM / JSON output.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::manual_is_multiple_of)]

pub mod error;
pub mod features;
pub mod grid;
pub mod io;
pub mod receptive_fields;
pub mod selectivity;
pub mod spectrogram;
pub mod temporal;

pub use error::{Error, Result};
pub use grid::TimeFrequencyGrid;
pub use num_complex::Complex64;
pub use spectrogram::{
    compute_spectrogram, to_db, ComplexSpectrogram, FrequencyGrid, LogSpectrogram,
    SpectrogramConfig, WindowScale, WindowScaleLaw,
};
pub use temporal::{LadderDistribution, ScaleLadder, TemporalFamily, TemporalKernelSpec};
