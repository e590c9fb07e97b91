//! Multi-scale complex spectrograms over a logarithmic frequency axis.

mod compute;
mod db;
mod delay;
mod freq_grid;
mod gammatone;
mod window;

pub use compute::{
    compute_spectrogram, default_hop, ComplexSpectrogram, SpectrogramConfig, MIN_STAGE_MU,
};
pub use db::{to_db, LogSpectrogram, MAGNITUDE_FLOOR};
pub use delay::{delay_compensate, first_inflection_delays};
pub use freq_grid::{
    build_frequency_grid, hz_to_nu, nu_to_hz, nu_to_omega, FrequencyGrid, HZ_REF, NU_REF,
};
pub use gammatone::{
    gammatone, gammatone_equivalence_check, gammatone_parameters, generalized_gammatone_deviation,
};
pub use window::{window_scale, UpperBound, WindowScale, WindowScaleLaw};
