//! Temporal scale-space: Gaussian and time-causal kernels, their discrete
//! scale-space preserving implementations and temporal scale ladders.

mod cascade;
mod discrete_gaussian;
mod kernel;
mod ladder;
mod recursive;

pub use cascade::{cascade_kernel_numeric, CascadeResponse, CASCADE_MASS_COVERAGE};
pub use discrete_gaussian::{
    convolve_mirror, discrete_gaussian_kernel, mirror_index, DEFAULT_EPSILON,
};
pub use kernel::{
    composed_uniform_kernel_d1, composed_uniform_kernel_d2, composed_uniform_kernel_sample,
    gaussian_derivative_sample, gaussian_kernel_sample, hermite, SampledKernel, TemporalFamily,
    TemporalKernelSpec,
};
pub use ladder::{discrete_time_constant, LadderDistribution, LadderUnits, ScaleLadder};
pub use recursive::{
    discrete_recursive_smooth, temporal_derivative_channels, warmup_samples, RecursiveSmoother,
};

/// Builds a continuous-time ladder; see [`ScaleLadder::continuous`].
pub fn build_ladder(
    distribution: LadderDistribution,
    tau_max: f64,
    stages: usize,
) -> crate::Result<ScaleLadder> {
    ScaleLadder::continuous(distribution, tau_max, stages)
}

/// Sampled Gaussian derivative kernel of order `order >= 1` with its weights
/// shifted to sum exactly to zero.
pub fn gaussian_derivative_kernel(tau: f64, order: usize, dt: f64, epsilon: f64) -> SampledKernel {
    let sigma = tau.sqrt();
    let half_width = ((2.0 * (1.0 / epsilon).ln()).sqrt() + 1.0 + order as f64) * sigma;
    let n = (half_width / dt).ceil() as usize;
    let mut values: Vec<f64> = (0..=2 * n)
        .map(|i| gaussian_derivative_sample(tau, 0.0, order, (i as f64 - n as f64) * dt) * dt)
        .collect();
    if order >= 1 {
        let mean = values.iter().sum::<f64>() / values.len() as f64;
        values.iter_mut().for_each(|v| *v -= mean);
    }
    SampledKernel {
        values,
        origin_index: n,
        dt,
    }
}
