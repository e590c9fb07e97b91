//! Continuous temporal kernels and their sampled representation.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::ladder::{LadderDistribution, ScaleLadder};
use crate::error::{invalid, Result};

/// A temporal smoothing kernel: the non-causal Gaussian or a time-causal
/// cascade of truncated exponentials.
#[derive(Debug, Clone, PartialEq)]
pub enum TemporalKernelSpec {
    /// Time-shifted Gaussian with variance `tau` (s²) and delay `delta` (s).
    Gaussian {
        tau: f64,
        delta: f64,
    },
    CausalCascade {
        ladder: ScaleLadder,
    },
}

impl TemporalKernelSpec {
    pub fn gaussian(tau: f64, delta: f64) -> Result<Self> {
        if !(tau > 0.0) {
            return Err(invalid(format!("Gaussian kernel needs tau > 0, got {tau}")));
        }
        if !(delta >= 0.0) {
            return Err(invalid(format!(
                "Gaussian kernel needs delta >= 0, got {delta}"
            )));
        }
        Ok(Self::Gaussian { tau, delta })
    }
}

/// Family of temporal window functions, independent of the scale value.
///
/// Used wherever a temporal scale is chosen per channel or per layer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum TemporalFamily {
    Gaussian,
    /// `stages` equal time constants (the Gammatone case).
    CausalUniform {
        stages: usize,
    },
    /// Logarithmically distributed scale levels with ratio `c`.
    CausalLog {
        stages: usize,
        c: f64,
    },
}

impl TemporalFamily {
    pub fn is_causal(&self) -> bool {
        !matches!(self, TemporalFamily::Gaussian)
    }

    /// Cascade length, `None` for the Gaussian.
    pub fn stages(&self) -> Option<usize> {
        match *self {
            TemporalFamily::Gaussian => None,
            TemporalFamily::CausalUniform { stages } | TemporalFamily::CausalLog { stages, .. } => {
                Some(stages)
            }
        }
    }

    pub fn distribution(&self) -> Option<LadderDistribution> {
        match *self {
            TemporalFamily::Gaussian => None,
            TemporalFamily::CausalUniform { .. } => Some(LadderDistribution::Uniform),
            TemporalFamily::CausalLog { c, .. } => Some(LadderDistribution::Logarithmic { c }),
        }
    }

    /// Continuous-time ladder for a causal family at scale `tau` (s²).
    pub fn continuous_ladder(&self, tau: f64) -> Result<Option<ScaleLadder>> {
        match (self.distribution(), self.stages()) {
            (Some(dist), Some(k)) => ScaleLadder::continuous(dist, tau, k).map(Some),
            _ => Ok(None),
        }
    }

    /// Discrete ladder for a causal family at scale `tau` given in samples².
    pub fn discrete_ladder(&self, tau_samples: f64) -> Result<Option<ScaleLadder>> {
        match (self.distribution(), self.stages()) {
            (Some(dist), Some(k)) => ScaleLadder::discrete(dist, tau_samples, k).map(Some),
            _ => Ok(None),
        }
    }

    pub fn kernel_spec(&self, tau: f64) -> Result<TemporalKernelSpec> {
        match self.continuous_ladder(tau)? {
            Some(ladder) => Ok(TemporalKernelSpec::CausalCascade { ladder }),
            None => TemporalKernelSpec::gaussian(tau, 0.0),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            TemporalFamily::Gaussian => Ok(()),
            TemporalFamily::CausalUniform { stages } if stages >= 1 => Ok(()),
            TemporalFamily::CausalLog { stages, c } if stages >= 1 && c > 1.0 => Ok(()),
            other => Err(invalid(format!("invalid temporal family {other:?}"))),
        }
    }
}

/// A kernel sampled on a uniform grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledKernel {
    pub values: Vec<f64>,
    /// Index of the sample at `t = 0`.
    pub origin_index: usize,
    /// Sample spacing in the kernel's time unit.
    pub dt: f64,
}

impl SampledKernel {
    pub fn identity() -> Self {
        Self {
            values: vec![1.0],
            origin_index: 0,
            dt: 1.0,
        }
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    /// Time of sample `i` relative to the origin.
    pub fn time(&self, i: usize) -> f64 {
        (i as f64 - self.origin_index as f64) * self.dt
    }

    /// First moment of the weights, treating them as a mass distribution.
    pub fn mean(&self) -> f64 {
        let mass = self.sum();
        self.values
            .iter()
            .enumerate()
            .map(|(i, w)| w * self.time(i))
            .sum::<f64>()
            / mass
    }

    pub fn variance(&self) -> f64 {
        let mass = self.sum();
        let m = self.mean();
        self.values
            .iter()
            .enumerate()
            .map(|(i, w)| {
                let d = self.time(i) - m;
                w * d * d
            })
            .sum::<f64>()
            / mass
    }

    /// Full discrete convolution of two kernels sharing the same `dt`.
    pub fn convolve(&self, other: &SampledKernel) -> SampledKernel {
        let n = self.values.len() + other.values.len() - 1;
        let mut values = vec![0.0; n];
        for (i, a) in self.values.iter().enumerate() {
            for (j, b) in other.values.iter().enumerate() {
                values[i + j] += a * b;
            }
        }
        SampledKernel {
            values,
            origin_index: self.origin_index + other.origin_index,
            dt: self.dt,
        }
    }

    /// Weight at integer offset `n` from the origin (zero outside the support).
    pub fn at(&self, n: i64) -> f64 {
        let idx = n + self.origin_index as i64;
        if idx < 0 {
            return 0.0;
        }
        self.values.get(idx as usize).copied().unwrap_or(0.0)
    }
}

/// `(1 / sqrt(2 pi tau)) exp(-(t - delta)^2 / (2 tau))`
pub fn gaussian_kernel_sample(tau: f64, delta: f64, t: f64) -> f64 {
    let d = t - delta;
    (-(d * d) / (2.0 * tau)).exp() / (2.0 * PI * tau).sqrt()
}

/// Probabilists' Hermite polynomial `He_n(x)`.
pub fn hermite(n: usize, x: f64) -> f64 {
    let (mut prev, mut cur) = (1.0, x);
    if n == 0 {
        return prev;
    }
    for k in 1..n {
        let next = x * cur - k as f64 * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Derivative of order `order` of the Gaussian kernel with variance `tau`, delay `delta`.
pub fn gaussian_derivative_sample(tau: f64, delta: f64, order: usize, t: f64) -> f64 {
    let sigma = tau.sqrt();
    let x = (t - delta) / sigma;
    let sign = if order % 2 == 0 { 1.0 } else { -1.0 };
    sign * hermite(order, x) / sigma.powi(order as i32) * gaussian_kernel_sample(tau, delta, t)
}

fn gamma_of_integer(k: usize) -> f64 {
    (1..k).map(|i| i as f64).product()
}

/// Composed kernel of `stages` equal truncated exponentials with time constant `mu`:
/// `t^(K-1) e^(-t/mu) / (mu^K Gamma(K))` for `t >= 0`.
///
/// At `t = 0` the right-hand limit is returned.
pub fn composed_uniform_kernel_sample(mu: f64, stages: usize, t: f64) -> f64 {
    composed_uniform_terms(mu, stages, t, &[(0, 1.0)])
}

/// First time derivative of [`composed_uniform_kernel_sample`].
pub fn composed_uniform_kernel_d1(mu: f64, stages: usize, t: f64) -> f64 {
    let k = stages as f64;
    composed_uniform_terms(mu, stages, t, &[(1, k - 1.0), (0, -1.0 / mu)])
}

/// Second time derivative of [`composed_uniform_kernel_sample`].
pub fn composed_uniform_kernel_d2(mu: f64, stages: usize, t: f64) -> f64 {
    let k = stages as f64;
    composed_uniform_terms(
        mu,
        stages,
        t,
        &[
            (2, (k - 1.0) * (k - 2.0)),
            (1, -2.0 * (k - 1.0) / mu),
            (0, 1.0 / (mu * mu)),
        ],
    )
}

/// `e^(-t/mu) / (mu^K Gamma(K)) * sum coeff * t^(K-1-drop)`, skipping zero coefficients.
fn composed_uniform_terms(mu: f64, stages: usize, t: f64, terms: &[(usize, f64)]) -> f64 {
    if t < 0.0 || stages == 0 {
        return 0.0;
    }
    let k = stages as i32;
    let norm = if stages <= 60 {
        1.0 / (mu.powi(k) * gamma_of_integer(stages))
    } else {
        (-(k as f64) * mu.ln() - ln_gamma_of_integer(stages)).exp()
    };
    let decay = (-t / mu).exp();
    let poly: f64 = terms
        .iter()
        .filter(|(_, c)| *c != 0.0)
        .map(|&(drop, c)| {
            let power = k - 1 - drop as i32;
            if power < 0 {
                // only reachable with a zero coefficient for integer K
                0.0
            } else {
                c * t.powi(power)
            }
        })
        .sum();
    norm * decay * poly
}

fn ln_gamma_of_integer(k: usize) -> f64 {
    (1..k).map(|i| (i as f64).ln()).sum()
}
