//! Temporal scale ladders: the discrete set of intermediate scale levels
//! realised by first-order integrators coupled in cascade.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// How the intermediate scale levels are spread between 0 and `tau_max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum LadderDistribution {
    /// `tau_k = (k / K) tau_max`
    Uniform,
    /// `tau_k = c^(2(k - K)) tau_max`, a geometric series with ratio `c^2`.
    Logarithmic { c: f64 },
}

/// Units of the time constants stored in a ladder.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LadderUnits {
    /// Continuous time; `mus` are seconds and `mu_k^2 = tau_k - tau_{k-1}`.
    Continuous,
    /// Unit-spaced samples; `mus` are samples and `mu_k^2 + mu_k = tau_k - tau_{k-1}`.
    Discrete,
}

/// Ordered temporal scale levels together with the per-stage time constants.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScaleLadder {
    distribution: LadderDistribution,
    units: LadderUnits,
    tau_max: f64,
    levels: Vec<f64>,
    mus: Vec<f64>,
}

impl ScaleLadder {
    /// Builds a continuous-time ladder (levels in seconds², time constants in seconds).
    pub fn continuous(
        distribution: LadderDistribution,
        tau_max: f64,
        stages: usize,
    ) -> Result<Self> {
        let levels = levels(distribution, tau_max, stages)?;
        let mus = match distribution {
            LadderDistribution::Uniform => vec![(tau_max / stages as f64).sqrt(); stages],
            LadderDistribution::Logarithmic { c } => {
                // closed forms avoid the cancellation in sqrt(tau_k - tau_{k-1})
                let root = tau_max.sqrt();
                let k_total = stages as i32;
                (1..=k_total)
                    .map(|k| {
                        if k == 1 {
                            c.powi(1 - k_total) * root
                        } else {
                            c.powi(k - k_total - 1) * (c * c - 1.0).sqrt() * root
                        }
                    })
                    .collect()
            }
        };
        Ok(Self {
            distribution,
            units: LadderUnits::Continuous,
            tau_max,
            levels,
            mus,
        })
    }

    /// Builds a ladder for first-order recursive filters over unit-spaced samples.
    ///
    /// `tau_max` is a variance in samples². Each stage realises the variance
    /// increment `dtau_k` exactly through `mu_k = (sqrt(1 + 4 dtau_k) - 1) / 2`.
    pub fn discrete(distribution: LadderDistribution, tau_max: f64, stages: usize) -> Result<Self> {
        let levels = levels(distribution, tau_max, stages)?;
        let mut prev = 0.0;
        let mus = levels
            .iter()
            .map(|&tau| {
                let dtau = tau - prev;
                prev = tau;
                discrete_time_constant(dtau)
            })
            .collect();
        Ok(Self {
            distribution,
            units: LadderUnits::Discrete,
            tau_max,
            levels,
            mus,
        })
    }

    pub fn distribution(&self) -> LadderDistribution {
        self.distribution
    }

    pub fn units(&self) -> LadderUnits {
        self.units
    }

    pub fn tau_max(&self) -> f64 {
        self.tau_max
    }

    /// Number of cascade stages `K`.
    pub fn stages(&self) -> usize {
        self.mus.len()
    }

    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    pub fn mus(&self) -> &[f64] {
        &self.mus
    }

    /// Temporal mean of the composed kernel, `sum mu_k` (both unit systems).
    pub fn mean(&self) -> f64 {
        self.mus.iter().sum()
    }

    /// Temporal variance of the composed kernel.
    pub fn variance(&self) -> f64 {
        match self.units {
            LadderUnits::Continuous => self.mus.iter().map(|m| m * m).sum(),
            LadderUnits::Discrete => self.mus.iter().map(|m| m * m + m).sum(),
        }
    }

    /// Smallest stage time constant.
    pub fn min_mu(&self) -> f64 {
        self.mus.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// Time constant of a discrete first-order recursive filter with variance `dtau`.
pub fn discrete_time_constant(dtau: f64) -> f64 {
    // 2 dtau / (sqrt(1 + 4 dtau) + 1) == (sqrt(1 + 4 dtau) - 1) / 2 without cancellation
    2.0 * dtau / ((1.0 + 4.0 * dtau).sqrt() + 1.0)
}

fn levels(distribution: LadderDistribution, tau_max: f64, stages: usize) -> Result<Vec<f64>> {
    if stages == 0 {
        return Err(invalid("a scale ladder needs at least one stage"));
    }
    if !(tau_max > 0.0 && tau_max.is_finite()) {
        return Err(invalid(format!(
            "tau_max must be positive and finite, got {tau_max}"
        )));
    }
    let k_total = stages as i32;
    let levels = match distribution {
        LadderDistribution::Uniform => (1..=k_total)
            .map(|k| f64::from(k) / f64::from(k_total) * tau_max)
            .collect(),
        LadderDistribution::Logarithmic { c } => {
            if !(c > 1.0 && c.is_finite()) {
                return Err(invalid(format!("logarithmic ladder needs c > 1, got {c}")));
            }
            (1..=k_total)
                .map(|k| c.powi(2 * (k - k_total)) * tau_max)
                .collect()
        }
    };
    Ok(levels)
}
