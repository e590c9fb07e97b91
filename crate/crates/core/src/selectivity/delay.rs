use serde::Serialize;

use crate::error::{invalid, Result};
use crate::temporal::{
    CascadeResponse, LadderDistribution, LadderUnits, ScaleLadder, TemporalFamily,
};

/// Temporal delay characteristics of a time-causal kernel, in seconds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DelayMeasures {
    pub mean: f64,
    pub t_max: f64,
    pub t_infl1: f64,
    pub t_infl2: f64,
}

impl DelayMeasures {
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            mean: self.mean * factor,
            t_max: self.t_max * factor,
            t_infl1: self.t_infl1 * factor,
            t_infl2: self.t_infl2 * factor,
        }
    }
}

/// Mean, maximum and inflection points of the cascade kernel of `ladder`.
///
/// Uniform ladders use closed forms. Logarithmic ladders use the closed-form
/// mean and locate the extrema on the exactly propagated impulse response.
pub fn delay_measures(ladder: &ScaleLadder) -> Result<DelayMeasures> {
    if ladder.units() != LadderUnits::Continuous {
        return Err(invalid(
            "delay measures are defined for continuous-time ladders",
        ));
    }
    let k = ladder.stages() as f64;
    let root = ladder.tau_max().sqrt();
    match ladder.distribution() {
        LadderDistribution::Uniform => {
            let mu = ladder.mus()[0];
            let spread = if k > 1.0 { (k - 1.0).sqrt() } else { 0.0 };
            Ok(DelayMeasures {
                mean: k * mu,
                t_max: (k - 1.0) * mu,
                t_infl1: (k - 1.0 - spread).max(0.0) * mu,
                t_infl2: (k - 1.0 + spread) * mu,
            })
        }
        LadderDistribution::Logarithmic { c } => {
            let response = CascadeResponse::from_ladder(ladder)?;
            let dt = (root / 2000.0).min(ladder.min_mu() / 20.0);
            let t_max = response.argmax(dt);
            let (t_infl1, t_infl2) = response.inflections(dt);
            Ok(DelayMeasures {
                mean: m_log(ladder.stages(), c) * root,
                t_max,
                t_infl1,
                t_infl2,
            })
        }
    }
}

/// Delay measures of a causal family at unit scale (`tau = 1`); multiply by
/// `sqrt(tau)` for other scales. `None` for the Gaussian.
pub fn unit_delay_measures(family: &TemporalFamily) -> Result<Option<DelayMeasures>> {
    match family.continuous_ladder(1.0)? {
        Some(ladder) => delay_measures(&ladder).map(Some),
        None => Ok(None),
    }
}

/// Temporal mean of a logarithmic ladder in units of `sqrt(tau)`.
pub fn m_log(stages: usize, c: f64) -> f64 {
    let k = stages as i32;
    let r = (c * c - 1.0).sqrt();
    c.powi(-k) * (c * c - (r + 1.0) * c + r * c.powi(k)) / (c - 1.0)
}

/// Limit of [`m_log`] as the number of stages grows.
pub fn m_log_limit(c: f64) -> f64 {
    (c * c - 1.0).sqrt() / (c - 1.0)
}
