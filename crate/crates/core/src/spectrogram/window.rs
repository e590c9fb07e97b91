use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Soft upper bound `tau' = tau / (1 + (tau / tau_inf)^p)^(1/p)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UpperBound {
    pub tau_inf: f64,
    pub p: f64,
}

/// Window scale proportional to the wavelength with a soft lower threshold
/// and an optional soft upper bound: `tau = tau0 + (2 pi n / omega)^2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindowScaleLaw {
    /// Window extent in periods of the channel frequency.
    pub n: f64,
    /// Lower threshold on the variance, s².
    pub tau0: f64,
    pub upper: Option<UpperBound>,
}

impl WindowScaleLaw {
    pub fn new(n: f64, tau0: f64, upper: Option<UpperBound>) -> Result<Self> {
        let law = Self { n, tau0, upper };
        law.validate()?;
        Ok(law)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.n > 0.0) {
            return Err(invalid(format!(
                "periods per window must be positive, got {}",
                self.n
            )));
        }
        if !(self.tau0 >= 0.0) {
            return Err(invalid(format!("tau0 must be >= 0, got {}", self.tau0)));
        }
        if let Some(ub) = self.upper {
            if !(ub.tau_inf > self.tau0) || !(ub.p >= 1.0) {
                return Err(invalid("upper bound needs tau_inf > tau0 and p >= 1"));
            }
        }
        Ok(())
    }

    pub fn window_scale(&self, omega: f64) -> f64 {
        let w = 2.0 * PI * self.n / omega;
        let tau = self.tau0 + w * w;
        match self.upper {
            Some(UpperBound { tau_inf, p }) => tau / (1.0 + (tau / tau_inf).powf(p)).powf(1.0 / p),
            None => tau,
        }
    }

    /// Angular frequency above which `tau < beta^2 tau0`, i.e. where the lower
    /// threshold starts to break frequency covariance noticeably.
    pub fn crossover_omega(&self, beta: f64) -> f64 {
        2.0 * PI * self.n / ((beta * beta - 1.0).sqrt() * self.tau0.sqrt())
    }
}

/// Window scale (s²) for a channel at angular frequency `omega`.
pub fn window_scale(omega: f64, law: &WindowScaleLaw) -> f64 {
    law.window_scale(omega)
}

/// How the window scale is chosen per channel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum WindowScale {
    Proportional(WindowScaleLaw),
    /// The same variance (s²) in every channel.
    Fixed {
        tau: f64,
    },
}

impl WindowScale {
    pub fn tau(&self, omega: f64) -> f64 {
        match self {
            WindowScale::Proportional(law) => law.window_scale(omega),
            WindowScale::Fixed { tau } => *tau,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            WindowScale::Proportional(law) => law.validate(),
            WindowScale::Fixed { tau } if *tau > 0.0 => Ok(()),
            WindowScale::Fixed { tau } => {
                Err(invalid(format!("fixed window needs tau > 0, got {tau}")))
            }
        }
    }
}
