//! Impulse response of a continuous cascade of truncated exponential filters
//! with arbitrary (possibly unequal) time constants.
//!
//! The cascade `mu_k y_k' = y_{k-1} - y_k` is a linear system `y' = A y` once
//! the impulse has entered the first stage, so it is advanced with the exact
//! propagator `exp(A dt)`. No Euler error enters the sampled response, and
//! time derivatives of the response are linear functions of the state.

use super::kernel::SampledKernel;
use super::ladder::{LadderUnits, ScaleLadder};
use crate::error::{invalid, Result};

/// Required probability mass inside the sampled support.
pub const CASCADE_MASS_COVERAGE: f64 = 1.0 - 1e-8;

/// State-space model of the composed kernel.
#[derive(Debug, Clone)]
pub struct CascadeResponse {
    mus: Vec<f64>,
    /// `A` as a dense row-major K x K matrix.
    generator: Vec<f64>,
}

impl CascadeResponse {
    pub fn new(mus: &[f64]) -> Result<Self> {
        if mus.is_empty() || mus.iter().any(|&m| !(m > 0.0 && m.is_finite())) {
            return Err(invalid(
                "cascade time constants must be positive and finite",
            ));
        }
        let k = mus.len();
        let mut generator = vec![0.0; k * k];
        for (i, &mu) in mus.iter().enumerate() {
            generator[i * k + i] = -1.0 / mu;
            if i > 0 {
                generator[i * k + i - 1] = 1.0 / mu;
            }
        }
        Ok(Self {
            mus: mus.to_vec(),
            generator,
        })
    }

    pub fn from_ladder(ladder: &ScaleLadder) -> Result<Self> {
        if ladder.units() != LadderUnits::Continuous {
            return Err(invalid(
                "cascade impulse responses need a continuous-time ladder",
            ));
        }
        Self::new(ladder.mus())
    }

    pub fn stages(&self) -> usize {
        self.mus.len()
    }

    /// State immediately after the impulse: all mass in the first integrator.
    pub fn initial_state(&self) -> Vec<f64> {
        let mut y = vec![0.0; self.stages()];
        y[0] = 1.0 / self.mus[0];
        y
    }

    /// Exact propagator `exp(A dt)`.
    pub fn propagator(&self, dt: f64) -> Vec<f64> {
        expm(&self.generator, self.stages(), dt)
    }

    /// Applies a propagator to a state.
    pub fn step(&self, propagator: &[f64], state: &[f64]) -> Vec<f64> {
        mat_vec(propagator, state, self.stages())
    }

    /// `order`-th time derivative of the kernel value for a given state.
    pub fn derivative(&self, state: &[f64], order: usize) -> f64 {
        let k = self.stages();
        let mut v = state.to_vec();
        for _ in 0..order {
            v = mat_vec(&self.generator, &v, k);
        }
        v[k - 1]
    }

    /// Mass of the kernel beyond the time at which `state` is observed.
    pub fn tail_mass(&self, state: &[f64]) -> f64 {
        self.mus.iter().zip(state).map(|(m, y)| m * y).sum()
    }

    /// Kernel value at time `t`.
    pub fn value_at(&self, t: f64) -> f64 {
        if t < 0.0 {
            return 0.0;
        }
        let y = self.step(&self.propagator(t), &self.initial_state());
        y[self.stages() - 1]
    }

    /// Samples the kernel on `t = n dt` until both `horizon` is reached and the
    /// remaining tail mass is below `1 - CASCADE_MASS_COVERAGE`; returns
    /// trapezoid weights renormalized to unit mass.
    pub fn sample(&self, dt: f64, horizon: f64) -> SampledKernel {
        let prop = self.propagator(dt);
        let mut y = self.initial_state();
        let k = self.stages();
        let mut values = vec![0.5 * y[k - 1] * dt];
        let mut t = 0.0;
        loop {
            y = self.step(&prop, &y);
            t += dt;
            values.push(y[k - 1] * dt);
            if t >= horizon && self.tail_mass(&y) <= 1.0 - CASCADE_MASS_COVERAGE {
                break;
            }
        }
        let mass: f64 = values.iter().sum();
        values.iter_mut().for_each(|v| *v /= mass);
        SampledKernel {
            values,
            origin_index: 0,
            dt,
        }
    }

    /// Finds the first time after which the derivative of order `order`
    /// changes sign from `from_positive` on a grid of step `dt`, refining the
    /// crossing by bisection with exact propagation. Returns `None` if no
    /// crossing is found before `limit`.
    pub fn first_sign_change(
        &self,
        order: usize,
        start: f64,
        from_positive: bool,
        dt: f64,
        limit: f64,
    ) -> Option<f64> {
        let prop = self.propagator(dt);
        let mut y = self.step(&self.propagator(start), &self.initial_state());
        let mut t = start;
        let crossed = |v: f64| if from_positive { v <= 0.0 } else { v >= 0.0 };
        while t < limit {
            let next = self.step(&prop, &y);
            if crossed(self.derivative(&next, order)) {
                // bisection inside [t, t + dt]
                let (mut lo, mut hi) = (0.0, dt);
                for _ in 0..80 {
                    let mid = 0.5 * (lo + hi);
                    let probe = self.step(&self.propagator(mid), &y);
                    if crossed(self.derivative(&probe, order)) {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
                return Some(t + 0.5 * (lo + hi));
            }
            y = next;
            t += dt;
        }
        None
    }

    /// Position of the kernel maximum (0 for a single stage).
    pub fn argmax(&self, dt: f64) -> f64 {
        if self.stages() == 1 {
            return 0.0;
        }
        let limit = 50.0 * self.mus.iter().sum::<f64>();
        self.first_sign_change(1, 0.0, true, dt, limit)
            .unwrap_or(0.0)
    }

    /// First and second inflection points. The first is 0 when the kernel is
    /// concave from the start (two or fewer stages); with three or more stages
    /// the kernel starts as `t^(K-1)` and is convex near the origin.
    pub fn inflections(&self, dt: f64) -> (f64, f64) {
        let limit = 50.0 * self.mus.iter().sum::<f64>();
        if self.stages() == 1 {
            return (0.0, 0.0);
        }
        let first = if self.stages() >= 3 {
            self.first_sign_change(2, 0.0, true, dt, limit)
                .unwrap_or(0.0)
        } else {
            0.0
        };
        let t_max = self.argmax(dt);
        let second = self
            .first_sign_change(2, t_max, false, dt, limit)
            .unwrap_or(t_max);
        (first, second)
    }
}

/// Impulse response of the continuous cascade defined by `ladder`.
///
/// `dt` must not exceed `mu_min / 20` and `horizon` must be at least
/// `sum mu_k + 10 sqrt(tau_max)`.
pub fn cascade_kernel_numeric(
    ladder: &ScaleLadder,
    dt: f64,
    horizon: f64,
) -> Result<SampledKernel> {
    let response = CascadeResponse::from_ladder(ladder)?;
    if !(dt > 0.0) || dt > ladder.min_mu() / 20.0 * (1.0 + 1e-12) {
        return Err(invalid(format!(
            "dt = {dt} must be positive and at most mu_min / 20 = {}",
            ladder.min_mu() / 20.0
        )));
    }
    let needed = ladder.mean() + 10.0 * ladder.tau_max().sqrt();
    if horizon < needed {
        return Err(invalid(format!(
            "horizon {horizon} shorter than required support {needed}"
        )));
    }
    Ok(response.sample(dt, horizon))
}

fn mat_vec(m: &[f64], v: &[f64], k: usize) -> Vec<f64> {
    (0..k)
        .map(|i| (0..k).map(|j| m[i * k + j] * v[j]).sum())
        .collect()
}

fn mat_mul(a: &[f64], b: &[f64], k: usize) -> Vec<f64> {
    let mut out = vec![0.0; k * k];
    for i in 0..k {
        for l in 0..k {
            let a_il = a[i * k + l];
            if a_il == 0.0 {
                continue;
            }
            for j in 0..k {
                out[i * k + j] += a_il * b[l * k + j];
            }
        }
    }
    out
}

/// `exp(a t)` by scaling and squaring with a Taylor series.
fn expm(a: &[f64], k: usize, t: f64) -> Vec<f64> {
    let norm = (0..k)
        .map(|i| (0..k).map(|j| (a[i * k + j] * t).abs()).sum::<f64>())
        .fold(0.0, f64::max);
    let mut squarings = 0;
    let mut scale = t;
    while norm * (scale / t).abs() > 0.25 && squarings < 60 {
        scale *= 0.5;
        squarings += 1;
    }
    let scaled: Vec<f64> = a.iter().map(|x| x * scale).collect();
    let mut result = vec![0.0; k * k];
    let mut term = vec![0.0; k * k];
    for i in 0..k {
        result[i * k + i] = 1.0;
        term[i * k + i] = 1.0;
    }
    for n in 1..=24 {
        term = mat_mul(&term, &scaled, k);
        term.iter_mut().for_each(|x| *x /= n as f64);
        result.iter_mut().zip(&term).for_each(|(r, x)| *r += x);
    }
    for _ in 0..squarings {
        result = mat_mul(&result, &result, k);
    }
    result
}
