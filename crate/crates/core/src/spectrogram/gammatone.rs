use std::f64::consts::PI;

use crate::error::{invalid, Result};
use crate::temporal::{cascade_kernel_numeric, composed_uniform_kernel_sample, ScaleLadder};

fn factorial(n: usize) -> f64 {
    (1..=n).map(|i| i as f64).product()
}

/// Gammatone `a t^{K-1} e^{-2 pi b t}` times a carrier at `omega` with zero phase,
/// returned as the (cos, sin) pair.
pub fn gammatone(a: f64, b: f64, stages: usize, omega: f64, t: f64) -> (f64, f64) {
    if t < 0.0 {
        return (0.0, 0.0);
    }
    let envelope = a * t.powi(stages as i32 - 1) * (-2.0 * PI * b * t).exp();
    (envelope * (omega * t).cos(), envelope * (omega * t).sin())
}

/// Gammatone parameters `(a, b)` equivalent to a cascade of `stages` equal
/// time constants `mu`: `a = 1 / (mu^K Gamma(K))`, `b = 1 / (2 pi mu)`.
pub fn gammatone_parameters(mu: f64, stages: usize) -> (f64, f64) {
    (
        1.0 / (mu.powi(stages as i32) * factorial(stages - 1)),
        1.0 / (2.0 * PI * mu),
    )
}

/// Largest pointwise difference between the equal-time-constant window times
/// cos/sin carriers and the Gammatone with identified parameters.
pub fn gammatone_equivalence_check(mu: f64, stages: usize, omega: f64) -> Result<f64> {
    if !(mu > 0.0) || stages == 0 {
        return Err(invalid("need mu > 0 and at least one stage"));
    }
    let (a, b) = gammatone_parameters(mu, stages);
    let span = (stages as f64 + 10.0 * (stages as f64).sqrt()) * mu;
    let samples = 4000;
    let mut worst: f64 = 0.0;
    for i in 0..=samples {
        let t = span * i as f64 / samples as f64;
        let h = composed_uniform_kernel_sample(mu, stages, t);
        let (gc, gs) = gammatone(a, b, stages, omega, t);
        worst = worst
            .max((h * (omega * t).cos() - gc).abs())
            .max((h * (omega * t).sin() - gs).abs());
    }
    Ok(worst)
}

/// Largest difference between the window of a logarithmic ladder and the
/// Gammatone envelope of equal variance, relative to the Gammatone peak.
pub fn generalized_gammatone_deviation(ladder: &ScaleLadder) -> Result<f64> {
    let stages = ladder.stages();
    let mu = (ladder.tau_max() / stages as f64).sqrt();
    let dt = ladder.min_mu() / 20.0;
    let horizon = ladder.mean() + 10.0 * ladder.tau_max().sqrt();
    let kernel = cascade_kernel_numeric(ladder, dt, horizon)?;
    let peak = composed_uniform_kernel_sample(mu, stages, (stages as f64 - 1.0) * mu);
    let worst = kernel
        .values
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, w)| (w / dt - composed_uniform_kernel_sample(mu, stages, i as f64 * dt)).abs())
        .fold(0.0, f64::max);
    Ok(worst / peak)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::temporal::LadderDistribution;

    #[test]
    fn identity_holds() {
        assert!(gammatone_equivalence_check(0.01, 4, 2.0 * PI * 440.0).unwrap() < 1e-12);
        assert!(gammatone_equivalence_check(0.3, 1, 17.0).unwrap() < 1e-12);
    }

    #[test]
    fn generalized_window_is_not_a_gammatone() {
        let ladder =
            ScaleLadder::continuous(LadderDistribution::Logarithmic { c: 2f64.sqrt() }, 1.0, 4)
                .unwrap();
        assert!(generalized_gammatone_deviation(&ladder).unwrap() > 1e-3);
    }

    #[test]
    fn uniform_ladder_reproduces_the_gammatone_envelope() {
        let ladder = ScaleLadder::continuous(LadderDistribution::Uniform, 1.0, 4).unwrap();
        assert!(generalized_gammatone_deviation(&ladder).unwrap() < 1e-4);
    }
}
