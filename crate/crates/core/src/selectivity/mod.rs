//! Frequency selectivity and temporal delay characteristics of the window
//! families, with generators for the reference tables.

mod delay;
mod tables;

use std::f64::consts::{LN_10, PI};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::temporal::{LadderDistribution, ScaleLadder};

pub use delay::{delay_measures, m_log, m_log_limit, unit_delay_measures, DelayMeasures};
pub use tables::{
    format_table_csv, format_table_text, table1, table2, table3, Table, TableRow, TABLE1_DB_LEVELS,
    TABLE_C_VALUES,
};

/// Temporal window shape of a spectrogram channel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum WindowKind {
    Gauss,
    RecUniform { stages: usize },
    RecLog { stages: usize, c: f64 },
}

/// Window shape together with the number of periods `n` per window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindowFamily {
    pub kind: WindowKind,
    pub n: f64,
}

impl WindowFamily {
    pub fn new(kind: WindowKind, n: f64) -> Result<Self> {
        let fam = Self { kind, n };
        fam.validate()?;
        Ok(fam)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.n > 0.0) {
            return Err(invalid("periods per window must be positive"));
        }
        match self.kind {
            WindowKind::RecUniform { stages: 0 } | WindowKind::RecLog { stages: 0, .. } => {
                Err(invalid("cascade needs at least one stage"))
            }
            WindowKind::RecLog { c, .. } if !(c > 1.0) => {
                Err(invalid("ladder ratio c must exceed 1"))
            }
            _ => Ok(()),
        }
    }

    /// Time constants of the cascade in units of `sqrt(tau)`.
    fn unit_mus(&self) -> Option<Vec<f64>> {
        let ladder = match self.kind {
            WindowKind::Gauss => return None,
            WindowKind::RecUniform { stages } => {
                ScaleLadder::continuous(LadderDistribution::Uniform, 1.0, stages)
            }
            WindowKind::RecLog { stages, c } => {
                ScaleLadder::continuous(LadderDistribution::Logarithmic { c }, 1.0, stages)
            }
        };
        Some(ladder.expect("validated family").mus().to_vec())
    }

    /// Selectivity in dB as a function of `x = n (omega - omega0) / omega`.
    pub fn selectivity_db_at(&self, x: f64) -> f64 {
        match self.kind {
            WindowKind::Gauss => -40.0 * PI * PI * x * x / LN_10,
            WindowKind::RecUniform { stages } => {
                let k = stages as f64;
                -10.0 * k * (1.0 + 4.0 * PI * PI * x * x / k).log10()
            }
            WindowKind::RecLog { .. } => {
                let mus = self.unit_mus().expect("causal family");
                -10.0
                    * mus
                        .iter()
                        .map(|m| (1.0 + 4.0 * PI * PI * x * x * m * m).log10())
                        .sum::<f64>()
            }
        }
    }
}

/// Attenuation in dB of a channel tuned to `omega` for a pure tone at
/// `omega0`, with `omega_ratio = omega / omega0`.
pub fn selectivity_db(family: &WindowFamily, omega_ratio: f64) -> Result<f64> {
    if !(omega_ratio > 0.0) {
        return Err(invalid("frequency ratio must be positive"));
    }
    family.validate()?;
    let x = family.n * (1.0 - 1.0 / omega_ratio);
    Ok(family.selectivity_db_at(x))
}

/// Bandwidth constant `C` at which the selectivity reaches `target_db`.
pub fn bandwidth_constant(family: &WindowFamily, target_db: f64) -> Result<f64> {
    if !(target_db < 0.0) {
        return Err(invalid(format!(
            "target attenuation must be negative, got {target_db}"
        )));
    }
    family.validate()?;
    Ok(match family.kind {
        WindowKind::Gauss => LN_10.sqrt() / (2.0 * PI) * (-target_db / 10.0).sqrt(),
        WindowKind::RecUniform { stages } => {
            let k = stages as f64;
            k.sqrt() / (2.0 * PI) * (10f64.powf(-target_db / (10.0 * k)) - 1.0).sqrt()
        }
        WindowKind::RecLog { .. } => {
            let (mut lo, mut hi) = (1e-6, 10.0);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if family.selectivity_db_at(mid) > target_db {
                    lo = mid;
                } else {
                    hi = mid;
                }
                if hi - lo < 1e-14 {
                    break;
                }
            }
            0.5 * (lo + hi)
        }
    })
}

/// Relative width of a band with constant `C` and `n` periods per window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelativeBandwidth {
    /// `(omega_hi - omega_lo) / omega0`.
    pub linear: f64,
    pub semitones: f64,
}

pub fn relative_bandwidth(c: f64, n: f64) -> Result<RelativeBandwidth> {
    if !(n > 0.0) || !(c >= 0.0) {
        return Err(invalid("need C >= 0 and n > 0"));
    }
    let r = c / n;
    if r >= 1.0 {
        return Err(invalid(format!("C = {c} must be below n = {n}")));
    }
    Ok(RelativeBandwidth {
        linear: 2.0 * r / (1.0 - r * r),
        semitones: 12.0 * ((1.0 + r) / (1.0 - r)).log2(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fam(kind: WindowKind) -> WindowFamily {
        WindowFamily::new(kind, 8.0).unwrap()
    }

    fn ratio_for_x(x: f64, n: f64) -> f64 {
        1.0 / (1.0 - x / n)
    }

    #[test]
    fn peak_is_zero_db() {
        for kind in [
            WindowKind::Gauss,
            WindowKind::RecUniform { stages: 4 },
            WindowKind::RecLog {
                stages: 7,
                c: 2f64.sqrt(),
            },
        ] {
            assert_eq!(selectivity_db(&fam(kind), 1.0).unwrap(), 0.0);
        }
    }

    #[test]
    fn reference_attenuations() {
        // tabulated constants carry three decimals, worth about 0.04 dB at -10 dB
        let g = fam(WindowKind::Gauss);
        assert!((selectivity_db(&g, ratio_for_x(0.242, 8.0)).unwrap() + 10.0).abs() < 0.05);
        let exact = bandwidth_constant(&g, -10.0).unwrap();
        assert!((selectivity_db(&g, ratio_for_x(exact, 8.0)).unwrap() + 10.0).abs() < 1e-9);
        let u = fam(WindowKind::RecUniform { stages: 4 });
        assert!((selectivity_db(&u, ratio_for_x(0.684, 8.0)).unwrap() + 30.0).abs() < 0.05);
    }

    #[test]
    fn uniform_is_the_equal_constant_case_of_the_product_formula() {
        // evaluate the product over explicit time constants for the uniform ladder
        let k = 5;
        let x = 0.37;
        let mus = vec![(1.0 / k as f64).sqrt(); k];
        let product: f64 = -10.0
            * mus
                .iter()
                .map(|m: &f64| (1.0 + 4.0 * PI * PI * x * x * m * m).log10())
                .sum::<f64>();
        let closed = fam(WindowKind::RecUniform { stages: k }).selectivity_db_at(x);
        assert!((product - closed).abs() < 1e-12);
    }

    #[test]
    fn constants_round_trip() {
        for kind in [
            WindowKind::Gauss,
            WindowKind::RecUniform { stages: 7 },
            WindowKind::RecLog {
                stages: 4,
                c: 2f64.powf(0.75),
            },
        ] {
            let f = fam(kind);
            for target in [-3.0, -10.0, -20.0, -30.0] {
                let c = bandwidth_constant(&f, target).unwrap();
                assert!((f.selectivity_db_at(c) - target).abs() < 1e-3);
            }
        }
    }

    #[test]
    fn rejects_non_negative_targets() {
        assert!(bandwidth_constant(&fam(WindowKind::Gauss), 0.0).is_err());
        assert!(bandwidth_constant(&fam(WindowKind::Gauss), 3.0).is_err());
    }

    #[test]
    fn relative_bandwidth_forms() {
        let rb = relative_bandwidth(4.0, 8.0).unwrap();
        assert!((rb.linear - 4.0 / 3.0).abs() < 1e-12);
        assert_eq!(relative_bandwidth(0.0, 8.0).unwrap().semitones, 0.0);
        let small = relative_bandwidth(0.4, 8.0).unwrap();
        let approx = 24.0 / 2f64.ln() * 0.05;
        assert!((small.semitones - approx).abs() / approx < 0.02);
        assert!(relative_bandwidth(8.0, 8.0).is_err());
    }

    #[test]
    fn ordering_at_minus_ten_db() {
        for k in [4, 7] {
            let g = bandwidth_constant(&fam(WindowKind::Gauss), -10.0).unwrap();
            let u = bandwidth_constant(&fam(WindowKind::RecUniform { stages: k }), -10.0).unwrap();
            let l = bandwidth_constant(
                &fam(WindowKind::RecLog {
                    stages: k,
                    c: 2f64.sqrt(),
                }),
                -10.0,
            )
            .unwrap();
            assert!(g < u && u < l);
        }
    }
}
