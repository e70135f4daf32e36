use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::integrable::IntegrableModel;
use crate::error::{Error, Result};

const GOLDEN_FRACTION: f64 = 0.618_033_988_749_894_9;

/// Seeded generator of generic integrable models.
///
/// Frequencies follow a golden-ratio sequence with a random offset, scaled
/// into [1, 2): ω_j = 1 + frac(u₀ + jφ). Every κ_jk (diagonal included) has
/// magnitude uniform in `kappa_range` and a random sign.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrequencyGenerator {
    pub kappa_range: (f64, f64),
}

impl Default for FrequencyGenerator {
    fn default() -> Self {
        FrequencyGenerator {
            kappa_range: (0.01, 0.1),
        }
    }
}

impl FrequencyGenerator {
    pub fn generate(&self, n: usize, d: usize, seed: u64) -> Result<IntegrableModel> {
        let (lo, hi) = self.kappa_range;
        if !(lo >= 0.0 && hi >= lo && hi.is_finite()) {
            return Err(Error::invalid("kappa_range", format!("invalid range ({lo}, {hi})")));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let offset: f64 = rng.random();
        let omega: Vec<f64> = (0..n)
            .map(|j| 1.0 + (offset + j as f64 * GOLDEN_FRACTION).fract())
            .collect();
        let mut kappa = vec![vec![0.0; n]; n];
        for j in 0..n {
            for k in j..n {
                let magnitude = if hi > lo { rng.random_range(lo..hi) } else { lo };
                let value = if rng.random_bool(0.5) { magnitude } else { -magnitude };
                kappa[j][k] = value;
                kappa[k][j] = value;
            }
        }
        IntegrableModel::new(omega, kappa, d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frequencies_in_unit_band_and_reproducible() {
        let g = FrequencyGenerator::default();
        let a = g.generate(8, 2, 42).unwrap();
        assert!(a.omega().iter().all(|w| (1.0..2.0).contains(w)));
        assert_eq!(a, g.generate(8, 2, 42).unwrap());
        assert_ne!(a, g.generate(8, 2, 43).unwrap());
        for j in 0..8 {
            for k in 0..8 {
                let x = a.kappa(j, k).abs();
                assert!((0.01..0.1).contains(&x));
            }
        }
    }

    #[test]
    fn consecutive_frequencies_follow_golden_step() {
        let a = FrequencyGenerator::default().generate(5, 2, 1).unwrap();
        let w = a.omega();
        for j in 1..5 {
            let step = (w[j] - w[j - 1]).rem_euclid(1.0);
            assert!((step - GOLDEN_FRACTION).abs() < 1e-12);
        }
    }
}
