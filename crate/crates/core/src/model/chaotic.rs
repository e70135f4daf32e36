use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Gaussian orthogonal ensemble comparator for a chaotic spectrum.
///
/// `scale` is the semicircle radius, so the spectral width stays fixed as
/// the dimension grows: off-diagonal entries have σ = scale / (2√D).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChaoticModel {
    pub dim: usize,
    pub seed: u64,
    pub scale: f64,
}

impl ChaoticModel {
    pub fn new(dim: usize, seed: u64) -> Self {
        ChaoticModel {
            dim,
            seed,
            scale: 1.0,
        }
    }

    pub fn sigma(&self) -> f64 {
        self.scale / (2.0 * (self.dim as f64).sqrt())
    }

    pub fn build_goe(&self) -> Result<DMatrix<f64>> {
        if self.dim < 2 {
            return Err(Error::invalid("dim", "GOE needs at least two levels"));
        }
        if !(self.scale > 0.0 && self.scale.is_finite()) {
            return Err(Error::invalid("scale", "must be positive"));
        }
        Ok(sample_goe(self.dim, self.sigma(), &mut ChaCha8Rng::seed_from_u64(self.seed)))
    }

    /// Sorted eigenvalues of the sampled matrix.
    pub fn spectrum(&self) -> Result<DVector<f64>> {
        let h = self.build_goe()?;
        let mut e = h.symmetric_eigenvalues();
        e.as_mut_slice().sort_by(f64::total_cmp);
        Ok(e)
    }
}

/// Off-diagonal N(0, σ²), diagonal N(0, 2σ²), filled upper-triangle row-major.
pub fn sample_goe(dim: usize, sigma: f64, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    let off = Normal::new(0.0, sigma).expect("finite sigma");
    let diag = Normal::new(0.0, sigma * std::f64::consts::SQRT_2).expect("finite sigma");
    let mut h = DMatrix::zeros(dim, dim);
    for i in 0..dim {
        h[(i, i)] = diag.sample(rng);
        for k in i + 1..dim {
            let x = off.sample(rng);
            h[(i, k)] = x;
            h[(k, i)] = x;
        }
    }
    h
}
