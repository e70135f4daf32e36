use nalgebra::DVector;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Accepted deviation of ‖ψ‖ from one.
pub const NORM_TOLERANCE: f64 = 1e-9;

/// Normalized amplitude vector at a given time.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState {
    pub amplitudes: DVector<Complex64>,
    pub time: f64,
}

impl QuantumState {
    pub fn new(amplitudes: DVector<Complex64>, time: f64) -> Result<Self> {
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::NotNormalized { norm });
        }
        Ok(QuantumState { amplitudes, time })
    }

    /// Rescales `amplitudes` to unit norm.
    pub fn normalized(amplitudes: DVector<Complex64>, time: f64) -> Result<Self> {
        let norm = amplitudes.norm();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::NotNormalized { norm });
        }
        Ok(QuantumState {
            amplitudes: amplitudes / Complex64::from(norm),
            time,
        })
    }

    pub fn basis(dim: usize, index: usize) -> Self {
        let mut a = DVector::zeros(dim);
        a[index] = Complex64::new(1.0, 0.0);
        QuantumState {
            amplitudes: a,
            time: 0.0,
        }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    /// ⟨self|other⟩.
    pub fn inner(&self, other: &QuantumState) -> Complex64 {
        self.amplitudes.dotc(&other.amplitudes)
    }

    /// ⟨ψ|H|ψ⟩ for a diagonal H.
    pub fn diagonal_expectation(&self, energies: &DVector<f64>) -> f64 {
        self.amplitudes
            .iter()
            .zip(energies.iter())
            .map(|(a, e)| a.norm_sqr() * e)
            .sum()
    }

    /// min over global phase of ‖self − e^{iα} other‖.
    pub fn distance_up_to_phase(&self, other: &QuantumState) -> f64 {
        let overlap = other.inner(self).norm();
        (2.0 - 2.0 * overlap).max(0.0).sqrt()
    }
}
