use nalgebra::DMatrix;
use num_complex::Complex64;

use super::exponential::{check_hermitian, unitary_exponential};
use super::state::QuantumState;
use crate::error::{Error, Result};

/// Evolves an interaction-frame state under a time-independent RWA generator:
/// χ(t₁) = exp(−i·H̃·(t₁ − t₀)) χ(t₀).
pub fn propagate_rwa(
    generator: &DMatrix<Complex64>,
    chi0: &QuantumState,
    t_span: (f64, f64),
) -> Result<QuantumState> {
    check_hermitian(generator)?;
    if generator.nrows() != chi0.dim() {
        return Err(Error::DimensionMismatch {
            expected: generator.nrows(),
            found: chi0.dim(),
        });
    }
    let (t0, t1) = t_span;
    if !(t0.is_finite() && t1.is_finite() && t1 >= t0) {
        return Err(Error::invalid("t_span", format!("[{t0}, {t1}] is not a valid interval")));
    }
    Ok(QuantumState {
        amplitudes: unitary_exponential(generator, t1 - t0) * &chi0.amplitudes,
        time: t1,
    })
}
