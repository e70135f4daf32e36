use nalgebra::DVector;
use num_complex::Complex64;

use super::state::QuantumState;

/// χ = e^{iHt} ψ for diagonal H.
pub fn to_interaction_frame(psi: &QuantumState, energies: &DVector<f64>, t: f64) -> QuantumState {
    rotate(psi, energies, t)
}

/// ψ = e^{−iHt} χ, the inverse of [`to_interaction_frame`].
pub fn from_interaction_frame(chi: &QuantumState, energies: &DVector<f64>, t: f64) -> QuantumState {
    rotate(chi, energies, -t)
}

fn rotate(state: &QuantumState, energies: &DVector<f64>, t: f64) -> QuantumState {
    let amplitudes = state.amplitudes.zip_map(energies, |a, e| a * Complex64::from_polar(1.0, e * t));
    QuantumState {
        amplitudes,
        time: state.time,
    }
}
