//! Frequency-selective global control of quantized integrable systems.
//!
//! The crate builds the diagonal action-angle Hamiltonian of an integrable
//! system on a truncated Fock space, drives it with a single global control
//! field, compiles qubit gates into multi-tone pulse schedules, and contrasts
//! the integrable line structure with random-matrix (chaotic) spectra.

pub mod compiler;
pub mod dynamics;
mod error;
pub mod model;
pub mod pulses;
pub mod spectra;

pub use error::{Error, Result};
pub use num_complex::Complex64;
