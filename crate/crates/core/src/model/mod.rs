//! Truncated-space Hamiltonians: the diagonal action-angle model, the
//! global control operator, and the random-matrix chaotic comparator.

mod basis;
mod chaotic;
mod config;
mod control;
mod generator;
mod integrable;
mod system;
mod transitions;

pub use basis::FockBasis;
pub use chaotic::{sample_goe, ChaoticModel};
pub use config::ModelConfig;
pub use control::{ControlOperator, ControlSpec, HERMITICITY_TOLERANCE};
pub use generator::FrequencyGenerator;
pub use integrable::{build_hamiltonian, IntegrableModel, DEFAULT_MAX_DIM, DEFAULT_RESOLUTION};
pub use system::System;
pub use transitions::{transition_table, Transition, DEFAULT_COUPLING_THRESHOLD};
