//! Time-dependent Schrödinger propagation, interaction-frame transforms and
//! rotating-wave evolution.

mod exponential;
mod frame;
mod propagate;
mod rwa;
mod state;
mod trajectory;

#[cfg(test)]
mod tests;

pub use exponential::unitary_exponential;
pub use frame::{from_interaction_frame, to_interaction_frame};
pub use propagate::{
    propagate, propagate_block, PropagationOptions, PropagationResult, StepStats, DEFAULT_TOLERANCE,
    MAX_STEP_FRACTION,
};
pub use rwa::propagate_rwa;
pub use state::{QuantumState, NORM_TOLERANCE};
pub use trajectory::write_trajectory_csv;
