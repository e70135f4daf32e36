//! Gate compilation onto multi-tone schedules, execution, and fidelity
//! scoring in the qubit frame.

mod compile;
mod execute;
mod fidelity;
mod gates;


pub use compile::{compile, CompileOptions, CompiledCircuit, GateRecord};
pub use execute::{execute, ExecutionMode};
pub use fidelity::{process_fidelity, state_fidelity, FidelityReport, SCORING_FRAME};
pub use gates::{embed_one, embed_two, GateSpec};

/// Parses a JSON list of gate records.
pub fn circuit_from_json(text: &str) -> crate::Result<Vec<GateSpec>> {
    Ok(serde_json::from_str(text)?)
}
