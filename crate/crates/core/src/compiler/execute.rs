use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::compile::CompiledCircuit;
use crate::dynamics::{propagate_block, unitary_exponential, QuantumState, StepStats, NORM_TOLERANCE};
use crate::error::{Error, Result};
use crate::pulses::{resonance_window, RwaGenerator, Segment};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExecutionMode {
    /// Integrates the driven lab-frame Schrödinger equation.
    Full,
    /// Composes the rotating-wave evolution of each segment.
    Rwa,
}

impl CompiledCircuit {
    /// Runs every column of `block` (basis-sized states at t = 0) through the
    /// circuit and returns them in the qubit frame, ledger applied.
    pub fn execute_block(
        &self,
        block: DMatrix<Complex64>,
        mode: ExecutionMode,
    ) -> Result<(DMatrix<Complex64>, Option<StepStats>)> {
        let dim = self.system.dim();
        if block.nrows() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: block.nrows(),
            });
        }
        let total = self.schedule.duration();
        let (mut out, stats) = match mode {
            ExecutionMode::Full => {
                let (mut lab, stats) = propagate_block(
                    self.system.energies(),
                    self.system.control(),
                    &self.schedule,
                    block,
                    (0.0, total),
                    self.tolerance,
                )?;
                for (i, e) in self.system.energies().iter().enumerate() {
                    let phase = Complex64::from_polar(1.0, e * total);
                    lab.row_mut(i).iter_mut().for_each(|x| *x *= phase);
                }
                (lab, Some(stats))
            }
            ExecutionMode::Rwa => (self.rwa_evolution()? * block, None),
        };
        for (i, p) in self.output_phases.iter().enumerate() {
            let phase = Complex64::from_polar(1.0, *p);
            out.row_mut(i).iter_mut().for_each(|x| *x *= phase);
        }
        Ok((out, stats))
    }

    /// Interaction-frame propagator of the schedule under the rotating-wave
    /// approximation. Tones within a segment are assumed to share one
    /// envelope shape, which holds for compiled schedules.
    pub fn rwa_evolution(&self) -> Result<DMatrix<Complex64>> {
        let dim = self.system.dim();
        let lines = self.system.lines();
        let mut u = DMatrix::<Complex64>::identity(dim, dim);
        for seg in self.schedule.segments() {
            let Segment::Tones { duration, tones } = seg else { continue };
            let mut generator = DMatrix::<Complex64>::zeros(dim, dim);
            for tone in tones.iter().filter(|t| t.amplitude > 0.0) {
                let window = resonance_window(lines, tone);
                let g = RwaGenerator::from_lines(dim, lines, tone, window)?;
                let mean = tone.envelope.area(*duration) / duration;
                generator += g.matrix * Complex64::from(mean);
            }
            u = unitary_exponential(&generator, *duration) * u;
        }
        Ok(u)
    }
}

/// Runs `psi0` (at t = 0) through the circuit; the result is expressed in
/// the qubit frame at the final time.
pub fn execute(circuit: &CompiledCircuit, psi0: &QuantumState, mode: ExecutionMode) -> Result<QuantumState> {
    let norm = psi0.norm();
    if (norm - 1.0).abs() > NORM_TOLERANCE {
        return Err(Error::NotNormalized { norm });
    }
    let block = DMatrix::from_column_slice(psi0.dim(), 1, psi0.amplitudes.as_slice());
    let (out, _) = circuit.execute_block(block, mode)?;
    Ok(QuantumState {
        amplitudes: out.column(0).into_owned(),
        time: circuit.duration(),
    })
}
