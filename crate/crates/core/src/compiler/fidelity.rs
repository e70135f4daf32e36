use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use super::compile::CompiledCircuit;
use super::execute::ExecutionMode;
use crate::dynamics::{QuantumState, StepStats, NORM_TOLERANCE};
use crate::error::{Error, Result};

/// Frame in which results are scored.
pub const SCORING_FRAME: &str = "qubit frame: local dynamical phases removed, coupling and virtual-Z ledger applied";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FidelityReport {
    pub mode: ExecutionMode,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub state_fidelity: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub process_fidelity: Option<f64>,
    /// Population lost from the qubit subspace; only reported for d > 2.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub leakage: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_norm_drift: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub steps: Option<usize>,
    pub simulated_duration: f64,
    pub wall_clock_seconds: f64,
    pub frame: &'static str,
}

fn check_normalized(v: &DVector<Complex64>) -> Result<()> {
    let norm = v.norm();
    if (norm - 1.0).abs() > NORM_TOLERANCE {
        return Err(Error::NotNormalized { norm });
    }
    Ok(())
}

/// |⟨target|result⟩|².
pub fn state_fidelity(result: &QuantumState, target: &QuantumState) -> Result<f64> {
    if result.dim() != target.dim() {
        return Err(Error::DimensionMismatch {
            expected: target.dim(),
            found: result.dim(),
        });
    }
    check_normalized(&result.amplitudes)?;
    check_normalized(&target.amplitudes)?;
    Ok(target.inner(result).norm_sqr().min(1.0))
}

/// |Tr(U_target† U)|² / dim², insensitive to global phase.
pub fn process_fidelity(actual: &DMatrix<Complex64>, target: &DMatrix<Complex64>) -> Result<f64> {
    if actual.shape() != target.shape() || !target.is_square() {
        return Err(Error::DimensionMismatch {
            expected: target.nrows(),
            found: actual.nrows(),
        });
    }
    let dim = target.nrows() as f64;
    let overlap: Complex64 = target.iter().zip(actual.iter()).map(|(t, a)| t.conj() * a).sum();
    Ok((overlap.norm_sqr() / (dim * dim)).min(1.0))
}

impl CompiledCircuit {
    /// Restriction to the computational subspace of the executed circuit,
    /// with its leakage 1 − ‖Ũ‖²/2ⁿ.
    pub fn effective_unitary(&self, mode: ExecutionMode) -> Result<(DMatrix<Complex64>, f64, Option<StepStats>)> {
        let comp = self.system.basis().computational_indices();
        let dim = self.system.dim();
        let mut inputs = DMatrix::zeros(dim, comp.len());
        for (b, &i) in comp.iter().enumerate() {
            inputs[(i, b)] = Complex64::new(1.0, 0.0);
        }
        let (out, stats) = self.execute_block(inputs, mode)?;
        let u = DMatrix::from_fn(comp.len(), comp.len(), |r, c| out[(comp[r], c)]);
        let leakage = (1.0 - u.norm_squared() / comp.len() as f64).max(0.0);
        Ok((u, leakage, stats))
    }

    pub fn process_report(&self, mode: ExecutionMode) -> Result<FidelityReport> {
        let clock = Instant::now();
        let (u, leakage, stats) = self.effective_unitary(mode)?;
        let fidelity = process_fidelity(&u, &self.target)?;
        Ok(self.report(mode, None, Some(fidelity), leakage, stats, clock))
    }

    /// Scores one input state against the ideal circuit applied to its
    /// computational part; other components are expected to stay put.
    pub fn state_report(&self, psi0: &QuantumState, mode: ExecutionMode) -> Result<FidelityReport> {
        let clock = Instant::now();
        let result = super::execute::execute(self, psi0, mode)?;
        let comp = self.system.basis().computational_indices();
        let mut expected = psi0.amplitudes.clone();
        let local = DVector::from_fn(comp.len(), |b, _| psi0.amplitudes[comp[b]]);
        let mapped = &self.target * local;
        for (b, &i) in comp.iter().enumerate() {
            expected[i] = mapped[b];
        }
        let target = QuantumState {
            amplitudes: expected,
            time: result.time,
        };
        let fidelity = state_fidelity(&result, &target)?;
        let inside: f64 = comp.iter().map(|&i| result.amplitudes[i].norm_sqr()).sum();
        let outside_before: f64 = 1.0 - comp.iter().map(|&i| psi0.amplitudes[i].norm_sqr()).sum::<f64>();
        let leakage = (1.0 - inside - outside_before).max(0.0);
        Ok(self.report(mode, Some(fidelity), None, leakage, None, clock))
    }

    fn report(
        &self,
        mode: ExecutionMode,
        state: Option<f64>,
        process: Option<f64>,
        leakage: f64,
        stats: Option<StepStats>,
        clock: Instant,
    ) -> FidelityReport {
        FidelityReport {
            mode,
            state_fidelity: state,
            process_fidelity: process,
            leakage: (self.system.basis().levels() > 2).then_some(leakage),
            max_norm_drift: stats.map(|s| s.max_norm_drift),
            steps: stats.map(|s| s.accepted),
            simulated_duration: self.duration(),
            wall_clock_seconds: clock.elapsed().as_secs_f64(),
            frame: SCORING_FRAME,
        }
    }
}
