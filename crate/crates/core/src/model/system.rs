use nalgebra::DVector;

use super::basis::FockBasis;
use super::control::ControlOperator;
use super::integrable::{build_hamiltonian, IntegrableModel};
use super::transitions::{transition_table, Transition, DEFAULT_COUPLING_THRESHOLD};
use crate::error::{Error, Result};

/// An integrable model together with its global control and the derived
/// spectral data every downstream stage needs. Immutable once built.
#[derive(Debug, Clone)]
pub struct System {
    model: IntegrableModel,
    basis: FockBasis,
    energies: DVector<f64>,
    control: ControlOperator,
    lines: Vec<Transition>,
}

impl System {
    pub fn new(model: IntegrableModel, control: ControlOperator) -> Result<Self> {
        let basis = model.basis();
        if control.dim() != basis.dim() {
            return Err(Error::DimensionMismatch {
                expected: basis.dim(),
                found: control.dim(),
            });
        }
        let energies = build_hamiltonian(&model);
        let lines = transition_table(&energies, &control, DEFAULT_COUPLING_THRESHOLD);
        Ok(System {
            model,
            basis,
            energies,
            control,
            lines,
        })
    }

    pub fn model(&self) -> &IntegrableModel {
        &self.model
    }

    pub fn basis(&self) -> &FockBasis {
        &self.basis
    }

    pub fn energies(&self) -> &DVector<f64> {
        &self.energies
    }

    pub fn control(&self) -> &ControlOperator {
        &self.control
    }

    /// Control-coupled transitions sorted by frequency.
    pub fn lines(&self) -> &[Transition] {
        &self.lines
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    /// Two-body energy Σ_{j<k} κ_jk m_j m_k for every basis state.
    pub fn coupling_energies(&self) -> DVector<f64> {
        DVector::from_iterator(
            self.dim(),
            (0..self.dim()).map(|i| self.model.coupling_energy(&self.basis.occupations(i))),
        )
    }
}
