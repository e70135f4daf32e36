use nalgebra::DVector;
use num_complex::Complex64;
use serde::Serialize;

use super::control::ControlOperator;

/// Couplings at or below this magnitude do not produce a line.
pub const DEFAULT_COUPLING_THRESHOLD: f64 = 1e-12;

/// A control-coupled transition between two energy eigenstates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Transition {
    /// Higher-energy state (larger index on exact degeneracy).
    pub upper: usize,
    pub lower: usize,
    /// E_upper − E_lower, never negative.
    pub frequency: f64,
    /// Control matrix element ⟨upper|H_c|lower⟩.
    #[serde(skip)]
    pub coupling: Complex64,
}

impl Transition {
    pub fn strength(&self) -> f64 {
        self.coupling.norm()
    }

    pub fn involves(&self, a: usize, b: usize) -> bool {
        (self.upper == a && self.lower == b) || (self.upper == b && self.lower == a)
    }
}

/// Every unordered pair with |a_{ii′}| above `threshold`, sorted by
/// frequency (ties broken by state indices).
pub fn transition_table(
    energies: &DVector<f64>,
    control: &ControlOperator,
    threshold: f64,
) -> Vec<Transition> {
    let dim = energies.len();
    let mut lines = Vec::new();
    for i in 0..dim {
        for k in i + 1..dim {
            let a = control.element(i, k);
            if a.norm() <= threshold {
                continue;
            }
            let (upper, lower) = if energies[i] > energies[k] { (i, k) } else { (k, i) };
            lines.push(Transition {
                upper,
                lower,
                frequency: energies[upper] - energies[lower],
                coupling: control.element(upper, lower),
            });
        }
    }
    lines.sort_by(|a, b| {
        a.frequency
            .total_cmp(&b.frequency)
            .then(a.lower.cmp(&b.lower))
            .then(a.upper.cmp(&b.upper))
    });
    lines
}
