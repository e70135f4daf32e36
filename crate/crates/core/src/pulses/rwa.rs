use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::schedule::Tone;
use crate::error::{Error, Result};
use crate::model::{transition_table, ControlOperator, Transition, DEFAULT_COUPLING_THRESHOLD};

/// Lines whose frequencies differ by less than this (relative) are the
/// same line, driven together by one tone.
pub const DEGENERACY_TOLERANCE: f64 = 1e-9;

/// Effective rotating-frame generator of one tone: only the transitions
/// inside the resonance window survive, each with entry
/// (γ₀/2)·a_{ul}·e^{−iφ} above the diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct RwaGenerator {
    pub matrix: DMatrix<Complex64>,
    pub window: f64,
    /// Retained (upper, lower) pairs.
    pub pairs: Vec<(usize, usize)>,
}

impl RwaGenerator {
    pub fn zero(dim: usize) -> Self {
        RwaGenerator {
            matrix: DMatrix::zeros(dim, dim),
            window: 0.0,
            pairs: Vec::new(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Builds the generator from a precomputed line list.
    pub fn from_lines(dim: usize, lines: &[Transition], tone: &Tone, window: f64) -> Result<Self> {
        if !(window > 0.0 && window.is_finite()) {
            return Err(Error::invalid("resonance window", format!("{window} must be positive")));
        }
        if tone.carrier <= window {
            return Err(Error::invalid(
                "tone.carrier",
                format!("carrier {} lies inside its own resonance window", tone.carrier),
            ));
        }
        let retained: Vec<&Transition> = lines
            .iter()
            .filter(|l| (l.frequency - tone.carrier).abs() <= window)
            .collect();
        let mut distinct: Vec<f64> = Vec::new();
        for l in &retained {
            if !distinct.iter().any(|&f| same_line(f, l.frequency)) {
                distinct.push(l.frequency);
            }
        }
        if distinct.len() > 1 {
            return Err(Error::Ambiguous {
                carrier: tone.carrier,
                window,
                lines: distinct,
            });
        }
        let mut matrix = DMatrix::zeros(dim, dim);
        let rotation = Complex64::from_polar(0.5 * tone.amplitude, -tone.phase);
        for l in &retained {
            let entry = rotation * l.coupling;
            matrix[(l.upper, l.lower)] += entry;
            matrix[(l.lower, l.upper)] += entry.conj();
        }
        if retained.is_empty() {
            log::warn!("no transition within {window:e} of carrier {}", tone.carrier);
        }
        Ok(RwaGenerator {
            matrix,
            window,
            pairs: retained.iter().map(|l| (l.upper, l.lower)).collect(),
        })
    }
}

pub(crate) fn same_line(a: f64, b: f64) -> bool {
    (a - b).abs() <= DEGENERACY_TOLERANCE * a.abs().max(b.abs()).max(1.0)
}

/// Rotating-wave generator of `tone` on the system (H, H_c).
pub fn rwa_generator(
    energies: &DVector<f64>,
    control: &ControlOperator,
    tone: &Tone,
    window: f64,
) -> Result<RwaGenerator> {
    let lines = transition_table(energies, control, DEFAULT_COUPLING_THRESHOLD);
    RwaGenerator::from_lines(energies.len(), &lines, tone, window)
}

/// Default resonance window: 10·γ₀, capped at a third of the distance from
/// the line nearest the carrier to the next distinct line.
pub fn resonance_window(lines: &[Transition], tone: &Tone) -> f64 {
    let nearest = lines
        .iter()
        .map(|l| l.frequency)
        .min_by(|a, b| (a - tone.carrier).abs().total_cmp(&(b - tone.carrier).abs()));
    let spacing = nearest
        .map(|f| {
            lines
                .iter()
                .filter(|l| !same_line(l.frequency, f))
                .map(|l| (l.frequency - f).abs())
                .fold(f64::INFINITY, f64::min)
        })
        .unwrap_or(f64::INFINITY);
    let cap = spacing / 3.0;
    let wanted = 10.0 * tone.amplitude;
    match (wanted > 0.0, cap.is_finite()) {
        (true, true) => wanted.min(cap),
        (true, false) => wanted,
        (false, true) => cap,
        (false, false) => 1e-6 * tone.carrier.max(1.0),
    }
}
