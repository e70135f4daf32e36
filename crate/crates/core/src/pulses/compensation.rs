use std::collections::HashSet;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::envelope::Envelope;
use super::rwa::same_line;
use super::schedule::Tone;
use crate::error::{Error, Result};
use crate::model::{System, DEFAULT_COUPLING_THRESHOLD};

/// A logical transition, resolved into one line per spectator configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TransitionTarget {
    /// 0↔1 of one variable.
    Qubit(usize),
    /// |1_j 0_k⟩ ↔ |0_j 1_k⟩.
    Exchange(usize, usize),
}

/// All (upper, lower) pairs of a target sharing one frequency.
#[derive(Debug, Clone, PartialEq)]
pub struct BandLine {
    pub frequency: f64,
    pub pairs: Vec<(usize, usize)>,
    /// Common control element ⟨upper|H_c|lower⟩ of the pairs.
    pub coupling: Complex64,
}

/// Spectator-split lines of one target transition, restricted to
/// computational spectator configurations.
#[derive(Debug, Clone, PartialEq)]
pub struct Band {
    pub target: TransitionTarget,
    pub lines: Vec<BandLine>,
}

impl Band {
    pub fn low(&self) -> f64 {
        self.lines.iter().map(|l| l.frequency).fold(f64::INFINITY, f64::min)
    }

    pub fn high(&self) -> f64 {
        self.lines.iter().map(|l| l.frequency).fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn width(&self) -> f64 {
        self.high() - self.low()
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.lines.iter().flat_map(|l| l.pairs.iter().copied())
    }
}

fn check_target(system: &System, target: TransitionTarget) -> Result<()> {
    let n = system.basis().variables();
    match target {
        TransitionTarget::Qubit(j) if j < n => Ok(()),
        TransitionTarget::Exchange(j, k) if j < n && k < n && j != k => Ok(()),
        _ => Err(Error::invalid("target", format!("{target:?} is not valid for {n} variables"))),
    }
}

/// Resolves `target` into its band without checking clearance.
pub fn band_lines(system: &System, target: TransitionTarget) -> Result<Band> {
    check_target(system, target)?;
    let basis = system.basis();
    let energies = system.energies();
    let mut pairs = Vec::new();
    for &lower in &basis.computational_indices() {
        let partner = match target {
            TransitionTarget::Qubit(j) if basis.level(lower, j) == 0 => basis.shifted(lower, j, 1),
            TransitionTarget::Exchange(j, k)
                if basis.level(lower, j) == 0 && basis.level(lower, k) == 1 =>
            {
                basis.shifted(lower, j, 1).and_then(|x| basis.shifted(x, k, -1))
            }
            _ => None,
        };
        if let Some(p) = partner {
            let (u, l) = if energies[p] >= energies[lower] { (p, lower) } else { (lower, p) };
            let a = system.control().element(u, l);
            if a.norm() <= DEFAULT_COUPLING_THRESHOLD {
                return Err(Error::UnsupportedGate {
                    gate: format!("{target:?}"),
                    reason: format!("control does not couple states {l} and {u}"),
                });
            }
            pairs.push((energies[u] - energies[l], u, l, a));
        }
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut lines: Vec<BandLine> = Vec::new();
    for (f, u, l, a) in pairs {
        match lines.last_mut() {
            Some(line) if same_line(line.frequency, f) => {
                if (line.coupling - a).norm() > 1e-12 * a.norm().max(1.0) {
                    return Err(Error::UnsupportedGate {
                        gate: format!("{target:?}"),
                        reason: format!(
                            "degenerate spectator lines at {f} need different couplings"
                        ),
                    });
                }
                line.pairs.push((u, l));
            }
            _ => lines.push(BandLine {
                frequency: f,
                pairs: vec![(u, l)],
                coupling: a,
            }),
        }
    }
    Ok(Band { target, lines })
}

/// Resolves `target` into its band and verifies that every other line
/// touching the computational subspace stays at least three band widths
/// away.
pub fn target_band(system: &System, target: TransitionTarget) -> Result<Band> {
    let band = band_lines(system, target)?;
    let members: HashSet<(usize, usize)> = band.pairs().collect();
    let basis = system.basis();
    let (lo, hi) = (band.low(), band.high());
    let clearance = 3.0 * band.width();
    for line in system.lines() {
        if members.contains(&(line.upper, line.lower)) {
            continue;
        }
        if !basis.is_computational(line.upper) && !basis.is_computational(line.lower) {
            continue;
        }
        let distance = if line.frequency < lo {
            lo - line.frequency
        } else if line.frequency > hi {
            line.frequency - hi
        } else {
            0.0
        };
        if distance < clearance || same_line(line.frequency, line.frequency + distance) {
            return Err(Error::BandCollision {
                band_low: lo,
                band_high: hi,
                line: line.frequency,
                clearance,
            });
        }
    }
    Ok(band)
}

/// One tone per spectator-conditioned line of `target`, with amplitude
/// γ_eff/|a| so that every conditional Rabi frequency equals `gamma_eff`,
/// and phase `phase + arg(a)` so every line rotates about the same axis.
pub fn compensated_tones(
    system: &System,
    target: TransitionTarget,
    gamma_eff: f64,
    phase: f64,
    envelope: Envelope,
) -> Result<Vec<Tone>> {
    if !(gamma_eff > 0.0 && gamma_eff.is_finite()) {
        return Err(Error::invalid("gamma_eff", format!("{gamma_eff} must be positive")));
    }
    let band = target_band(system, target)?;
    Ok(band
        .lines
        .iter()
        .map(|line| Tone {
            carrier: line.frequency,
            phase: phase + line.coupling.arg(),
            amplitude: gamma_eff / line.coupling.norm(),
            envelope,
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ControlOperator, ControlSpec, IntegrableModel};
    use crate::pulses::rwa::{resonance_window, RwaGenerator};

    fn system(omega: Vec<f64>, kappa: Vec<Vec<f64>>, spec: ControlSpec) -> System {
        let m = IntegrableModel::new(omega, kappa, 2).unwrap();
        let c = ControlOperator::structured(&m, &spec).unwrap();
        System::new(m, c).unwrap()
    }

    #[test]
    fn constant_coupling_needs_one_tone() {
        let s = system(vec![1.3], vec![vec![0.0]], ControlSpec::ladder(vec![0.5]));
        let tones = compensated_tones(&s, TransitionTarget::Qubit(0), 0.01, 0.0, Envelope::Flat).unwrap();
        assert_eq!(tones.len(), 1);
        assert!((tones[0].amplitude - 0.02).abs() < 1e-15);
        assert!((tones[0].carrier - 1.3).abs() < 1e-15);
    }

    #[test]
    fn spectator_splitting_gives_two_tones() {
        let s = system(
            vec![1.0, 1.618],
            vec![vec![0.0, 0.05], vec![0.05, 0.0]],
            ControlSpec::ladder(vec![1.0, 1.0]),
        );
        let tones = compensated_tones(&s, TransitionTarget::Qubit(0), 0.01, 0.0, Envelope::Flat).unwrap();
        let carriers: Vec<f64> = tones.iter().map(|t| t.carrier).collect();
        assert_eq!(carriers.len(), 2);
        assert!((carriers[0] - 1.0).abs() < 1e-12 && (carriers[1] - 1.05).abs() < 1e-12);
    }

    #[test]
    fn negative_coupling_shifts_phase_by_pi() {
        let s = system(vec![1.0], vec![vec![0.0]], ControlSpec::ladder(vec![-2.0]));
        let tones = compensated_tones(&s, TransitionTarget::Qubit(0), 0.01, 0.0, Envelope::Flat).unwrap();
        assert!((tones[0].phase.abs() - std::f64::consts::PI).abs() < 1e-15);
        assert!((tones[0].amplitude - 0.005).abs() < 1e-15);
    }

    #[test]
    fn conditional_rabi_frequencies_are_flat() {
        // unequal ladder weights; the RWA generator of each tone must carry
        // exactly γ_eff/2 on every spectator pair
        let s = system(
            vec![1.0, 1.6, 2.3],
            vec![
                vec![0.0, 0.04, 0.09],
                vec![0.04, 0.0, 0.05],
                vec![0.09, 0.05, 0.0],
            ],
            ControlSpec::ladder(vec![0.7, 1.3, 0.9]),
        );
        let gamma = 2e-3;
        for q in 0..3 {
            let tones =
                compensated_tones(&s, TransitionTarget::Qubit(q), gamma, 0.0, Envelope::Flat).unwrap();
            assert_eq!(tones.len(), 4);
            let mut rabi = Vec::new();
            for tone in &tones {
                let g = RwaGenerator::from_lines(8, s.lines(), tone, resonance_window(s.lines(), tone))
                    .unwrap();
                for &(u, l) in &g.pairs {
                    rabi.push(2.0 * g.matrix[(u, l)].norm());
                }
            }
            assert_eq!(rabi.len(), 4);
            let max = rabi.iter().cloned().fold(f64::MIN, f64::max);
            let min = rabi.iter().cloned().fold(f64::MAX, f64::min);
            assert!((max - gamma).abs() < 1e-10 && (min - gamma).abs() < 1e-10);
            assert!((max - min) / max <= 1e-9);
        }
    }

    #[test]
    fn overlapping_bands_are_rejected() {
        let s = system(
            vec![1.0, 1.1],
            vec![vec![0.0, 0.05], vec![0.05, 0.0]],
            ControlSpec::ladder(vec![1.0, 1.0]),
        );
        let err = compensated_tones(&s, TransitionTarget::Qubit(0), 0.001, 0.0, Envelope::Flat);
        assert!(matches!(err, Err(Error::BandCollision { .. })));
    }

    #[test]
    fn uncoupled_target_is_unsupported() {
        let s = system(vec![1.0, 1.6], vec![vec![0.0; 2]; 2], ControlSpec::ladder(vec![1.0, 1.0]));
        let err = band_lines(&s, TransitionTarget::Exchange(0, 1));
        assert!(matches!(err, Err(Error::UnsupportedGate { .. })));
        assert!(band_lines(&s, TransitionTarget::Qubit(2)).is_err());
    }
}
