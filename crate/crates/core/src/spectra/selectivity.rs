use std::collections::HashSet;
use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{System, Transition};
use crate::pulses::{band_lines, TransitionTarget, DEGENERACY_TOLERANCE};

/// Pulse duration per unit inverse line separation needed to resolve a line.
pub const SELECTIVITY_CONSTANT: f64 = 10.0;

fn same_line(a: f64, b: f64) -> bool {
    (a - b).abs() <= DEGENERACY_TOLERANCE * a.abs().max(b.abs()).max(1.0)
}

fn check_rate(gamma_eff: f64, constant: f64) -> Result<()> {
    if !(gamma_eff > 0.0 && gamma_eff.is_finite()) {
        return Err(Error::invalid("gamma_eff", format!("{gamma_eff} must be positive")));
    }
    if !(constant > 0.0 && constant.is_finite()) {
        return Err(Error::invalid("constant", format!("{constant} must be positive")));
    }
    Ok(())
}

/// Time needed to drive the line of pair (`upper`, `lower`) without
/// touching its neighbours: `constant`/Δ_min, with Δ_min the distance to the
/// nearest other coupled line. An isolated line only needs the π-pulse time
/// π/γ_eff.
pub fn selectivity_time(
    lines: &[Transition],
    (upper, lower): (usize, usize),
    gamma_eff: f64,
    constant: f64,
) -> Result<f64> {
    check_rate(gamma_eff, constant)?;
    let target = lines
        .iter()
        .find(|l| l.involves(upper, lower))
        .ok_or_else(|| Error::invalid("target", format!("pair ({upper}, {lower}) is not control-coupled")))?;
    let gap = lines
        .iter()
        .filter(|l| !same_line(l.frequency, target.frequency))
        .map(|l| (l.frequency - target.frequency).abs())
        .fold(f64::INFINITY, f64::min);
    Ok(if gap.is_finite() { constant / gap } else { PI / gamma_eff })
}

/// Selectivity time of a compensated band: the gap is measured from the
/// band to the nearest line outside it that touches the computational
/// subspace, since the band's own spectator lines are all driven.
pub fn band_selectivity_time(system: &System, target: TransitionTarget, gamma_eff: f64, constant: f64) -> Result<f64> {
    check_rate(gamma_eff, constant)?;
    let band = band_lines(system, target)?;
    let members: HashSet<(usize, usize)> = band.pairs().collect();
    let basis = system.basis();
    let gap = system
        .lines()
        .iter()
        .filter(|l| !members.contains(&(l.upper, l.lower)))
        .filter(|l| basis.is_computational(l.upper) || basis.is_computational(l.lower))
        .filter(|l| !band.lines.iter().any(|b| same_line(b.frequency, l.frequency)))
        .flat_map(|l| band.lines.iter().map(move |b| (b.frequency - l.frequency).abs()))
        .fold(f64::INFINITY, f64::min);
    Ok(if gap.is_finite() { constant / gap } else { PI / gamma_eff })
}

/// Smallest separation between two distinct coupled lines; `None` with
/// fewer than two distinct lines.
pub fn min_coupled_gap(lines: &[Transition]) -> Option<f64> {
    let mut freqs: Vec<f64> = lines.iter().map(|l| l.frequency).collect();
    freqs.sort_by(f64::total_cmp);
    freqs
        .windows(2)
        .filter(|w| !same_line(w[0], w[1]))
        .map(|w| w[1] - w[0])
        .min_by(f64::total_cmp)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Census {
    pub center: f64,
    pub bandwidth: f64,
    pub count: usize,
    pub lines: Vec<Transition>,
}

/// Every coupled line within [center − B/2, center + B/2]; B may be infinite.
pub fn forest_census(lines: &[Transition], center: f64, bandwidth: f64) -> Result<Census> {
    if !(bandwidth > 0.0) || !center.is_finite() {
        return Err(Error::invalid("bandwidth", format!("{bandwidth} must be positive")));
    }
    let half = 0.5 * bandwidth;
    let found: Vec<Transition> = lines
        .iter()
        .filter(|l| (l.frequency - center).abs() <= half)
        .copied()
        .collect();
    Ok(Census {
        center,
        bandwidth,
        count: found.len(),
        lines: found,
    })
}
