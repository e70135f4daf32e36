use std::f64::consts::TAU;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::exponential::unitary_exponential;
use super::state::QuantumState;
use crate::error::{Error, Result};
use crate::model::ControlOperator;
use crate::pulses::{PulseSchedule, Segment};

/// Default local error per step.
pub const DEFAULT_TOLERANCE: f64 = 1e-10;

/// Largest step as a fraction of the fastest carrier period.
pub const MAX_STEP_FRACTION: f64 = 1.0 / 20.0;

#[derive(Debug, Clone, PartialEq)]
pub struct PropagationOptions {
    /// Local error bound per accepted step (2-norm, worst column).
    pub tol: f64,
    /// Times at which to record the state; the integrator lands on each.
    pub sample_times: Vec<f64>,
}

impl Default for PropagationOptions {
    fn default() -> Self {
        PropagationOptions {
            tol: DEFAULT_TOLERANCE,
            sample_times: Vec::new(),
        }
    }
}

impl PropagationOptions {
    pub fn with_tol(tol: f64) -> Self {
        PropagationOptions {
            tol,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct StepStats {
    pub accepted: usize,
    pub rejected: usize,
    /// max over steps and columns of |‖ψ‖ − ‖ψ₀‖|.
    pub max_norm_drift: f64,
}

#[derive(Debug, Clone)]
pub struct PropagationResult {
    pub final_state: QuantumState,
    pub samples: Vec<QuantumState>,
    pub stats: StepStats,
}

impl PropagationResult {
    pub fn max_norm_drift(&self) -> f64 {
        self.stats.max_norm_drift
    }

    pub fn steps(&self) -> usize {
        self.stats.accepted
    }
}

/// Solves i ∂ψ/∂t = (H + γ(t)·H_c) ψ over `t_span` for the state `psi0`,
/// taken to sit at `t_span.0`.
pub fn propagate(
    energies: &DVector<f64>,
    control: &ControlOperator,
    drive: &PulseSchedule,
    psi0: &QuantumState,
    t_span: (f64, f64),
    options: &PropagationOptions,
) -> Result<PropagationResult> {
    if psi0.dim() != energies.len() {
        return Err(Error::DimensionMismatch {
            expected: energies.len(),
            found: psi0.dim(),
        });
    }
    let norm = psi0.norm();
    if (norm - 1.0).abs() > super::state::NORM_TOLERANCE {
        return Err(Error::NotNormalized { norm });
    }
    let block = DMatrix::from_column_slice(psi0.dim(), 1, psi0.amplitudes.as_slice());
    let mut samples = Vec::new();
    let (block, stats) = integrate(energies, control, drive, block, t_span, options, |t, b| {
        samples.push(QuantumState {
            amplitudes: b.column(0).into_owned(),
            time: t,
        })
    })?;
    Ok(PropagationResult {
        final_state: QuantumState {
            amplitudes: block.column(0).into_owned(),
            time: t_span.1,
        },
        samples,
        stats,
    })
}

/// Propagates every column of `block` together; used for process matrices.
pub fn propagate_block(
    energies: &DVector<f64>,
    control: &ControlOperator,
    drive: &PulseSchedule,
    block: DMatrix<Complex64>,
    t_span: (f64, f64),
    tol: f64,
) -> Result<(DMatrix<Complex64>, StepStats)> {
    if block.nrows() != energies.len() {
        return Err(Error::DimensionMismatch {
            expected: energies.len(),
            found: block.nrows(),
        });
    }
    integrate(energies, control, drive, block, t_span, &PropagationOptions::with_tol(tol), |_, _| {})
}

struct Stepper<'a> {
    energies: &'a DVector<f64>,
    control: &'a DMatrix<Complex64>,
    tol: f64,
    max_step: f64,
    initial_norms: Vec<f64>,
    stats: StepStats,
}

impl Stepper<'_> {
    fn frozen(&self, gamma: f64) -> DMatrix<Complex64> {
        let mut h = self.control * Complex64::from(gamma);
        for (i, e) in self.energies.iter().enumerate() {
            h[(i, i)] += e;
        }
        h
    }

    fn midpoint(&self, seg: &Segment, start: f64, t: f64, h: f64) -> DMatrix<Complex64> {
        unitary_exponential(&self.frozen(seg.drive(t + 0.5 * h, start)), h)
    }

    fn record(&mut self, block: &DMatrix<Complex64>, t: f64) -> Result<()> {
        for (k, col) in block.column_iter().enumerate() {
            let n = col.norm();
            if !n.is_finite() {
                return Err(Error::NonFinite { t });
            }
            self.stats.max_norm_drift = self.stats.max_norm_drift.max((n - self.initial_norms[k]).abs());
        }
        Ok(())
    }

    /// Advances `block` from `a` to `b`, both inside one segment.
    fn advance(
        &mut self,
        seg: &Segment,
        start: f64,
        a: f64,
        b: f64,
        block: DMatrix<Complex64>,
        step: &mut f64,
    ) -> Result<DMatrix<Complex64>> {
        if b <= a {
            return Ok(block);
        }
        if seg.is_idle() {
            let mut out = block;
            for (i, e) in self.energies.iter().enumerate() {
                let phase = Complex64::from_polar(1.0, -e * (b - a));
                out.row_mut(i).iter_mut().for_each(|x| *x *= phase);
            }
            self.stats.accepted += 1;
            self.record(&out, b)?;
            return Ok(out);
        }
        if seg.is_constant() {
            let out = unitary_exponential(&self.frozen(seg.drive(a, start)), b - a) * block;
            self.stats.accepted += 1;
            self.record(&out, b)?;
            return Ok(out);
        }
        let mut block = block;
        let mut t = a;
        while t < b {
            let remaining = b - t;
            let mut h = step.min(self.max_step);
            // land exactly on b, and avoid leaving a sliver behind
            if h >= remaining || remaining - h < 1e-3 * h {
                h = remaining;
            }
            if h <= 1e-14 * t.abs().max(1.0) {
                return Err(Error::StepUnderflow { t, step: h });
            }
            let full = self.midpoint(seg, start, t, h) * &block;
            let half = 0.5 * h;
            let second = self.midpoint(seg, start, t + half, half);
            let halves = second * (self.midpoint(seg, start, t, half) * &block);
            let err = (0..block.ncols())
                .map(|k| (full.column(k) - halves.column(k)).norm())
                .fold(0.0, f64::max);
            if !err.is_finite() {
                return Err(Error::NonFinite { t });
            }
            // second-order scheme: local error ∝ h³
            let factor = if err == 0.0 { 2.0 } else { (0.9 * (self.tol / err).cbrt()).clamp(0.2, 2.0) };
            if err <= self.tol {
                block = halves;
                t = if h == remaining { b } else { t + h };
                self.stats.accepted += 1;
                self.record(&block, t)?;
                *step = h * factor;
            } else {
                self.stats.rejected += 1;
                *step = h * factor;
            }
        }
        Ok(block)
    }
}

fn integrate(
    energies: &DVector<f64>,
    control: &ControlOperator,
    drive: &PulseSchedule,
    block: DMatrix<Complex64>,
    (t0, t1): (f64, f64),
    options: &PropagationOptions,
    mut on_sample: impl FnMut(f64, &DMatrix<Complex64>),
) -> Result<(DMatrix<Complex64>, StepStats)> {
    if control.dim() != energies.len() {
        return Err(Error::DimensionMismatch {
            expected: energies.len(),
            found: control.dim(),
        });
    }
    if !(options.tol > 0.0 && options.tol.is_finite()) {
        return Err(Error::invalid("tol", format!("{} must be positive", options.tol)));
    }
    let total = drive.duration();
    let slack = 1e-12 * total.max(1.0);
    if !(t0 >= -slack && t1 <= total + slack && t0 <= t1) {
        return Err(Error::OutsideSchedule {
            t: if t0 < 0.0 || t0 > t1 { t0 } else { t1 },
            duration: total,
        });
    }
    let mut samples: Vec<f64> = options.sample_times.clone();
    if let Some(bad) = samples.iter().find(|&&s| !(s >= t0 - slack && s <= t1 + slack)) {
        return Err(Error::OutsideSchedule { t: *bad, duration: total });
    }
    samples.sort_by(f64::total_cmp);

    let max_carrier = drive.max_carrier();
    let max_step = if max_carrier > 0.0 { TAU / max_carrier * MAX_STEP_FRACTION } else { f64::INFINITY };
    let mut stepper = Stepper {
        energies,
        control: control.matrix(),
        tol: options.tol,
        max_step,
        initial_norms: block.column_iter().map(|c| c.norm()).collect(),
        stats: StepStats::default(),
    };
    let mut step = if max_step.is_finite() { max_step } else { (t1 - t0).max(f64::MIN_POSITIVE) };
    let mut block = block;
    let mut next_sample = samples.iter().peekable();
    while let Some(&&s) = next_sample.peek() {
        if s > t0 {
            break;
        }
        on_sample(s, &block);
        next_sample.next();
    }
    let mut t = t0;
    for (start, end, seg) in drive.timeline() {
        if end <= t || start >= t1 {
            continue;
        }
        let stop = end.min(t1);
        while t < stop {
            let target = match next_sample.peek() {
                Some(&&s) if s < stop => s,
                _ => stop,
            };
            block = stepper.advance(seg, start, t, target, block, &mut step)?;
            t = target;
            while let Some(&&s) = next_sample.peek() {
                if s > t {
                    break;
                }
                on_sample(s, &block);
                next_sample.next();
            }
        }
    }
    for &s in next_sample {
        on_sample(s, &block);
    }
    Ok((block, stepper.stats))
}
