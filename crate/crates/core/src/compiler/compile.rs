use std::f64::consts::{PI, TAU};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use super::gates::GateSpec;
use crate::error::{Error, Result};
use crate::model::System;
use crate::pulses::{target_band, Envelope, PulseSchedule, Tone, TransitionTarget};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompileOptions {
    /// Peak Rabi frequency of every driven line.
    pub gamma_eff: f64,
    pub envelope: Envelope,
    /// Drive every spectator-split line of a band. When false only the line
    /// with all spectators in |0⟩ is driven, as a naive single-tone baseline.
    pub compensate: bool,
}

impl CompileOptions {
    pub fn new(gamma_eff: f64) -> Self {
        CompileOptions {
            gamma_eff,
            envelope: Envelope::default(),
            compensate: true,
        }
    }

    pub fn with_envelope(mut self, envelope: Envelope) -> Self {
        self.envelope = envelope;
        self
    }

    pub fn uncompensated(mut self) -> Self {
        self.compensate = false;
        self
    }
}

/// Where one gate landed in the schedule.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GateRecord {
    pub gate: GateSpec,
    pub start: f64,
    pub duration: f64,
    pub carriers: Vec<f64>,
}

/// A circuit lowered to a pulse schedule, with the phase bookkeeping needed
/// to read its output in the qubit frame.
///
/// The qubit frame rotates with the single-variable part of H only, so the
/// coupling term keeps acting on the logical state. The compiler tracks a
/// diagonal phase ledger `L` such that, at clock time t,
/// logical state = e^{i(L − H_zz·t)} · (interaction-frame state),
/// and chooses tone phases and ledger updates so that this logical state
/// follows the ideal circuit.
#[derive(Debug, Clone)]
pub struct CompiledCircuit {
    pub(crate) system: System,
    pub(crate) schedule: PulseSchedule,
    pub(crate) virtual_z: Vec<f64>,
    pub(crate) output_phases: DVector<f64>,
    pub(crate) target: DMatrix<Complex64>,
    pub(crate) gates: Vec<GateRecord>,
    pub(crate) tolerance: f64,
}

impl CompiledCircuit {
    pub fn system(&self) -> &System {
        &self.system
    }

    pub fn schedule(&self) -> &PulseSchedule {
        &self.schedule
    }

    /// Accumulated software Z angle per qubit.
    pub fn virtual_z(&self) -> &[f64] {
        &self.virtual_z
    }

    /// Diagonal phases applied to the interaction-frame state at the end.
    pub fn output_phases(&self) -> &DVector<f64> {
        &self.output_phases
    }

    /// Ideal unitary on the computational subspace.
    pub fn target(&self) -> &DMatrix<Complex64> {
        &self.target
    }

    pub fn gates(&self) -> &[GateRecord] {
        &self.gates
    }

    pub fn duration(&self) -> f64 {
        self.schedule.duration()
    }

    /// Every carrier used, in schedule order.
    pub fn carriers(&self) -> Vec<f64> {
        self.gates.iter().flat_map(|g| g.carriers.iter().copied()).collect()
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    /// Sets the local error tolerance used by full-mode execution.
    pub fn with_tolerance(mut self, tol: f64) -> Result<Self> {
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(Error::invalid("tol", format!("{tol} must be positive")));
        }
        self.tolerance = tol;
        Ok(self)
    }
}

struct Ledger<'a> {
    system: &'a System,
    coupling: DVector<f64>,
    phases: DVector<f64>,
    clock: f64,
}

impl Ledger<'_> {
    /// Phase of basis state i relative to the qubit frame at the current clock.
    fn reference(&self, i: usize) -> f64 {
        self.phases[i] - self.coupling[i] * self.clock
    }

    /// Free evolution for `duration`: the coupling phase is absorbed so the
    /// logical state stays put.
    fn advance(&mut self, duration: f64) {
        self.phases.axpy(duration, &self.coupling, 1.0);
        self.clock += duration;
    }

    fn add(&mut self, f: impl Fn(&[usize]) -> f64) {
        let basis = self.system.basis();
        for i in 0..basis.dim() {
            self.phases[i] += f(&basis.occupations(i));
        }
    }

    /// Tones driving every line of `target` so each pair (u, l) rotates in
    /// the logical frame with generator entry (θ/2)·`axis` at ⟨u|·|l⟩ when u
    /// is the excited side, or its conjugate otherwise.
    fn rotation_tones(
        &self,
        target: TransitionTarget,
        axis: Complex64,
        options: &CompileOptions,
    ) -> Result<Vec<Tone>> {
        let mut band = target_band(self.system, target)?;
        if !options.compensate {
            let bare = band
                .lines
                .iter()
                .min_by_key(|line| line.pairs.iter().map(|p| p.1).min())
                .cloned()
                .expect("band lines are never empty");
            band.lines = vec![bare];
        }
        let basis = self.system.basis();
        let excited = match target {
            TransitionTarget::Qubit(j) | TransitionTarget::Exchange(j, _) => j,
        };
        let mut tones = Vec::with_capacity(band.lines.len());
        for line in &band.lines {
            let mut phases = line.pairs.iter().map(|&(u, l)| {
                let entry = if basis.level(u, excited) == 1 { axis } else { axis.conj() };
                (-entry.arg() + self.reference(u) - self.reference(l) + line.coupling.arg()).rem_euclid(TAU)
            });
            let phase = phases.next().expect("band lines are never empty");
            if let Some(other) = phases.find(|p| {
                let gap = (p - phase).rem_euclid(TAU);
                gap.min(TAU - gap) > 1e-9
            }) {
                return Err(Error::UnsupportedGate {
                    gate: format!("{target:?}"),
                    reason: format!(
                        "degenerate pairs on line {} need phases {phase} and {other}",
                        line.frequency
                    ),
                });
            }
            tones.push(Tone {
                carrier: line.frequency,
                phase,
                amplitude: options.gamma_eff / line.coupling.norm(),
                envelope: options.envelope,
            });
        }
        Ok(tones)
    }
}

/// Lowers `circuit` onto `system`, gate by gate and sequentially.
pub fn compile(circuit: &[GateSpec], system: &System, options: &CompileOptions) -> Result<CompiledCircuit> {
    if !(options.gamma_eff > 0.0 && options.gamma_eff.is_finite()) {
        return Err(Error::invalid("gamma_eff", format!("{} must be positive", options.gamma_eff)));
    }
    options.envelope.validate()?;
    system.model().check_resolvable()?;
    let n = system.basis().variables();
    let comp = 1usize << n;
    let mut ledger = Ledger {
        system,
        coupling: system.coupling_energies(),
        phases: DVector::zeros(system.dim()),
        clock: 0.0,
    };
    let mut schedule = PulseSchedule::new();
    let mut virtual_z = vec![0.0; n];
    let mut target = DMatrix::<Complex64>::identity(comp, comp);
    let mut gates = Vec::with_capacity(circuit.len());
    let fill = options.envelope.fill_factor();

    for &gate in circuit {
        gate.validate(n)?;
        let start = ledger.clock;
        let mut carriers = Vec::new();
        let rotation = match gate {
            GateSpec::Rx { theta, qubit } => Some((theta, TransitionTarget::Qubit(qubit), Complex64::new(1.0, 0.0))),
            GateSpec::Ry { theta, qubit } => Some((theta, TransitionTarget::Qubit(qubit), Complex64::new(0.0, 1.0))),
            GateSpec::XySwap { theta, qubits: (j, k) } => {
                Some((theta, TransitionTarget::Exchange(j, k), Complex64::new(1.0, 0.0)))
            }
            _ => None,
        };
        if let Some((theta, transition, axis)) = rotation {
            if theta != 0.0 {
                let axis = if theta < 0.0 { -axis } else { axis };
                let tones = ledger.rotation_tones(transition, axis, options)?;
                let duration = theta.abs() / (options.gamma_eff * fill);
                carriers = tones.iter().map(|t| t.carrier).collect();
                schedule.tones(duration, tones)?;
                ledger.advance(duration);
            }
        }
        match gate {
            GateSpec::Rz { theta, qubit } => {
                ledger.add(|m| theta * (m[qubit] as f64 - 0.5));
                virtual_z[qubit] += theta;
            }
            GateSpec::CzDelay { qubits: (j, k) } => {
                let kappa = system.model().kappa(j, k);
                if kappa == 0.0 {
                    return Err(Error::UnsupportedGate {
                        gate: format!("{gate:?}"),
                        reason: format!("variables {j} and {k} are uncoupled"),
                    });
                }
                let duration = PI / kappa.abs();
                schedule.delay(duration)?;
                ledger.add(|m| PI * (m[j] * m[k]) as f64);
                ledger.advance(duration);
            }
            GateSpec::Idle { duration } if duration > 0.0 => {
                schedule.delay(duration)?;
                ledger.advance(duration);
            }
            _ => {}
        }
        target = gate.unitary(n)? * target;
        gates.push(GateRecord {
            gate,
            start,
            duration: ledger.clock - start,
            carriers,
        });
    }

    let output_phases = DVector::from_fn(system.dim(), |i, _| ledger.reference(i));
    Ok(CompiledCircuit {
        system: system.clone(),
        schedule,
        virtual_z,
        output_phases,
        target,
        gates,
        tolerance: crate::dynamics::DEFAULT_TOLERANCE,
    })
}
