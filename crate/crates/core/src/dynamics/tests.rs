use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::model::{build_hamiltonian, ControlOperator, ControlSpec, IntegrableModel};
use crate::pulses::{Envelope, PulseSchedule, RwaGenerator, Tone};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn two_level(omega: f64) -> (DVector<f64>, ControlOperator) {
    let m = IntegrableModel::uncoupled(vec![omega], 2).unwrap();
    let ctl = ControlOperator::structured(&m, &ControlSpec::ladder(vec![1.0])).unwrap();
    (build_hamiltonian(&m), ctl)
}

fn random_hermitian(dim: usize, rng: &mut ChaCha8Rng) -> DMatrix<Complex64> {
    let a = DMatrix::from_fn(dim, dim, |_, _| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
    (&a + a.adjoint()) * c(0.5, 0.0)
}

fn random_state(dim: usize, rng: &mut ChaCha8Rng) -> QuantumState {
    let v = DVector::from_fn(dim, |_, _| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
    QuantumState::normalized(v, 0.0).unwrap()
}

/// Classical RK4 on ψ' = −i(H + γ(t)H_c)ψ with a fixed small step.
fn rk4_oracle(
    energies: &DVector<f64>,
    control: &DMatrix<Complex64>,
    drive: &PulseSchedule,
    psi0: &DVector<Complex64>,
    t_end: f64,
    steps: usize,
) -> DVector<Complex64> {
    let rhs = |t: f64, psi: &DVector<Complex64>| -> DVector<Complex64> {
        let g = drive.evaluate_drive(t.min(drive.duration())).unwrap();
        let h_psi = control * psi * c(g, 0.0) + psi.component_mul(&energies.map(|e| c(e, 0.0)));
        h_psi * c(0.0, -1.0)
    };
    let h = t_end / steps as f64;
    let mut psi = psi0.clone();
    for k in 0..steps {
        let t = k as f64 * h;
        let k1 = rhs(t, &psi);
        let k2 = rhs(t + h / 2.0, &(&psi + &k1 * c(h / 2.0, 0.0)));
        let k3 = rhs(t + h / 2.0, &(&psi + &k2 * c(h / 2.0, 0.0)));
        let k4 = rhs(t + h, &(&psi + &k3 * c(h, 0.0)));
        psi += (k1 + k2 * c(2.0, 0.0) + k3 * c(2.0, 0.0) + k4) * c(h / 6.0, 0.0);
    }
    psi
}

#[test]
fn free_evolution_is_pure_phase() {
    let e = DVector::from_vec(vec![0.0, 1.3, 2.9, 4.1]);
    let ctl = ControlOperator::from_matrix(DMatrix::zeros(4, 4)).unwrap();
    let mut drive = PulseSchedule::new();
    drive.delay(17.3).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let psi = random_state(4, &mut rng);
    let r = propagate(&e, &ctl, &drive, &psi, (0.0, 17.3), &PropagationOptions::default()).unwrap();
    for k in 0..4 {
        let expected = psi.amplitudes[k] * Complex64::from_polar(1.0, -e[k] * 17.3);
        assert!((r.final_state.amplitudes[k] - expected).norm() < 1e-13);
    }
}

#[test]
fn zero_drive_conserves_energy_and_norm() {
    let m = IntegrableModel::new(vec![1.0, 1.7], vec![vec![0.02, 0.05], vec![0.05, -0.01]], 3).unwrap();
    let e = build_hamiltonian(&m);
    let ctl = ControlOperator::structured(&m, &ControlSpec::ladder(vec![1.0, 0.5])).unwrap();
    let mut drive = PulseSchedule::new();
    drive.tones(40.0, vec![Tone::new(1.0, 0.0, 0.0)]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let psi = random_state(9, &mut rng);
    let opts = PropagationOptions {
        sample_times: (0..=8).map(|k| 5.0 * k as f64).collect(),
        ..Default::default()
    };
    let r = propagate(&e, &ctl, &drive, &psi, (0.0, 40.0), &opts).unwrap();
    let e0 = psi.diagonal_expectation(&e);
    assert_eq!(r.samples.len(), 9);
    for s in &r.samples {
        assert!((s.diagonal_expectation(&e) - e0).abs() <= 1e-10);
    }
    assert!(r.max_norm_drift() <= 1e-9);
}

#[test]
fn resonant_pi_pulse_inverts_two_level() {
    let (e, ctl) = two_level(1.0);
    let gamma = 1e-3;
    let mut drive = PulseSchedule::new();
    drive
        .tones(PI / gamma, vec![Tone::new(1.0, 0.0, gamma).with_envelope(Envelope::Flat)])
        .unwrap();
    let r = propagate(
        &e,
        &ctl,
        &drive,
        &QuantumState::basis(2, 0),
        (0.0, PI / gamma),
        &PropagationOptions::default(),
    )
    .unwrap();
    // counter-rotating corrections are O(γ/ω) in amplitude
    assert!(r.final_state.probabilities()[1] > 1.0 - 1e-5);
    assert!(r.max_norm_drift() <= 1e-9);
}

#[test]
fn piecewise_constant_matches_pade_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..5 {
        let dim = 6;
        let e = DVector::from_fn(dim, |_, _| rng.random_range(0.0..3.0));
        let hc = random_hermitian(dim, &mut rng);
        let ctl = ControlOperator::from_matrix(hc.clone()).unwrap();
        let mut drive = PulseSchedule::new();
        let mut oracle = DMatrix::<Complex64>::identity(dim, dim);
        for _ in 0..4 {
            let duration = rng.random_range(0.5..3.0);
            let strength: f64 = rng.random_range(-0.8..0.8);
            drive.tones(duration, vec![Tone::constant(strength)]).unwrap();
            let mut h = &hc * c(strength, 0.0);
            for i in 0..dim {
                h[(i, i)] += e[i];
            }
            oracle = (h * c(0.0, -duration)).exp() * oracle;
        }
        let psi = random_state(dim, &mut rng);
        let t = drive.duration();
        let r = propagate(&e, &ctl, &drive, &psi, (0.0, t), &PropagationOptions::default()).unwrap();
        assert!((r.final_state.amplitudes - oracle * &psi.amplitudes).norm() < 1e-10);
    }
}

#[test]
fn oscillating_drive_matches_rk4_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let dim = 3;
    let e = DVector::from_vec(vec![0.0, 1.1, 2.5]);
    let hc = random_hermitian(dim, &mut rng);
    let ctl = ControlOperator::from_matrix(hc.clone()).unwrap();
    let mut drive = PulseSchedule::new();
    drive
        .tones(6.0, vec![Tone::new(1.1, 0.3, 0.2).with_envelope(Envelope::FlatTop { ramp: 0.2 })])
        .unwrap();
    drive.delay(1.0).unwrap();
    drive.tones(5.0, vec![Tone::new(1.4, -0.7, 0.15).with_envelope(Envelope::Gaussian { sigma: 0.2 })]).unwrap();
    let psi = random_state(dim, &mut rng);
    let t = drive.duration();
    let r = propagate(&e, &ctl, &drive, &psi, (0.0, t), &PropagationOptions::default()).unwrap();
    let expected = rk4_oracle(&e, &hc, &drive, &psi.amplitudes, t, 120_000);
    assert!((r.final_state.amplitudes - expected).norm() < 1e-6);
}

#[test]
fn samples_land_on_requested_times() {
    let (e, ctl) = two_level(1.0);
    let mut drive = PulseSchedule::new();
    drive.tones(10.0, vec![Tone::new(1.0, 0.0, 0.05)]).unwrap();
    let times = vec![0.0, 2.5, 3.3333, 10.0];
    let opts = PropagationOptions {
        sample_times: times.clone(),
        ..Default::default()
    };
    let r = propagate(&e, &ctl, &drive, &QuantumState::basis(2, 0), (0.0, 10.0), &opts).unwrap();
    let got: Vec<f64> = r.samples.iter().map(|s| s.time).collect();
    assert_eq!(got, times);
    assert_eq!(r.samples.last().unwrap().amplitudes, r.final_state.amplitudes);
    // sampling must not change the answer beyond tolerance-level noise
    let plain = propagate(&e, &ctl, &drive, &QuantumState::basis(2, 0), (0.0, 10.0), &Default::default()).unwrap();
    assert!((plain.final_state.amplitudes - r.final_state.amplitudes).norm() < 1e-8);
}

#[test]
fn time_reversal_returns_initial_state() {
    let m = IntegrableModel::new(vec![1.0, 1.45], vec![vec![0.0, 0.07], vec![0.07, 0.0]], 2).unwrap();
    let e = build_hamiltonian(&m);
    let ctl = ControlOperator::structured(&m, &ControlSpec::ladder(vec![1.0, 0.8])).unwrap();
    let mut drive = PulseSchedule::new();
    drive.tones(30.0, vec![Tone::new(1.0, 0.2, 0.05), Tone::new(1.52, 1.0, 0.04)]).unwrap();
    drive.delay(3.0).unwrap();
    drive.tones(20.0, vec![Tone::new(1.45, -0.5, 0.06)]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let psi = random_state(4, &mut rng);
    let t = drive.duration();
    let tol = 1e-10;
    let fwd = propagate(&e, &ctl, &drive, &psi, (0.0, t), &PropagationOptions::with_tol(tol)).unwrap();
    let conj = QuantumState {
        amplitudes: fwd.final_state.amplitudes.map(|a| a.conj()),
        time: 0.0,
    };
    let back = propagate(&e, &ctl, &drive.reversed(), &conj, (0.0, t), &PropagationOptions::with_tol(tol)).unwrap();
    let returned = back.final_state.amplitudes.map(|a| a.conj());
    let err = (returned - &psi.amplitudes).norm();
    assert!(err <= 10.0 * tol, "time-reversal error {err:e}");
}

#[test]
fn rwa_matches_full_dynamics_with_quadratic_error() {
    // smooth ramps kill the first-order counter-rotating wiggle at the
    // endpoints, leaving the O(γ²/ω) Bloch–Siegert phase over a fixed window
    let (e, ctl) = two_level(1.0);
    let duration = 200.0;
    let envelope = Envelope::FlatTop { ramp: 0.25 };
    let mut points = Vec::new();
    for gamma in [1e-2, 3e-3, 1e-3, 3e-4, 1e-4] {
        let tone = Tone::new(1.0, 0.4, gamma).with_envelope(envelope);
        let mut drive = PulseSchedule::new();
        drive.tones(duration, vec![tone]).unwrap();
        let psi0 = QuantumState::basis(2, 0);
        let full = propagate(&e, &ctl, &drive, &psi0, (0.0, duration), &PropagationOptions::with_tol(1e-13)).unwrap();
        let chi_full = to_interaction_frame(&full.final_state, &e, duration);
        let unit = Tone { amplitude: 1.0, ..tone };
        let generator = RwaGenerator::from_lines(2, &crate::model::transition_table(&e, &ctl, 1e-12), &unit, 0.5)
            .unwrap()
            .matrix
            * c(gamma * envelope.area(duration), 0.0);
        let chi_rwa = propagate_rwa(&generator, &psi0, (0.0, 1.0)).unwrap();
        let err = (chi_full.amplitudes - chi_rwa.amplitudes).norm();
        points.push((gamma.ln(), err.ln()));
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let slope = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>()
        / points.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
    assert!((slope - 2.0).abs() <= 0.3, "slope {slope}, points {points:?}");
}

#[test]
fn invalid_inputs_are_rejected() {
    let (e, ctl) = two_level(1.0);
    let mut drive = PulseSchedule::new();
    drive.delay(1.0).unwrap();
    let psi = QuantumState::basis(2, 0);
    assert!(propagate(&e, &ctl, &drive, &psi, (0.0, 2.0), &Default::default()).is_err());
    assert!(propagate(&e, &ctl, &drive, &psi, (0.0, 1.0), &PropagationOptions::with_tol(0.0)).is_err());
    let unnormalized = QuantumState {
        amplitudes: DVector::from_vec(vec![c(1.0, 0.0), c(1.0, 0.0)]),
        time: 0.0,
    };
    assert!(matches!(
        propagate(&e, &ctl, &drive, &unnormalized, (0.0, 1.0), &Default::default()),
        Err(crate::Error::NotNormalized { .. })
    ));
}

#[test]
fn trajectory_csv_layout() {
    let samples = vec![QuantumState::basis(3, 1), QuantumState { time: 0.5, ..QuantumState::basis(3, 2) }];
    let mut buf = Vec::new();
    write_trajectory_csv(&mut buf, &samples, Some(&[2, 0])).unwrap();
    assert_eq!(String::from_utf8(buf).unwrap(), "time,p2,p0,norm\n0,0,0,1\n0.5,1,0,1\n");
    assert!(write_trajectory_csv(Vec::new(), &samples, Some(&[3])).is_err());
}
