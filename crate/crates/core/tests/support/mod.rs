//! Test-only two-qubit synthesis: magic-basis Cartan (KAK) decomposition
//! into local ZYZ rotations and CZ-based ZZ interactions.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use nalgebra::{DMatrix, DVector, Matrix4, Vector4};
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use resonant::compiler::GateSpec;

type CMat = DMatrix<Complex64>;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn pauli(axis: usize) -> CMat {
    let z = c(0.0, 0.0);
    let e = match axis {
        0 => [z, c(1.0, 0.0), c(1.0, 0.0), z],
        1 => [z, c(0.0, -1.0), c(0.0, 1.0), z],
        _ => [c(1.0, 0.0), z, z, c(-1.0, 0.0)],
    };
    DMatrix::from_row_slice(2, 2, &e)
}

/// exp(−iθσ/2).
pub fn rotation(axis: usize, theta: f64) -> CMat {
    (pauli(axis) * c(0.0, -theta / 2.0)).exp()
}

/// Haar-random unitary from the QR decomposition of a Ginibre matrix.
pub fn haar_unitary(dim: usize, rng: &mut ChaCha8Rng) -> CMat {
    let g = CMat::from_fn(dim, dim, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        c(re, im)
    });
    let qr = g.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for k in 0..dim {
        let d = r[(k, k)];
        let phase = d / d.norm();
        q.column_mut(k).iter_mut().for_each(|x| *x *= phase);
    }
    q
}

fn magic() -> CMat {
    let s = FRAC_1_SQRT_2;
    DMatrix::from_row_slice(
        4,
        4,
        &[
            c(s, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, s),
            c(0.0, 0.0), c(0.0, s), c(s, 0.0), c(0.0, 0.0),
            c(0.0, 0.0), c(0.0, s), c(-s, 0.0), c(0.0, 0.0),
            c(s, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, -s),
        ],
    )
}

/// Splits a 4×4 unitary known to be a tensor product into its factors.
fn split_local(a: &CMat) -> (CMat, CMat) {
    let block = |i: usize, j: usize| a.view((2 * i, 2 * j), (2, 2)).into_owned();
    let (bi, bj) = (0..2)
        .flat_map(|i| (0..2).map(move |j| (i, j)))
        .max_by(|x, y| block(x.0, x.1).norm().total_cmp(&block(y.0, y.1).norm()))
        .unwrap();
    let b = block(bi, bj);
    let second = &b * c(2f64.sqrt() / b.norm(), 0.0);
    let first = CMat::from_fn(2, 2, |i, j| (second.adjoint() * block(i, j)).trace() / c(2.0, 0.0));
    (first, second)
}

/// Cartan form U ∝ (A₀⊗A₁)·exp(i(a·XX + b·YY + c·ZZ))·(B₀⊗B₁).
pub struct Cartan {
    pub after: (CMat, CMat),
    pub coefficients: [f64; 3],
    pub before: (CMat, CMat),
}

pub fn kak(u: &CMat, rng: &mut ChaCha8Rng) -> Cartan {
    let det = u.determinant();
    let su = u * Complex64::from_polar(1.0, -det.arg() / 4.0);
    let m = magic();
    let up = m.adjoint() * &su * &m;
    let sym = up.transpose() * &up;
    // real and imaginary parts of a symmetric unitary commute; a random
    // combination separates their joint eigenbasis
    let mix: f64 = rng.random_range(0.3..0.7);
    let real = Matrix4::from_fn(|i, j| sym[(i, j)].re + mix * sym[(i, j)].im);
    let mut o = real.symmetric_eigen().eigenvectors;
    if o.determinant() < 0.0 {
        o.column_mut(0).neg_mut();
    }
    let oc = CMat::from_fn(4, 4, |i, j| c(o[(i, j)], 0.0));
    let d = oc.transpose() * &sym * &oc;
    let mut theta: Vector4<f64> = Vector4::from_fn(|k, _| d[(k, k)].arg() / 2.0);
    let diag = |t: &Vector4<f64>| CMat::from_diagonal(&DVector::from_fn(4, |k, _| Complex64::from_polar(1.0, t[k])));
    let mut k1 = &up * &oc * diag(&theta).adjoint();
    if k1.determinant().re < 0.0 {
        theta[0] += PI;
        k1 = &up * &oc * diag(&theta).adjoint();
    }
    // diagonal patterns of XX, YY, ZZ and I in the magic basis
    let xx = pauli(0).kronecker(&pauli(0));
    let yy = pauli(1).kronecker(&pauli(1));
    let zz = pauli(2).kronecker(&pauli(2));
    let pattern = |p: &CMat| {
        let d = m.adjoint() * p * &m;
        Vector4::from_fn(|k, _| d[(k, k)].re)
    };
    let basis = Matrix4::from_columns(&[pattern(&xx), pattern(&yy), pattern(&zz), Vector4::repeat(1.0)]);
    let coeffs = basis.lu().solve(&theta).expect("Pauli patterns are independent");
    let after = split_local(&(&m * &k1 * m.adjoint()));
    let before = split_local(&(&m * oc.transpose() * m.adjoint()));
    Cartan {
        after,
        coefficients: [coeffs[0], coeffs[1], coeffs[2]],
        before,
    }
}

/// Angles (β, γ, δ) with V ∝ Rz(β)·Ry(γ)·Rz(δ).
pub fn zyz(v: &CMat) -> (f64, f64, f64) {
    let su = v * Complex64::from_polar(1.0, -v.determinant().arg() / 2.0);
    let (a, b) = (su[(0, 0)], su[(1, 0)]);
    let gamma = 2.0 * b.norm().atan2(a.norm());
    let sum = if a.norm() > 1e-12 { -2.0 * a.arg() } else { 0.0 };
    let diff = if b.norm() > 1e-12 { 2.0 * b.arg() } else { 0.0 };
    ((sum + diff) / 2.0, gamma, (sum - diff) / 2.0)
}

enum Element {
    Local(usize, CMat),
    Cz,
}

/// exp(i·angle·P⊗P) for P = X, Y or Z, from two CZs: P = W·Z·W†.
fn pauli_pair(axis: usize, angle: f64, out: &mut Vec<Element>) {
    let w = match axis {
        0 => rotation(1, PI / 2.0),
        1 => rotation(0, -PI / 2.0),
        _ => CMat::identity(2, 2),
    };
    let h = (pauli(0) + pauli(2)) * c(FRAC_1_SQRT_2, 0.0);
    out.push(Element::Local(0, w.adjoint()));
    out.push(Element::Local(1, w.adjoint()));
    // CNOT(0→1)·(I⊗Rz(−2·angle))·CNOT(0→1), CNOT = (I⊗H)·CZ·(I⊗H)
    out.push(Element::Local(1, h.clone()));
    out.push(Element::Cz);
    out.push(Element::Local(1, &h * rotation(2, -2.0 * angle) * &h));
    out.push(Element::Cz);
    out.push(Element::Local(1, h));
    out.push(Element::Local(0, w.clone()));
    out.push(Element::Local(1, w));
}

/// Gate list (time order) realizing `u` up to global phase.
pub fn synthesize(u: &CMat, rng: &mut ChaCha8Rng) -> Vec<GateSpec> {
    let k = kak(u, rng);
    let mut elements = vec![Element::Local(0, k.before.0.clone()), Element::Local(1, k.before.1.clone())];
    for axis in [2, 1, 0] {
        pauli_pair(axis, k.coefficients[axis], &mut elements);
    }
    elements.push(Element::Local(0, k.after.0.clone()));
    elements.push(Element::Local(1, k.after.1.clone()));

    let mut gates = Vec::new();
    let mut pending = [CMat::identity(2, 2), CMat::identity(2, 2)];
    let flush = |pending: &mut [CMat; 2], gates: &mut Vec<GateSpec>| {
        for (qubit, v) in pending.iter_mut().enumerate() {
            let (beta, gamma, delta) = zyz(v);
            gates.push(GateSpec::Rz { theta: delta, qubit });
            gates.push(GateSpec::Ry { theta: gamma, qubit });
            gates.push(GateSpec::Rz { theta: beta, qubit });
            *v = CMat::identity(2, 2);
        }
    };
    for e in elements {
        match e {
            Element::Local(q, v) => pending[q] = v * &pending[q],
            Element::Cz => {
                flush(&mut pending, &mut gates);
                gates.push(GateSpec::CzDelay { qubits: (0, 1) });
            }
        }
    }
    flush(&mut pending, &mut gates);
    gates
}

/// Product of the ideal gate unitaries, in time order.
pub fn circuit_unitary(gates: &[GateSpec], n: usize) -> CMat {
    gates
        .iter()
        .fold(CMat::identity(1 << n, 1 << n), |acc, g| g.unitary(n).unwrap() * acc)
}
