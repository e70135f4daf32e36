use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One gate on the qubit encoding (levels 0 and 1 of each variable).
/// Qubit 0 is the most significant bit of computational indices.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "gate", rename_all = "snake_case", deny_unknown_fields)]
pub enum GateSpec {
    /// exp(−iθX/2).
    Rx { theta: f64, qubit: usize },
    /// exp(−iθY/2).
    Ry { theta: f64, qubit: usize },
    /// exp(−iθZ/2), realized in software.
    Rz { theta: f64, qubit: usize },
    /// exp(−i(θ/2)(|10⟩⟨01| + |01⟩⟨10|)) on the pair.
    XySwap { theta: f64, qubits: (usize, usize) },
    /// diag(1, 1, 1, −1) on the pair, by free evolution under the coupling.
    CzDelay { qubits: (usize, usize) },
    Idle { duration: f64 },
}

impl GateSpec {
    pub fn validate(&self, n: usize) -> Result<()> {
        let bad_qubit = |q: usize| Error::invalid("qubit", format!("{q} out of range for {n} qubits"));
        match *self {
            GateSpec::Rx { theta, qubit } | GateSpec::Ry { theta, qubit } | GateSpec::Rz { theta, qubit } => {
                if qubit >= n {
                    return Err(bad_qubit(qubit));
                }
                finite_angle(theta)
            }
            GateSpec::XySwap { theta, qubits } => {
                check_pair(qubits, n)?;
                finite_angle(theta)
            }
            GateSpec::CzDelay { qubits } => check_pair(qubits, n),
            GateSpec::Idle { duration } => {
                if duration.is_finite() && duration >= 0.0 {
                    Ok(())
                } else {
                    Err(Error::invalid("duration", format!("{duration} must be non-negative")))
                }
            }
        }
    }

    /// Ideal action on the 2ⁿ-dimensional computational subspace.
    pub fn unitary(&self, n: usize) -> Result<DMatrix<Complex64>> {
        self.validate(n)?;
        Ok(match *self {
            GateSpec::Rx { theta, qubit } => embed_one(n, qubit, &rotation(theta, Axis::X)),
            GateSpec::Ry { theta, qubit } => embed_one(n, qubit, &rotation(theta, Axis::Y)),
            GateSpec::Rz { theta, qubit } => embed_one(n, qubit, &rotation(theta, Axis::Z)),
            GateSpec::XySwap { theta, qubits } => embed_two(n, qubits, &xy_swap(theta)),
            GateSpec::CzDelay { qubits } => {
                let mut cz = DMatrix::identity(4, 4);
                cz[(3, 3)] = Complex64::new(-1.0, 0.0);
                embed_two(n, qubits, &cz)
            }
            GateSpec::Idle { .. } => DMatrix::identity(1 << n, 1 << n),
        })
    }
}

fn finite_angle(theta: f64) -> Result<()> {
    if theta.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid("theta", "must be finite"))
    }
}

fn check_pair((j, k): (usize, usize), n: usize) -> Result<()> {
    if j >= n || k >= n || j == k {
        return Err(Error::invalid("qubits", format!("({j}, {k}) is not a valid pair for {n} qubits")));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy)]
enum Axis {
    X,
    Y,
    Z,
}

fn rotation(theta: f64, axis: Axis) -> DMatrix<Complex64> {
    let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    let z = Complex64::new(0.0, 0.0);
    let entries = match axis {
        Axis::X => [Complex64::new(c, 0.0), Complex64::new(0.0, -s), Complex64::new(0.0, -s), Complex64::new(c, 0.0)],
        Axis::Y => [Complex64::new(c, 0.0), Complex64::new(-s, 0.0), Complex64::new(s, 0.0), Complex64::new(c, 0.0)],
        Axis::Z => [Complex64::from_polar(1.0, -theta / 2.0), z, z, Complex64::from_polar(1.0, theta / 2.0)],
    };
    DMatrix::from_row_slice(2, 2, &entries)
}

fn xy_swap(theta: f64) -> DMatrix<Complex64> {
    let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    let mut m = DMatrix::identity(4, 4);
    m[(1, 1)] = Complex64::new(c, 0.0);
    m[(2, 2)] = Complex64::new(c, 0.0);
    m[(1, 2)] = Complex64::new(0.0, -s);
    m[(2, 1)] = Complex64::new(0.0, -s);
    m
}

pub(crate) fn bit(index: usize, qubit: usize, n: usize) -> usize {
    (index >> (n - 1 - qubit)) & 1
}

/// Lifts a single-qubit matrix to n qubits.
pub fn embed_one(n: usize, qubit: usize, m: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let dim = 1 << n;
    let mask = 1 << (n - 1 - qubit);
    DMatrix::from_fn(dim, dim, |r, c| {
        if r & !mask == c & !mask {
            m[(bit(r, qubit, n), bit(c, qubit, n))]
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

/// Lifts a two-qubit matrix, indexed 2·bit_j + bit_k, to n qubits.
pub fn embed_two(n: usize, (j, k): (usize, usize), m: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let dim = 1 << n;
    let mask = (1 << (n - 1 - j)) | (1 << (n - 1 - k));
    let local = |x: usize| 2 * bit(x, j, n) + bit(x, k, n);
    DMatrix::from_fn(dim, dim, |r, c| {
        if r & !mask == c & !mask {
            m[(local(r), local(c))]
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn rx_pi_is_minus_i_x() {
        let u = GateSpec::Rx { theta: std::f64::consts::PI, qubit: 0 }.unwrap_on(1);
        assert!((u[(0, 1)] - c(0.0, -1.0)).norm() < 1e-15 && u[(0, 0)].norm() < 1e-15);
    }

    #[test]
    fn rotations_match_generator_exponentials() {
        let x = DMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]);
        let y = DMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)]);
        let z = DMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)]);
        let theta = 1.234;
        for (gate, gen) in [
            (GateSpec::Rx { theta, qubit: 0 }, x),
            (GateSpec::Ry { theta, qubit: 0 }, y),
            (GateSpec::Rz { theta, qubit: 0 }, z),
        ] {
            let expected = (gen * c(0.0, -theta / 2.0)).exp();
            assert!((gate.unitary(1).unwrap() - expected).norm() < 1e-14, "{gate:?}");
        }
    }

    #[test]
    fn xy_swap_matches_xx_plus_yy() {
        let x = DMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]);
        let y = DMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)]);
        let theta = 0.77;
        let gen = x.kronecker(&x) + y.kronecker(&y);
        let expected = (gen * c(0.0, -theta / 4.0)).exp();
        let u = GateSpec::XySwap { theta, qubits: (0, 1) }.unwrap_on(2);
        assert!((u - expected).norm() < 1e-14);
    }

    #[test]
    fn embedding_matches_kronecker_products() {
        let a = rotation(0.3, Axis::X);
        let id = DMatrix::<Complex64>::identity(2, 2);
        // qubit 1 of 3: I ⊗ A ⊗ I
        let expected = id.kronecker(&a).kronecker(&id);
        assert!((embed_one(3, 1, &a) - expected).norm() < 1e-15);
        let cz = GateSpec::CzDelay { qubits: (0, 2) }.unwrap_on(3);
        for i in 0..8 {
            let sign = if i & 0b101 == 0b101 { -1.0 } else { 1.0 };
            assert_eq!(cz[(i, i)], c(sign, 0.0));
        }
        // reversed pair order swaps the roles of the two bits
        let s = xy_swap(0.9);
        let swapped = GateSpec::XySwap { theta: 0.9, qubits: (1, 0) }.unwrap_on(2);
        assert!((swapped - s).norm() < 1e-15);
    }

    #[test]
    fn json_records() {
        let g: GateSpec = serde_json::from_str(r#"{"gate":"xy_swap","theta":2.5,"qubits":[0,1]}"#).unwrap();
        assert_eq!(g, GateSpec::XySwap { theta: 2.5, qubits: (0, 1) });
        assert!(serde_json::from_str::<GateSpec>(r#"{"gate":"rx","theta":1,"qubit":0,"x":1}"#).is_err());
        assert!(GateSpec::CzDelay { qubits: (1, 1) }.validate(2).is_err());
        assert!(GateSpec::Rx { theta: f64::NAN, qubit: 0 }.validate(1).is_err());
    }

    impl GateSpec {
        fn unwrap_on(&self, n: usize) -> DMatrix<Complex64> {
            self.unitary(n).unwrap()
        }
    }
}
