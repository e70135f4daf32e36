use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::integrable::IntegrableModel;
use crate::error::{Error, Result};

pub const HERMITICITY_TOLERANCE: f64 = 1e-12;

/// Parameters of the structured control
/// H_c = Σ_j λ_j (a_j + a_j†) + Σ_{j<k} μ_jk (a_j† a_k + a_k† a_j).
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ControlSpec {
    /// Ladder weight per variable.
    #[serde(default)]
    pub lambda: Vec<f64>,
    /// Symmetric exchange weights; only the upper triangle is used.
    #[serde(default)]
    pub mu: Vec<Vec<f64>>,
}

impl ControlSpec {
    pub fn ladder(lambda: Vec<f64>) -> Self {
        ControlSpec {
            lambda,
            mu: Vec::new(),
        }
    }

    pub fn exchange(n: usize, j: usize, k: usize, weight: f64) -> Self {
        let mut mu = vec![vec![0.0; n]; n];
        mu[j][k] = weight;
        mu[k][j] = weight;
        ControlSpec {
            lambda: Vec::new(),
            mu,
        }
    }

    fn lambda_at(&self, j: usize) -> f64 {
        self.lambda.get(j).copied().unwrap_or(0.0)
    }

    fn mu_at(&self, j: usize, k: usize) -> f64 {
        self.mu.get(j).and_then(|row| row.get(k)).copied().unwrap_or(0.0)
    }

    fn validate(&self, n: usize) -> Result<()> {
        if !self.lambda.is_empty() && self.lambda.len() != n {
            return Err(Error::invalid(
                "control.lambda",
                format!("expected {n} entries, got {}", self.lambda.len()),
            ));
        }
        if let Some(j) = self.lambda.iter().position(|x| !x.is_finite()) {
            return Err(Error::invalid(format!("control.lambda[{j}]"), "must be finite"));
        }
        if !self.mu.is_empty() {
            if self.mu.len() != n || self.mu.iter().any(|r| r.len() != n) {
                return Err(Error::invalid("control.mu", format!("must be a {n}x{n} matrix")));
            }
            for j in 0..n {
                for k in 0..n {
                    let (a, b) = (self.mu[j][k], self.mu[k][j]);
                    if !a.is_finite() || a != b {
                        return Err(Error::invalid(
                            format!("control.mu[{j}][{k}]"),
                            "must be finite and symmetric",
                        ));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Hermitian global control operator, stored densely in the Fock basis.
#[derive(Debug, Clone, PartialEq)]
pub struct ControlOperator {
    matrix: DMatrix<Complex64>,
}

impl ControlOperator {
    pub fn structured(model: &IntegrableModel, spec: &ControlSpec) -> Result<Self> {
        let basis = model.basis();
        let n = basis.variables();
        spec.validate(n)?;
        let dim = basis.dim();
        let mut h = DMatrix::<Complex64>::zeros(dim, dim);
        for i in 0..dim {
            for j in 0..n {
                let lambda = spec.lambda_at(j);
                if lambda != 0.0 {
                    if let Some(up) = basis.shifted(i, j, 1) {
                        let amp = lambda * ((basis.level(i, j) + 1) as f64).sqrt();
                        h[(up, i)] += amp;
                        h[(i, up)] += amp;
                    }
                }
                for k in (j + 1)..n {
                    let mu = spec.mu_at(j, k);
                    if mu == 0.0 {
                        continue;
                    }
                    // a_j† a_k and its adjoint
                    let target = basis
                        .shifted(i, k, -1)
                        .and_then(|x| basis.shifted(x, j, 1));
                    if let Some(t) = target {
                        let amp = mu
                            * (basis.level(i, k) as f64).sqrt()
                            * ((basis.level(i, j) + 1) as f64).sqrt();
                        h[(t, i)] += amp;
                        h[(i, t)] += amp;
                    }
                }
            }
        }
        Ok(ControlOperator { matrix: h })
    }

    /// Arbitrary Hermitian coupling matrix a_{ii′}.
    pub fn from_matrix(matrix: DMatrix<Complex64>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::DimensionMismatch {
                expected: matrix.nrows(),
                found: matrix.ncols(),
            });
        }
        let op = ControlOperator { matrix };
        let defect = op.hermiticity_defect();
        if defect > HERMITICITY_TOLERANCE {
            return Err(Error::invalid(
                "control",
                format!("matrix is not Hermitian (defect {defect:e})"),
            ));
        }
        Ok(op)
    }

    pub fn from_real(matrix: &DMatrix<f64>) -> Result<Self> {
        Self::from_matrix(matrix.map(|x| Complex64::new(x, 0.0)))
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn element(&self, row: usize, col: usize) -> Complex64 {
        self.matrix[(row, col)]
    }

    /// max |H − H†| over entries.
    pub fn hermiticity_defect(&self) -> f64 {
        let m = &self.matrix;
        let mut worst = 0.0f64;
        for i in 0..m.nrows() {
            for k in i..m.ncols() {
                worst = worst.max((m[(i, k)] - m[(k, i)].conj()).norm());
            }
        }
        worst
    }
}
