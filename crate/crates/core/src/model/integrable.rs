use nalgebra::DVector;
use serde::Serialize;

use super::basis::FockBasis;
use crate::error::{Error, Result};

pub const DEFAULT_MAX_DIM: usize = 4096;
pub const DEFAULT_RESOLUTION: f64 = 1e-6;

/// Diagonal action-angle Hamiltonian on a truncated Fock space:
///
/// E(m) = e0 + Σ_j ω_j m_j + Σ_{j≤k} κ_jk m_j m_k
///
/// Each action enters as a number operator, so the Hamiltonian is diagonal
/// in the occupation basis. κ_jj is the per-variable anharmonicity; the
/// off-diagonal κ_jk are cross couplings, each unordered pair counted once.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntegrableModel {
    d: usize,
    omega: Vec<f64>,
    kappa: Vec<Vec<f64>>,
    e0: f64,
    max_dim: usize,
    resolution: f64,
}

impl IntegrableModel {
    pub fn new(omega: Vec<f64>, kappa: Vec<Vec<f64>>, d: usize) -> Result<Self> {
        Self::from_parts(omega, kappa, d, 0.0, DEFAULT_MAX_DIM, DEFAULT_RESOLUTION)
    }

    pub fn from_parts(
        omega: Vec<f64>,
        kappa: Vec<Vec<f64>>,
        d: usize,
        e0: f64,
        max_dim: usize,
        resolution: f64,
    ) -> Result<Self> {
        let model = IntegrableModel {
            d,
            omega,
            kappa,
            e0,
            max_dim,
            resolution,
        };
        model.validate()?;
        Ok(model)
    }

    /// Uncoupled, harmonic model.
    pub fn uncoupled(omega: Vec<f64>, d: usize) -> Result<Self> {
        let n = omega.len();
        Self::new(omega, vec![vec![0.0; n]; n], d)
    }

    pub fn with_offset(mut self, e0: f64) -> Result<Self> {
        self.e0 = e0;
        self.validate()?;
        Ok(self)
    }

    pub fn with_resolution(mut self, resolution: f64) -> Result<Self> {
        self.resolution = resolution;
        self.validate()?;
        Ok(self)
    }

    fn validate(&self) -> Result<()> {
        let n = self.omega.len();
        if n == 0 {
            return Err(Error::invalid("omega", "at least one frequency is required"));
        }
        if let Some((j, w)) = self
            .omega
            .iter()
            .enumerate()
            .find(|(_, w)| !(w.is_finite() && **w > 0.0))
        {
            return Err(Error::invalid(
                format!("omega[{j}]"),
                format!("frequency must be positive and finite, got {w}"),
            ));
        }
        if self.kappa.len() != n || self.kappa.iter().any(|row| row.len() != n) {
            return Err(Error::invalid("kappa", format!("must be a {n}x{n} matrix")));
        }
        for j in 0..n {
            for k in 0..n {
                let (a, b) = (self.kappa[j][k], self.kappa[k][j]);
                if !a.is_finite() {
                    return Err(Error::invalid(format!("kappa[{j}][{k}]"), "must be finite"));
                }
                if (a - b).abs() > 1e-12 * a.abs().max(b.abs()).max(1.0) {
                    return Err(Error::invalid(
                        format!("kappa[{j}][{k}]"),
                        format!("matrix is not symmetric ({a} vs {b})"),
                    ));
                }
            }
        }
        if !self.e0.is_finite() {
            return Err(Error::invalid("e0", "must be finite"));
        }
        if !(self.resolution > 0.0) {
            return Err(Error::invalid("resolution", "must be positive"));
        }
        FockBasis::new(n, self.d, self.max_dim)?;
        Ok(())
    }

    pub fn variables(&self) -> usize {
        self.omega.len()
    }

    pub fn levels(&self) -> usize {
        self.d
    }

    pub fn omega(&self) -> &[f64] {
        &self.omega
    }

    pub fn kappa(&self, j: usize, k: usize) -> f64 {
        self.kappa[j][k]
    }

    pub fn kappa_matrix(&self) -> &[Vec<f64>] {
        &self.kappa
    }

    pub fn offset(&self) -> f64 {
        self.e0
    }

    pub fn max_dim(&self) -> usize {
        self.max_dim
    }

    pub fn resolution(&self) -> f64 {
        self.resolution
    }

    pub fn basis(&self) -> FockBasis {
        FockBasis::new(self.variables(), self.d, self.max_dim)
            .expect("validated at construction")
    }

    /// 0↔1 frequency of variable j with every other variable in its ground state.
    pub fn qubit_frequency(&self, j: usize) -> f64 {
        self.omega[j] + self.kappa[j][j]
    }

    pub fn energy(&self, m: &[usize]) -> f64 {
        self.local_energy(m) + self.coupling_energy(m)
    }

    /// Single-variable part: e0 + Σ_j (ω_j m_j + κ_jj m_j²).
    pub fn local_energy(&self, m: &[usize]) -> f64 {
        m.iter().enumerate().fold(self.e0, |acc, (j, &mj)| {
            let x = mj as f64;
            acc + self.omega[j] * x + self.kappa[j][j] * x * x
        })
    }

    /// Two-body part: Σ_{j<k} κ_jk m_j m_k.
    pub fn coupling_energy(&self, m: &[usize]) -> f64 {
        let mut e = 0.0;
        for j in 0..m.len() {
            for k in j + 1..m.len() {
                e += self.kappa[j][k] * (m[j] * m[k]) as f64;
            }
        }
        e
    }

    /// Checks that 0↔1 lines of different variables (for every
    /// computational spectator configuration) never fall within the working
    /// resolution of each other. Lines of the same variable may coincide.
    pub fn check_resolvable(&self) -> Result<()> {
        let n = self.variables();
        let mut lines: Vec<(f64, usize)> = Vec::with_capacity(n << (n - 1));
        for j in 0..n {
            let others: Vec<usize> = (0..n).filter(|&k| k != j).collect();
            for s in 0..1usize << others.len() {
                let shift: f64 = others
                    .iter()
                    .enumerate()
                    .filter(|(b, _)| (s >> b) & 1 == 1)
                    .map(|(_, &k)| self.kappa[j][k])
                    .sum();
                lines.push((self.qubit_frequency(j) + shift, j));
            }
        }
        lines.sort_by(|a, b| a.0.total_cmp(&b.0));
        for (i, &(f, var)) in lines.iter().enumerate() {
            for &(g, other) in lines[i + 1..].iter() {
                if g - f > self.resolution {
                    break;
                }
                if other != var {
                    return Err(Error::Unresolvable {
                        first: f,
                        second: g,
                        resolution: self.resolution,
                    });
                }
            }
        }
        Ok(())
    }
}

/// Diagonal of the model Hamiltonian, ordered by [`FockBasis`] index.
pub fn build_hamiltonian(model: &IntegrableModel) -> DVector<f64> {
    let basis = model.basis();
    DVector::from_iterator(
        basis.dim(),
        (0..basis.dim()).map(|i| model.energy(&basis.occupations(i))),
    )
}
