use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// exp(−i·H·t) for Hermitian `h`, via eigendecomposition so the result is
/// unitary to rounding.
pub fn unitary_exponential(h: &DMatrix<Complex64>, t: f64) -> DMatrix<Complex64> {
    let eig = h.clone().symmetric_eigen();
    let v = &eig.eigenvectors;
    let mut scaled = v.clone();
    for (k, lambda) in eig.eigenvalues.iter().enumerate() {
        let phase = Complex64::from_polar(1.0, -lambda * t);
        for x in scaled.column_mut(k).iter_mut() {
            *x *= phase;
        }
    }
    let u = scaled * v.adjoint();
    // one Newton–Schulz polar step squares the unitarity defect left by
    // the eigensolver, which otherwise accumulates as a norm drift
    let defect = u.adjoint() * &u;
    let three = DMatrix::<Complex64>::identity(u.nrows(), u.ncols()) * Complex64::from(3.0);
    &u * (three - defect) * Complex64::from(0.5)
}

pub(crate) fn check_hermitian(h: &DMatrix<Complex64>) -> Result<()> {
    if !h.is_square() {
        return Err(Error::DimensionMismatch {
            expected: h.nrows(),
            found: h.ncols(),
        });
    }
    let defect = (h - h.adjoint()).norm();
    if defect > 1e-12 * h.norm().max(1.0) {
        return Err(Error::invalid("generator", format!("not Hermitian (defect {defect:e})")));
    }
    Ok(())
}
