//! Dense matrix helpers used as an independent check on the sparse kernels.
//!
//! Everything here is exponential in the qubit count and capped at
//! [`DENSE_UNITARY_LIMIT`] qubits.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{QlabError, Result};

pub type DenseMatrix = DMatrix<Complex64>;

/// Largest register for which a full unitary is built.
pub const DENSE_UNITARY_LIMIT: usize = 6;

pub(crate) fn check_unitary_size(n: usize) -> Result<()> {
    if n > DENSE_UNITARY_LIMIT {
        return Err(QlabError::Capacity {
            what: "unitary qubit count",
            requested: n,
            limit: DENSE_UNITARY_LIMIT,
        });
    }
    Ok(())
}

pub fn identity(dim: usize) -> DenseMatrix {
    DenseMatrix::identity(dim, dim)
}

/// `⊗` of 2×2 factors, `factors[q]` acting on qubit `q`. Little-endian, so
/// the highest qubit is the leftmost Kronecker factor.
pub fn kron_qubits(factors: &[DenseMatrix]) -> DenseMatrix {
    factors
        .iter()
        .rev()
        .fold(identity(1), |acc, f| acc.kronecker(f))
}

/// Dense matrix-vector product.
pub fn apply(matrix: &DenseMatrix, vector: &[Complex64]) -> Vec<Complex64> {
    let v = nalgebra::DVector::from_column_slice(vector);
    (matrix * v).iter().copied().collect()
}

/// Largest elementwise `|a - b|`.
pub fn max_abs_diff(a: &DenseMatrix, b: &DenseMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape(), "shape mismatch");
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Largest elementwise deviation of `U†U` from the identity.
pub fn unitarity_error(u: &DenseMatrix) -> f64 {
    let product = u.adjoint() * u;
    max_abs_diff(&product, &identity(u.nrows()))
}

/// The discrete Fourier transform matrix `ω^{jk}/√N`, `ω = e^{2πi/N}`.
pub fn dft_matrix(num_qubits: usize) -> DenseMatrix {
    let dim = 1usize << num_qubits;
    let scale = 1.0 / (dim as f64).sqrt();
    DenseMatrix::from_fn(dim, dim, |row, col| {
        let angle = 2.0 * std::f64::consts::PI * ((row * col) % dim) as f64 / dim as f64;
        Complex64::from_polar(scale, angle)
    })
}
