//! Dense complex linear algebra.
//!
//! Vectorization is column-major throughout the crate: `vec` stacks columns,
//! so that `vec(A·X·B) = (Bᵀ ⊗ A)·vec(X)`.

mod decomp;
mod matrix;

pub use decomp::{invert, null_space_basis, pinv, rank, singular_values, svd, Svd, Tolerance};
pub use matrix::ComplexMatrix;

use num_complex::Complex64;

use crate::error::{Result, WaxError};

/// Largest condition estimate accepted by [`invert`].
pub const SINGULAR_CONDITION: f64 = 1e12;

/// Matrix product `a·b`.
pub fn matmul(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    if a.cols() != b.rows() {
        return Err(WaxError::mismatch("matmul", a.shape(), b.shape()));
    }
    let (n, p) = (a.rows(), b.cols());
    let mut out = ComplexMatrix::zeros(n, p);
    for i in 0..n {
        for (k, &aik) in a.row(i).iter().enumerate() {
            if aik == Complex64::new(0.0, 0.0) {
                continue;
            }
            let brow = b.row(k);
            for j in 0..p {
                out[(i, j)] += aik * brow[j];
            }
        }
    }
    Ok(out)
}

/// Conjugate transpose.
pub fn adjoint(a: &ComplexMatrix) -> ComplexMatrix {
    ComplexMatrix::from_fn(a.cols(), a.rows(), |i, j| a[(j, i)].conj())
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (br, bc) = b.shape();
    ComplexMatrix::from_fn(a.rows() * br, a.cols() * bc, |i, j| {
        a[(i / br, j / bc)] * b[(i % br, j % bc)]
    })
}

/// Column-major vectorization into an `(rows·cols) x 1` matrix.
pub fn vec(a: &ComplexMatrix) -> ComplexMatrix {
    let mut v = Vec::with_capacity(a.rows() * a.cols());
    for j in 0..a.cols() {
        for i in 0..a.rows() {
            v.push(a[(i, j)]);
        }
    }
    ComplexMatrix::column(v)
}

/// Inverse of [`vec`]: reshapes a column vector of length `m·n` into `m x n`.
pub fn unvec(v: &ComplexMatrix, m: usize, n: usize) -> Result<ComplexMatrix> {
    if v.cols() != 1 || v.rows() != m * n {
        return Err(WaxError::mismatch("unvec", v.shape(), (m * n, 1)));
    }
    let data = v.as_slice();
    Ok(ComplexMatrix::from_fn(m, n, |i, j| data[j * m + i]))
}
