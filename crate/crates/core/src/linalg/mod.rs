//! Dense linear-algebra kernels for Hermitian matrices.
//!
//! Two independent eigenvalue routes are provided on purpose: the
//! production path reduces to real tridiagonal form (Householder) and runs
//! implicit-shift QL, while [`hermitian_eigen`] is a cyclic Jacobi solver
//! that also produces eigenvectors. The SVD is a one-sided Jacobi. The
//! routes share no code, so they can be used to cross-check each other.

mod eigen;
mod svd;

pub use eigen::{hermitian_eigen, hermitian_eigenvalues};
pub use svd::svd;

use crate::scalar::Scalar;
use ndarray::Array2;
use num_complex::Complex;

/// Conjugate transpose.
pub fn adjoint<T: Scalar>(m: &Array2<Complex<T>>) -> Array2<Complex<T>> {
    m.t().mapv(|z| z.conj())
}

/// Largest entry magnitude.
pub fn max_abs<T: Scalar>(m: &Array2<Complex<T>>) -> T {
    m.iter().fold(T::zero(), |acc, z| {
        let a = z.re.abs().max(z.im.abs());
        acc.max(a)
    })
}

/// Identity matrix with complex entries.
pub fn eye<T: Scalar>(n: usize) -> Array2<Complex<T>> {
    let mut m = Array2::zeros((n, n));
    for i in 0..n {
        m[[i, i]] = Complex::new(T::one(), T::zero());
    }
    m
}
