//! Small dense complex linear-algebra helpers on top of nalgebra.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;

/// Eigenvalues below this are treated as a hard positivity violation.
pub const NEGATIVE_EIGENVALUE_LIMIT: f64 = -1e-9;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

pub fn pauli_x() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO])
}

pub fn pauli_y() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[ZERO, -I, I, ZERO])
}

pub fn pauli_z() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE])
}

pub fn paulis() -> [CMatrix; 3] {
    [pauli_x(), pauli_y(), pauli_z()]
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

pub fn trace(m: &CMatrix) -> C64 {
    m.diagonal().iter().sum()
}

pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

pub fn frobenius(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Largest absolute deviation of `m` from its own adjoint.
pub fn hermiticity_error(m: &CMatrix) -> f64 {
    max_abs_diff(m, &m.adjoint())
}

/// Largest elementwise deviation of `U†U` from the identity.
pub fn unitarity_error(m: &CMatrix) -> f64 {
    let prod = m.adjoint() * m;
    max_abs_diff(&prod, &CMatrix::identity(m.nrows(), m.ncols()))
}

/// Spectral decomposition of a Hermitian matrix.
///
/// The input is symmetrized first so that roundoff asymmetry does not leak
/// into the eigensolver. Eigenvalues are returned in ascending order with the
/// matching eigenvectors as columns.
pub fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let n = m.nrows();
    let sym = (m + m.adjoint()).scale(0.5);
    let eig = sym.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mut vectors = CMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    (values, vectors)
}

/// Clamp eigenvalues in `[NEGATIVE_EIGENVALUE_LIMIT, 0)` to zero; anything
/// lower is an error.
pub fn clamp_nonnegative(values: &mut [f64]) -> Result<()> {
    for v in values.iter_mut() {
        if *v < NEGATIVE_EIGENVALUE_LIMIT {
            return Err(Error::NumericalConsistency(format!(
                "eigenvalue {v:e} below {NEGATIVE_EIGENVALUE_LIMIT:e}"
            )));
        }
        if *v < 0.0 {
            *v = 0.0;
        }
    }
    Ok(())
}

/// Rebuild `V diag(f(λ)) V†`.
pub fn spectral_apply(values: &[f64], vectors: &CMatrix, f: impl Fn(f64) -> f64) -> CMatrix {
    let n = vectors.nrows();
    let mut scaled = vectors.clone();
    for (k, &lambda) in values.iter().enumerate() {
        let w = f(lambda);
        scaled.column_mut(k).scale_mut(w);
    }
    let out = scaled * vectors.adjoint();
    debug_assert_eq!(out.nrows(), n);
    out
}

/// Principal square root of a positive-semidefinite Hermitian matrix.
pub fn psd_sqrt(m: &CMatrix) -> Result<CMatrix> {
    let (mut values, vectors) = hermitian_eigen(m);
    clamp_nonnegative(&mut values)?;
    Ok(spectral_apply(&values, &vectors, f64::sqrt))
}

/// Sum of absolute eigenvalues of a Hermitian matrix.
pub fn trace_norm_hermitian(m: &CMatrix) -> f64 {
    let (values, _) = hermitian_eigen(m);
    values.iter().map(|v| v.abs()).sum()
}

pub fn is_power_of_two_dim(dim: usize) -> Option<usize> {
    if dim >= 2 && dim.is_power_of_two() {
        Some(dim.trailing_zeros() as usize)
    } else {
        None
    }
}
