//! Unitary operator types: one-spin U(2) elements, full-register unitaries and
//! proper 3D rotations.

use nalgebra::Matrix3;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::limits;
use crate::linalg::{self, CMatrix, C64};

pub const SINGLE_SPIN_UNITARITY_TOLERANCE: f64 = 1e-10;
pub const ROTATION_TOLERANCE: f64 = 1e-10;

/// Euler-ZYZ chart parameters: `e^{iφ} R_z(θ₁) R_y(θ₂) R_z(θ₃)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct U2Params {
    pub phase: f64,
    pub theta1: f64,
    pub theta2: f64,
    pub theta3: f64,
}

impl U2Params {
    pub fn as_array(&self) -> [f64; 4] {
        [self.phase, self.theta1, self.theta2, self.theta3]
    }

    pub fn from_slice(p: &[f64]) -> Self {
        Self {
            phase: p[0],
            theta1: p[1],
            theta2: p[2],
            theta3: p[3],
        }
    }
}

/// Element of U(2) acting on a single spin.
#[derive(Debug, Clone, PartialEq)]
pub struct SingleSpinUnitary {
    matrix: CMatrix,
    params: Option<U2Params>,
}

impl SingleSpinUnitary {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        if matrix.nrows() != 2 || matrix.ncols() != 2 {
            return Err(Error::UnsupportedDimension(matrix.nrows()));
        }
        let err = linalg::unitarity_error(&matrix);
        if err > SINGLE_SPIN_UNITARITY_TOLERANCE {
            return Err(Error::InvalidInput(format!(
                "matrix is not unitary (deviation {err:e})"
            )));
        }
        Ok(Self {
            matrix,
            params: None,
        })
    }

    pub fn identity() -> Self {
        Self {
            matrix: CMatrix::identity(2, 2),
            params: Some(U2Params {
                phase: 0.0,
                theta1: 0.0,
                theta2: 0.0,
                theta3: 0.0,
            }),
        }
    }

    pub fn from_params(p: U2Params) -> Self {
        let rz = |t: f64| {
            CMatrix::from_row_slice(
                2,
                2,
                &[
                    C64::from_polar(1.0, -t / 2.0),
                    linalg::ZERO,
                    linalg::ZERO,
                    C64::from_polar(1.0, t / 2.0),
                ],
            )
        };
        let (s, c) = (p.theta2 / 2.0).sin_cos();
        let ry = CMatrix::from_row_slice(
            2,
            2,
            &[C64::new(c, 0.0), C64::new(-s, 0.0), C64::new(s, 0.0), C64::new(c, 0.0)],
        );
        let matrix = (rz(p.theta1) * ry * rz(p.theta3)).map(|z| z * C64::from_polar(1.0, p.phase));
        Self {
            matrix,
            params: Some(p),
        }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn params(&self) -> Option<U2Params> {
        self.params
    }

    pub fn compose(&self, other: &SingleSpinUnitary) -> SingleSpinUnitary {
        SingleSpinUnitary {
            matrix: &self.matrix * &other.matrix,
            params: None,
        }
    }

    pub fn adjoint(&self) -> SingleSpinUnitary {
        SingleSpinUnitary {
            matrix: self.matrix.adjoint(),
            params: None,
        }
    }

    pub fn with_phase(&self, gamma: f64) -> SingleSpinUnitary {
        let ph = C64::from_polar(1.0, gamma);
        SingleSpinUnitary {
            matrix: self.matrix.map(|z| z * ph),
            params: self.params.map(|p| U2Params {
                phase: p.phase + gamma,
                ..p
            }),
        }
    }

    /// Row-major `[[re, im]; 4]` form used in JSON documents.
    pub fn to_pairs(&self) -> Vec<[f64; 2]> {
        matrix_to_pairs(&self.matrix)
    }

    pub fn from_pairs(pairs: &[[f64; 2]]) -> Result<Self> {
        Self::new(matrix_from_pairs(pairs)?)
    }
}

/// Unitary on the full `2^N`-dimensional register.
#[derive(Debug, Clone, PartialEq)]
pub struct GlobalUnitary {
    num_spins: usize,
    matrix: CMatrix,
}

impl GlobalUnitary {
    /// Unitarity tolerance scaled mildly with dimension.
    pub fn tolerance(dim: usize) -> f64 {
        1e-9 * (dim as f64 / 16.0).max(1.0).sqrt()
    }

    pub fn new(matrix: CMatrix) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::InvalidInput("unitary must be square".into()));
        }
        let num_spins = linalg::is_power_of_two_dim(matrix.nrows()).ok_or_else(|| {
            Error::InvalidInput(format!(
                "dimension {} is not a power of two >= 2",
                matrix.nrows()
            ))
        })?;
        limits::check_storage(num_spins)?;
        let err = linalg::unitarity_error(&matrix);
        let tol = Self::tolerance(matrix.nrows());
        if err > tol {
            return Err(Error::InvalidInput(format!(
                "matrix is not unitary (deviation {err:e} > {tol:e})"
            )));
        }
        Ok(Self { num_spins, matrix })
    }

    pub(crate) fn from_trusted(num_spins: usize, matrix: CMatrix) -> Self {
        debug_assert_eq!(matrix.nrows(), 1 << num_spins);
        Self { num_spins, matrix }
    }

    pub fn identity(num_spins: usize) -> Result<Self> {
        limits::check_storage(num_spins)?;
        let d = 1 << num_spins;
        Ok(Self {
            num_spins,
            matrix: CMatrix::identity(d, d),
        })
    }

    /// Permutation unitary sending basis index `k` to `image[k]`.
    pub fn from_permutation(num_spins: usize, image: &[usize]) -> Result<Self> {
        limits::check_storage(num_spins)?;
        let d = 1usize << num_spins;
        if image.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: image.len(),
            });
        }
        let mut seen = vec![false; d];
        for &t in image {
            if t >= d || seen[t] {
                return Err(Error::InvalidInput("image is not a permutation".into()));
            }
            seen[t] = true;
        }
        let mut matrix = CMatrix::zeros(d, d);
        for (src, &dst) in image.iter().enumerate() {
            matrix[(dst, src)] = linalg::ONE;
        }
        Ok(Self { num_spins, matrix })
    }

    /// Unitary that moves spin `i` to position `perm[i-1]`.
    pub fn spin_permutation(perm: &[usize]) -> Result<Self> {
        let n = perm.len();
        limits::check_storage(n)?;
        let mut sorted = perm.to_vec();
        sorted.sort_unstable();
        if sorted != (1..=n).collect::<Vec<_>>() {
            return Err(Error::InvalidInput("not a permutation of 1..=N".into()));
        }
        let image: Vec<usize> = (0..1usize << n)
            .map(|idx| {
                (1..=n).fold(0usize, |acc, spin| {
                    let bit = (idx >> (n - spin)) & 1;
                    acc | (bit << (n - perm[spin - 1]))
                })
            })
            .collect();
        Self::from_permutation(n, &image)
    }

    pub fn num_spins(&self) -> usize {
        self.num_spins
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn compose(&self, other: &GlobalUnitary) -> Result<GlobalUnitary> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(GlobalUnitary {
            num_spins: self.num_spins,
            matrix: &self.matrix * &other.matrix,
        })
    }

    pub fn adjoint(&self) -> GlobalUnitary {
        GlobalUnitary {
            num_spins: self.num_spins,
            matrix: self.matrix.adjoint(),
        }
    }

    pub fn with_phase(&self, gamma: f64) -> GlobalUnitary {
        let ph = C64::from_polar(1.0, gamma);
        GlobalUnitary {
            num_spins: self.num_spins,
            matrix: self.matrix.map(|z| z * ph),
        }
    }

    /// Exactly one unit entry per row and column, zeros elsewhere.
    pub fn is_permutation(&self) -> bool {
        let d = self.dim();
        let mut col_hits = vec![0usize; d];
        for r in 0..d {
            let mut hits = 0;
            for (c, col) in col_hits.iter_mut().enumerate() {
                let z = self.matrix[(r, c)];
                if z == linalg::ONE {
                    hits += 1;
                    *col += 1;
                } else if z != linalg::ZERO {
                    return false;
                }
            }
            if hits != 1 {
                return false;
            }
        }
        col_hits.iter().all(|&h| h == 1)
    }

    pub fn to_pairs(&self) -> Vec<[f64; 2]> {
        matrix_to_pairs(&self.matrix)
    }

    pub fn from_pairs(pairs: &[[f64; 2]]) -> Result<Self> {
        Self::new(matrix_from_pairs(pairs)?)
    }
}

/// Proper rotation of 3D space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rotation3(Matrix3<f64>);

impl Rotation3 {
    pub fn new(m: Matrix3<f64>) -> Result<Self> {
        let orth = (m.transpose() * m - Matrix3::identity()).abs().max();
        if orth > ROTATION_TOLERANCE {
            return Err(Error::NumericalConsistency(format!(
                "matrix is not orthogonal (deviation {orth:e})"
            )));
        }
        let det = m.determinant();
        if (det - 1.0).abs() > ROTATION_TOLERANCE {
            return Err(Error::NumericalConsistency(format!("determinant {det} is not 1")));
        }
        Ok(Self(m))
    }

    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.0
    }

    pub fn apply(&self, v: [f64; 3]) -> [f64; 3] {
        let r = self.0 * nalgebra::Vector3::new(v[0], v[1], v[2]);
        [r[0], r[1], r[2]]
    }

    pub fn orthogonality_error(&self) -> f64 {
        (self.0.transpose() * self.0 - Matrix3::identity()).abs().max()
    }

    pub fn determinant(&self) -> f64 {
        self.0.determinant()
    }
}

fn matrix_to_pairs(m: &CMatrix) -> Vec<[f64; 2]> {
    let mut out = Vec::with_capacity(m.len());
    for r in 0..m.nrows() {
        for c in 0..m.ncols() {
            let z = m[(r, c)];
            out.push([z.re, z.im]);
        }
    }
    out
}

fn matrix_from_pairs(pairs: &[[f64; 2]]) -> Result<CMatrix> {
    let d = (pairs.len() as f64).sqrt().round() as usize;
    if d * d != pairs.len() || d == 0 {
        return Err(Error::InvalidInput(format!(
            "{} entries do not form a square matrix",
            pairs.len()
        )));
    }
    let data: Vec<C64> = pairs.iter().map(|p| C64::new(p[0], p[1])).collect();
    Ok(CMatrix::from_row_slice(d, d, &data))
}
