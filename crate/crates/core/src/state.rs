//! Pure spin states, density matrices and partial traces.
//!
//! Basis convention: spin 1 is the most significant bit of the basis index,
//! so `|η₁ η₂ … η_N⟩` sits at index `Σ ηᵢ · 2^(N−i)`.

use std::fmt::Write as _;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::limits;
use crate::linalg::{self, CMatrix, C64};
use crate::unitary::GlobalUnitary;

/// Allowed deviation of a stored state's norm from 1.
pub const NORM_TOLERANCE: f64 = 1e-10;
/// Allowed deviation of a parsed document's norm from 1.
pub const PARSE_NORM_TOLERANCE: f64 = 1e-8;
/// Hermiticity and trace tolerance for [`DensityMatrix`].
pub const DENSITY_TOLERANCE: f64 = 1e-10;

/// Pure state of `num_spins` spin-½ particles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "StateDoc", into = "StateDoc")]
pub struct SpinState {
    num_spins: usize,
    amplitudes: Vec<C64>,
}

impl SpinState {
    /// Builds a state, checking length and normalization.
    pub fn new(num_spins: usize, amplitudes: Vec<C64>) -> Result<Self> {
        limits::check_storage(num_spins)?;
        let expected = 1usize << num_spins;
        if amplitudes.len() != expected {
            return Err(Error::LengthMismatch {
                num_spins,
                expected,
                found: amplitudes.len(),
            });
        }
        let norm = l2_norm(&amplitudes);
        if !norm.is_finite() || (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::NormViolation {
                norm,
                tolerance: NORM_TOLERANCE,
            });
        }
        Ok(Self {
            num_spins,
            amplitudes,
        })
    }

    /// Builds a state from an arbitrary nonzero vector, rescaling it to unit norm.
    pub fn normalized(num_spins: usize, mut amplitudes: Vec<C64>) -> Result<Self> {
        limits::check_storage(num_spins)?;
        let expected = 1usize << num_spins;
        if amplitudes.len() != expected {
            return Err(Error::LengthMismatch {
                num_spins,
                expected,
                found: amplitudes.len(),
            });
        }
        let norm = l2_norm(&amplitudes);
        if !norm.is_finite() || norm < 1e-300 {
            return Err(Error::InvalidInput("cannot normalize a zero vector".into()));
        }
        for a in amplitudes.iter_mut() {
            *a /= norm;
        }
        Self::new(num_spins, amplitudes)
    }

    /// Computational basis state `|bits[0] bits[1] …⟩`.
    pub fn basis(bits: &[u8]) -> Result<Self> {
        if bits.is_empty() {
            return Err(Error::InvalidInput("basis state needs at least one bit".into()));
        }
        if let Some(b) = bits.iter().find(|&&b| b > 1) {
            return Err(Error::InvalidInput(format!("bit value {b} is not 0 or 1")));
        }
        let n = bits.len();
        limits::check_storage(n)?;
        let index = bits
            .iter()
            .fold(0usize, |acc, &b| (acc << 1) | usize::from(b));
        let mut amplitudes = vec![linalg::ZERO; 1 << n];
        amplitudes[index] = linalg::ONE;
        Self::new(n, amplitudes)
    }

    pub fn num_spins(&self) -> usize {
        self.num_spins
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        l2_norm(&self.amplitudes)
    }

    /// Kronecker product; `self` occupies the more significant bits.
    pub fn tensor(&self, other: &SpinState) -> Result<SpinState> {
        let n = self.num_spins + other.num_spins;
        limits::check_storage(n)?;
        let mut amplitudes = Vec::with_capacity(1 << n);
        for a in &self.amplitudes {
            for b in &other.amplitudes {
                amplitudes.push(a * b);
            }
        }
        SpinState::new(n, amplitudes)
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &SpinState) -> Result<C64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Rank-one projector `|ψ⟩⟨ψ|`.
    pub fn density(&self) -> DensityMatrix {
        let v = DVector::from_column_slice(&self.amplitudes);
        DensityMatrix {
            num_spins: self.num_spins,
            matrix: &v * v.adjoint(),
        }
    }

    /// Reduced state on `spec`, with the retained spins placed in tuple order.
    pub fn reduce(&self, spec: &SubsystemSpec) -> Result<DensityMatrix> {
        spec.check_within(self.num_spins)?;
        let layout = ReductionLayout::new(self.num_spins, spec.indices());
        // Ψ[a, c] = ψ[offset_kept[a] + offset_traced[c]], then ρ = Ψ Ψ†.
        let rows = layout.kept.len();
        let cols = layout.traced.len();
        let psi = CMatrix::from_fn(rows, cols, |a, c| {
            self.amplitudes[layout.kept[a] + layout.traced[c]]
        });
        let matrix = &psi * psi.adjoint();
        Ok(DensityMatrix {
            num_spins: spec.len(),
            matrix,
        })
    }

    /// `U·ψ`.
    pub fn apply(&self, u: &GlobalUnitary) -> Result<SpinState> {
        if u.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: u.dim(),
            });
        }
        let v = DVector::from_column_slice(&self.amplitudes);
        let out = u.matrix() * v;
        SpinState::new(self.num_spins, out.iter().copied().collect())
            .map_err(|e| Error::NumericalConsistency(format!("unitary action broke normalization: {e}")))
    }

    /// Multiplies by a global phase so that the first amplitude of largest
    /// magnitude is real and nonnegative.
    pub fn phase_fixed(&self) -> SpinState {
        let mut best = 0;
        let mut best_mag = -1.0;
        for (k, a) in self.amplitudes.iter().enumerate() {
            let m = a.norm();
            if m > best_mag {
                best_mag = m;
                best = k;
            }
        }
        let pivot = self.amplitudes[best];
        if pivot.norm() == 0.0 {
            return self.clone();
        }
        let phase = pivot.conj() / pivot.norm();
        let mut amplitudes: Vec<C64> = self.amplitudes.iter().map(|a| a * phase).collect();
        amplitudes[best] = C64::new(amplitudes[best].norm(), 0.0);
        SpinState {
            num_spins: self.num_spins,
            amplitudes,
        }
    }

    /// State document: `{"num_spins": N, "amplitudes": [[re, im], ...]}` with
    /// every component written to 17 significant digits.
    pub fn to_json(&self) -> String {
        let mut out = String::with_capacity(48 * self.amplitudes.len() + 32);
        let _ = write!(out, "{{\"num_spins\": {}, \"amplitudes\": [", self.num_spins);
        for (k, a) in self.amplitudes.iter().enumerate() {
            if k > 0 {
                out.push_str(", ");
            }
            let _ = write!(out, "[{:.16e}, {:.16e}]", a.re, a.im);
        }
        out.push_str("]}");
        out
    }

    /// Inverse of [`SpinState::to_json`].
    pub fn from_json(text: &str) -> Result<SpinState> {
        let doc: serde_json::Value =
            serde_json::from_str(text).map_err(|e| Error::MalformedDocument(e.to_string()))?;
        Self::from_json_value(&doc)
    }

    pub fn from_json_value(doc: &serde_json::Value) -> Result<SpinState> {
        let obj = doc
            .as_object()
            .ok_or_else(|| Error::MalformedDocument("state document must be an object".into()))?;
        let num_spins = obj
            .get("num_spins")
            .and_then(|v| v.as_u64())
            .ok_or_else(|| Error::MalformedDocument("`num_spins` must be a positive integer".into()))?
            as usize;
        let raw = obj
            .get("amplitudes")
            .and_then(|v| v.as_array())
            .ok_or_else(|| Error::MalformedDocument("`amplitudes` must be an array".into()))?;
        let mut amplitudes = Vec::with_capacity(raw.len());
        for (k, entry) in raw.iter().enumerate() {
            let pair = entry.as_array().filter(|p| p.len() == 2).ok_or_else(|| {
                Error::MalformedDocument(format!("amplitude {k} must be a [re, im] pair"))
            })?;
            match (pair[0].as_f64(), pair[1].as_f64()) {
                (Some(re), Some(im)) => amplitudes.push([re, im]),
                _ => {
                    return Err(Error::MalformedDocument(format!(
                        "amplitude {k} has non-numeric components"
                    )))
                }
            }
        }
        SpinState::try_from(StateDoc {
            num_spins,
            amplitudes,
        })
    }
}

#[derive(Serialize, Deserialize)]
struct StateDoc {
    num_spins: usize,
    amplitudes: Vec<[f64; 2]>,
}

impl From<SpinState> for StateDoc {
    fn from(s: SpinState) -> Self {
        StateDoc {
            num_spins: s.num_spins,
            amplitudes: s.amplitudes.iter().map(|a| [a.re, a.im]).collect(),
        }
    }
}

impl TryFrom<StateDoc> for SpinState {
    type Error = Error;

    /// Accepts norms within the parse tolerance and renormalizes them.
    fn try_from(doc: StateDoc) -> Result<SpinState> {
        let num_spins = doc.num_spins;
        if num_spins == 0 {
            return Err(Error::MalformedDocument("`num_spins` must be positive".into()));
        }
        limits::check_storage(num_spins)?;
        let amplitudes: Vec<C64> = doc.amplitudes.iter().map(|p| C64::new(p[0], p[1])).collect();
        let expected = 1usize << num_spins;
        if amplitudes.len() != expected {
            return Err(Error::LengthMismatch {
                num_spins,
                expected,
                found: amplitudes.len(),
            });
        }
        let norm = l2_norm(&amplitudes);
        if !norm.is_finite() || (norm - 1.0).abs() > PARSE_NORM_TOLERANCE {
            return Err(Error::NormViolation {
                norm,
                tolerance: PARSE_NORM_TOLERANCE,
            });
        }
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return SpinState::normalized(num_spins, amplitudes);
        }
        SpinState::new(num_spins, amplitudes)
    }
}

fn l2_norm(v: &[C64]) -> f64 {
    v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
}

/// Index offsets for splitting a basis index into retained and traced parts.
struct ReductionLayout {
    /// `kept[a]` is the contribution of retained-bit pattern `a` to the full index.
    kept: Vec<usize>,
    traced: Vec<usize>,
}

impl ReductionLayout {
    fn new(num_spins: usize, keep: &[usize]) -> Self {
        let k = keep.len();
        let shift = |spin: usize| num_spins - spin;
        let kept = (0..1usize << k)
            .map(|a| {
                keep.iter().enumerate().fold(0, |acc, (pos, &spin)| {
                    let bit = (a >> (k - 1 - pos)) & 1;
                    acc | (bit << shift(spin))
                })
            })
            .collect();
        let rest: Vec<usize> = (1..=num_spins).filter(|s| !keep.contains(s)).collect();
        let r = rest.len();
        let traced = (0..1usize << r)
            .map(|c| {
                rest.iter().enumerate().fold(0, |acc, (pos, &spin)| {
                    let bit = (c >> (r - 1 - pos)) & 1;
                    acc | (bit << shift(spin))
                })
            })
            .collect();
        Self { kept, traced }
    }
}

/// Hermitian, unit-trace, positive-semidefinite operator on `num_spins` spins.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DensityDoc", into = "DensityDoc")]
pub struct DensityMatrix {
    num_spins: usize,
    matrix: CMatrix,
}

impl DensityMatrix {
    /// Validates all density-matrix invariants.
    pub fn new(matrix: CMatrix) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::InvalidInput("density matrix must be square".into()));
        }
        let num_spins = linalg::is_power_of_two_dim(matrix.nrows()).ok_or_else(|| {
            Error::InvalidInput(format!(
                "dimension {} is not a power of two >= 2",
                matrix.nrows()
            ))
        })?;
        let dm = Self { num_spins, matrix };
        dm.validate()?;
        Ok(dm)
    }

    /// Checks Hermiticity, unit trace and positivity.
    pub fn validate(&self) -> Result<()> {
        let herm = linalg::hermiticity_error(&self.matrix);
        if herm > DENSITY_TOLERANCE {
            return Err(Error::InvalidInput(format!(
                "matrix is not Hermitian (deviation {herm:e})"
            )));
        }
        let tr = linalg::trace(&self.matrix);
        if (tr.re - 1.0).abs() > DENSITY_TOLERANCE || tr.im.abs() > DENSITY_TOLERANCE {
            return Err(Error::InvalidInput(format!("trace {tr} is not 1")));
        }
        let min = self.min_eigenvalue();
        if min < linalg::NEGATIVE_EIGENVALUE_LIMIT {
            return Err(Error::InvalidInput(format!(
                "smallest eigenvalue {min:e} is negative"
            )));
        }
        Ok(())
    }

    /// Maximally mixed state on `num_spins` spins.
    pub fn maximally_mixed(num_spins: usize) -> Result<Self> {
        limits::check_storage(num_spins)?;
        let d = 1usize << num_spins;
        Ok(Self {
            num_spins,
            matrix: CMatrix::identity(d, d).scale(1.0 / d as f64),
        })
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

    pub fn trace(&self) -> C64 {
        linalg::trace(&self.matrix)
    }

    /// `Tr[ρ²]`.
    pub fn purity(&self) -> f64 {
        self.matrix.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        linalg::hermitian_eigen(&self.matrix).0
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues().first().copied().unwrap_or(0.0)
    }

    /// `U ρ U†` for a unitary of matching dimension.
    pub fn conjugate(&self, u: &CMatrix) -> Result<DensityMatrix> {
        if u.nrows() != self.dim() || u.ncols() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: u.nrows(),
            });
        }
        Ok(Self {
            num_spins: self.num_spins,
            matrix: u * &self.matrix * u.adjoint(),
        })
    }

    /// Partial trace keeping `keep` (1-based positions within this operator,
    /// in the order the result should carry them).
    pub fn partial_trace(&self, keep: &SubsystemSpec) -> Result<DensityMatrix> {
        keep.check_within(self.num_spins)?;
        let layout = ReductionLayout::new(self.num_spins, keep.indices());
        let d = layout.kept.len();
        let matrix = CMatrix::from_fn(d, d, |a, b| {
            layout
                .traced
                .iter()
                .map(|&c| self.matrix[(layout.kept[a] + c, layout.kept[b] + c)])
                .sum()
        });
        Ok(DensityMatrix {
            num_spins: keep.len(),
            matrix,
        })
    }
}

/// Row-major `[re, im]` entries.
#[derive(Serialize, Deserialize)]
struct DensityDoc {
    num_spins: usize,
    matrix: Vec<Vec<[f64; 2]>>,
}

impl From<DensityMatrix> for DensityDoc {
    fn from(d: DensityMatrix) -> Self {
        let m = &d.matrix;
        DensityDoc {
            num_spins: d.num_spins,
            matrix: (0..m.nrows())
                .map(|r| (0..m.ncols()).map(|c| [m[(r, c)].re, m[(r, c)].im]).collect())
                .collect(),
        }
    }
}

impl TryFrom<DensityDoc> for DensityMatrix {
    type Error = Error;

    fn try_from(doc: DensityDoc) -> Result<DensityMatrix> {
        let d = doc.matrix.len();
        if doc.matrix.iter().any(|row| row.len() != d) {
            return Err(Error::MalformedDocument("density matrix rows must be square".into()));
        }
        let m = CMatrix::from_fn(d, d, |r, c| C64::new(doc.matrix[r][c][0], doc.matrix[r][c][1]));
        let dm = DensityMatrix::new(m)?;
        if dm.num_spins != doc.num_spins {
            return Err(Error::DimensionMismatch {
                expected: 1 << doc.num_spins.min(limits::HARD_MAX_SPINS),
                found: d,
            });
        }
        Ok(dm)
    }
}

/// Ordered tuple of distinct 1-based spin indices.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct SubsystemSpec(Vec<usize>);

impl SubsystemSpec {
    pub fn new(indices: Vec<usize>) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::InvalidInput("subsystem must contain at least one spin".into()));
        }
        if indices.contains(&0) {
            return Err(Error::InvalidInput("spin indices are 1-based".into()));
        }
        for (k, i) in indices.iter().enumerate() {
            if indices[..k].contains(i) {
                return Err(Error::InvalidInput(format!("spin {i} repeated in subsystem")));
            }
        }
        Ok(Self(indices))
    }

    pub fn single(index: usize) -> Result<Self> {
        Self::new(vec![index])
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, spin: usize) -> bool {
        self.0.contains(&spin)
    }

    /// 0-based position of `spin` within the tuple.
    pub fn position(&self, spin: usize) -> Option<usize> {
        self.0.iter().position(|&s| s == spin)
    }

    pub fn overlaps(&self, other: &SubsystemSpec) -> bool {
        self.0.iter().any(|s| other.contains(*s))
    }

    pub fn check_within(&self, num_spins: usize) -> Result<()> {
        if let Some(&bad) = self.0.iter().find(|&&s| s > num_spins) {
            return Err(Error::InvalidInput(format!(
                "spin {bad} out of range for a {num_spins}-spin state"
            )));
        }
        Ok(())
    }

    /// Relabels every index through `perm` (`perm[i-1]` is the image of spin `i`).
    pub fn relabeled(&self, perm: &[usize]) -> SubsystemSpec {
        SubsystemSpec(self.0.iter().map(|&s| perm[s - 1]).collect())
    }
}

impl TryFrom<Vec<usize>> for SubsystemSpec {
    type Error = Error;
    fn try_from(v: Vec<usize>) -> Result<Self> {
        SubsystemSpec::new(v)
    }
}

impl From<SubsystemSpec> for Vec<usize> {
    fn from(s: SubsystemSpec) -> Self {
        s.0
    }
}

impl std::fmt::Display for SubsystemSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "(")?;
        for (k, s) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{s}")?;
        }
        write!(f, ")")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs_diff;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn plus() -> SpinState {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        SpinState::new(1, vec![c(h), c(h)]).unwrap()
    }

    #[test]
    fn basis_indices() {
        assert_eq!(SpinState::basis(&[0]).unwrap().amplitudes(), &[c(1.0), c(0.0)]);
        let s = SpinState::basis(&[0, 1]).unwrap();
        assert_eq!(s.amplitudes()[1], c(1.0));
        assert_eq!(s.dim(), 4);
        let s = SpinState::basis(&[1, 1, 1]).unwrap();
        assert_eq!(s.amplitudes()[7], c(1.0));
        assert!(SpinState::basis(&[]).is_err());
        assert!(SpinState::basis(&[2]).is_err());
    }

    #[test]
    fn tensor_products() {
        let zero = SpinState::basis(&[0]).unwrap();
        let one = SpinState::basis(&[1]).unwrap();
        assert_eq!(zero.tensor(&one).unwrap(), SpinState::basis(&[0, 1]).unwrap());
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let t = plus().tensor(&zero).unwrap();
        assert_eq!(t.amplitudes(), &[c(h), c(0.0), c(h), c(0.0)]);
    }

    #[test]
    fn empty_state_rejected() {
        assert!(SpinState::new(0, vec![c(1.0)]).is_err());
    }

    #[test]
    fn density_examples() {
        let rho = SpinState::basis(&[0]).unwrap().density();
        assert_eq!(rho.matrix()[(0, 0)], c(1.0));
        assert_eq!(rho.matrix()[(1, 1)], c(0.0));
        let rho = plus().density();
        for z in rho.matrix().iter() {
            assert!((z - c(0.5)).norm() < 1e-15);
        }
        assert!((rho.purity() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn bell_marginal_is_maximally_mixed() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let bell = SpinState::new(2, vec![c(h), c(0.0), c(0.0), c(h)]).unwrap();
        let r = bell.reduce(&SubsystemSpec::single(1).unwrap()).unwrap();
        let mm = DensityMatrix::maximally_mixed(1).unwrap();
        assert!(max_abs_diff(r.matrix(), mm.matrix()) < 1e-15);
    }

    #[test]
    fn reduce_reorders_product_state() {
        let zero = SpinState::basis(&[0]).unwrap();
        let s = zero.tensor(&plus()).unwrap();
        let r = s.reduce(&SubsystemSpec::new(vec![2, 1]).unwrap()).unwrap();
        let expected = plus().tensor(&zero).unwrap().density();
        assert!(max_abs_diff(r.matrix(), expected.matrix()) < 1e-15);
    }

    #[test]
    fn reduce_rejects_bad_specs() {
        let s = SpinState::basis(&[0, 0]).unwrap();
        assert!(s.reduce(&SubsystemSpec::single(3).unwrap()).is_err());
        assert!(SubsystemSpec::new(vec![1, 1]).is_err());
        assert!(SubsystemSpec::new(vec![0]).is_err());
        assert!(SubsystemSpec::new(vec![]).is_err());
    }

    #[test]
    fn json_round_trip_and_errors() {
        let s = plus().tensor(&SpinState::basis(&[1]).unwrap()).unwrap();
        let text = s.to_json();
        assert_eq!(SpinState::from_json(&text).unwrap(), s);

        let three = r#"{"num_spins": 2, "amplitudes": [[1,0],[0,0],[0,0]]}"#;
        assert!(matches!(
            SpinState::from_json(three),
            Err(Error::LengthMismatch { found: 3, .. })
        ));
        let half = r#"{"num_spins": 1, "amplitudes": [[0.5,0],[0,0]]}"#;
        assert!(matches!(SpinState::from_json(half), Err(Error::NormViolation { .. })));
        assert!(matches!(
            SpinState::from_json("{not json"),
            Err(Error::MalformedDocument(_))
        ));
        assert!(matches!(
            SpinState::from_json(r#"{"num_spins": 1, "amplitudes": [1, 0]}"#),
            Err(Error::MalformedDocument(_))
        ));
    }

    #[test]
    fn density_matrix_validation() {
        assert!(DensityMatrix::new(linalg::pauli_z()).is_err());
        assert!(DensityMatrix::new(CMatrix::identity(2, 2)).is_err());
        assert!(DensityMatrix::new(CMatrix::identity(3, 3).scale(1.0 / 3.0)).is_err());
        assert!(DensityMatrix::new(CMatrix::identity(2, 2).scale(0.5)).is_ok());
    }

    #[test]
    fn phase_fixing() {
        let s = SpinState::new(1, vec![C64::new(0.0, 0.6), C64::new(-0.8, 0.0)]).unwrap();
        let f = s.phase_fixed();
        assert!((f.amplitudes()[1] - c(0.8)).norm() < 1e-15);
        assert!(f.amplitudes()[1].im == 0.0);
        assert!((f.amplitudes()[0].norm() - 0.6).abs() < 1e-15);
    }
}
