//! Distinguishability measures between density matrices.
//!
//! [`fidelity`] uses the square-root (Uhlmann) convention `Tr√(√ρ σ √ρ)`,
//! which equals `|⟨a|b⟩|` on pure inputs. [`fidelity_squared`] is its square.
//! Anything that reports fidelities takes an explicit [`Convention`].

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};
use crate::optim::{nelder_mead, NelderMeadConfig};
use crate::state::DensityMatrix;

/// Which power of the Uhlmann fidelity a number is reported in.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Convention {
    /// `Tr√(√ρ σ √ρ)`; pure states give `|⟨a|b⟩|`.
    #[default]
    Sqrt,
    /// The square of the above; pure states give `|⟨a|b⟩|²`.
    Squared,
}

impl Convention {
    /// Converts a square-root-convention value into this convention.
    pub fn from_sqrt(self, f: f64) -> f64 {
        match self {
            Convention::Sqrt => f,
            Convention::Squared => f * f,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Convention::Sqrt => "sqrt",
            Convention::Squared => "squared",
        }
    }
}

impl std::str::FromStr for Convention {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sqrt" => Ok(Convention::Sqrt),
            "squared" => Ok(Convention::Squared),
            other => Err(Error::InvalidInput(format!(
                "unknown convention `{other}` (expected sqrt or squared)"
            ))),
        }
    }
}

fn check_dims(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<()> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            found: sigma.dim(),
        });
    }
    Ok(())
}

fn rank_cutoff(dim: usize) -> f64 {
    1e-14 * (dim as f64).max(10.0)
}

struct Spectrum {
    values: Vec<f64>,
    vectors: CMatrix,
}

fn spectrum(m: &CMatrix) -> Result<Spectrum> {
    let (mut values, vectors) = linalg::hermitian_eigen(m);
    linalg::clamp_nonnegative(&mut values)?;
    Ok(Spectrum { values, vectors })
}

impl Spectrum {
    /// `A = [√λₖ eₖ]` over the support, so that `ρ = A A†`.
    fn factor(&self) -> Result<CMatrix> {
        let d = self.vectors.nrows();
        let cut = rank_cutoff(d);
        let support: Vec<usize> = (0..self.values.len())
            .filter(|&k| self.values[k] > cut)
            .collect();
        if support.is_empty() {
            return Err(Error::NumericalConsistency("density matrix has no support".into()));
        }
        Ok(DMatrix::from_fn(d, support.len(), |r, c| {
            let k = support[c];
            self.vectors[(r, k)] * self.values[k].sqrt()
        }))
    }
}

fn nuclear_norm(m: &CMatrix) -> f64 {
    m.clone().svd(false, false).singular_values.iter().sum()
}

/// Uhlmann fidelity in the square-root convention.
///
/// Computed as the trace norm `‖A†B‖₁` for factorizations `ρ = AA†`,
/// `σ = BB†` over the supports. Singular values move by at most the size of a
/// perturbation, so nearly orthogonal inputs give values near zero instead of
/// square roots of roundoff.
pub fn fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    check_dims(rho, sigma)?;
    let a = spectrum(rho.matrix())?.factor()?;
    let b = spectrum(sigma.matrix())?.factor()?;
    let x = nuclear_norm(&(a.adjoint() * &b));
    let y = nuclear_norm(&(b.adjoint() * &a));
    // Averaging both orders makes the result exactly symmetric.
    Ok((0.5 * (x + y)).clamp(0.0, 1.0))
}

pub fn fidelity_squared(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    fidelity(rho, sigma).map(|f| f * f)
}

pub fn fidelity_in(rho: &DensityMatrix, sigma: &DensityMatrix, convention: Convention) -> Result<f64> {
    fidelity(rho, sigma).map(|f| convention.from_sqrt(f))
}

/// `½‖ρ − σ‖₁`.
pub fn trace_distance(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    check_dims(rho, sigma)?;
    let diff = rho.matrix() - sigma.matrix();
    Ok(0.5 * linalg::trace_norm_hermitian(&diff))
}

/// Optimal single-copy discrimination measurement for priors `(p, 1−p)`.
#[derive(Debug, Clone, PartialEq)]
pub struct HelstromMeasurement {
    /// Minimum error probability `½(1 − ‖pρ − (1−p)σ‖₁)`.
    pub error: f64,
    /// Projector onto the nonnegative eigenspace of `pρ − (1−p)σ` (guess A).
    pub projector_a: CMatrix,
    /// Projector onto the negative eigenspace (guess B).
    pub projector_b: CMatrix,
}

/// Eigenvalues of `pρ − (1−p)σ` with magnitude at or below this count as zero
/// and are assigned to the A projector.
pub const HELSTROM_ZERO: f64 = 1e-12;

pub fn helstrom(rho: &DensityMatrix, sigma: &DensityMatrix, p: f64) -> Result<HelstromMeasurement> {
    check_dims(rho, sigma)?;
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidInput(format!("prior {p} must lie in (0, 1)")));
    }
    let delta = rho.matrix().scale(p) - sigma.matrix().scale(1.0 - p);
    let (values, vectors) = linalg::hermitian_eigen(&delta);
    let norm1: f64 = values.iter().map(|v| v.abs()).sum();
    let error = (0.5 * (1.0 - norm1)).max(0.0);
    let projector_a = linalg::spectral_apply(&values, &vectors, |v| {
        if v >= -HELSTROM_ZERO {
            1.0
        } else {
            0.0
        }
    });
    let d = rho.dim();
    let projector_b = CMatrix::identity(d, d) - &projector_a;
    Ok(HelstromMeasurement {
        error,
        projector_a,
        projector_b,
    })
}

pub fn helstrom_error(rho: &DensityMatrix, sigma: &DensityMatrix, p: f64) -> Result<f64> {
    helstrom(rho, sigma, p).map(|h| h.error)
}

/// Positive operator-valued measure.
#[derive(Debug, Clone, PartialEq)]
pub struct Povm {
    elements: Vec<CMatrix>,
}

pub const POVM_TOLERANCE: f64 = 1e-10;

impl Povm {
    pub fn new(elements: Vec<CMatrix>) -> Result<Self> {
        let first = elements
            .first()
            .ok_or_else(|| Error::InvalidInput("POVM needs at least one element".into()))?;
        let d = first.nrows();
        let mut total = CMatrix::zeros(d, d);
        for e in &elements {
            if e.nrows() != d || e.ncols() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: e.nrows(),
                });
            }
            if linalg::hermiticity_error(e) > POVM_TOLERANCE {
                return Err(Error::InvalidInput("POVM element is not Hermitian".into()));
            }
            let (vals, _) = linalg::hermitian_eigen(e);
            if vals.first().copied().unwrap_or(0.0) < -POVM_TOLERANCE {
                return Err(Error::InvalidInput("POVM element is not positive".into()));
            }
            total += e;
        }
        if linalg::max_abs_diff(&total, &CMatrix::identity(d, d)) > POVM_TOLERANCE {
            return Err(Error::InvalidInput("POVM elements do not sum to identity".into()));
        }
        Ok(Self { elements })
    }

    /// `{P(n), I − P(n)}` with `P(n) = (I + n·σ)/2` for a unit axis `n`.
    pub fn qubit_projective(axis: [f64; 3]) -> Result<Self> {
        let len = (axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]).sqrt();
        if (len - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidInput("measurement axis must be a unit vector".into()));
        }
        let p = projector_along(axis);
        let q = CMatrix::identity(2, 2) - &p;
        Self::new(vec![p, q])
    }

    pub fn elements(&self) -> &[CMatrix] {
        &self.elements
    }

    /// `Σₖ √(Tr[ρFₖ] Tr[σFₖ])`, the quantity minimized in the POVM form of the fidelity.
    pub fn bhattacharyya(&self, rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
        check_dims(rho, sigma)?;
        if self.elements[0].nrows() != rho.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.elements[0].nrows(),
                found: rho.dim(),
            });
        }
        Ok(self
            .elements
            .iter()
            .map(|f| {
                let a = linalg::trace(&(rho.matrix() * f)).re.max(0.0);
                let b = linalg::trace(&(sigma.matrix() * f)).re.max(0.0);
                (a * b).sqrt()
            })
            .sum())
    }
}

fn projector_along(n: [f64; 3]) -> CMatrix {
    let [x, y, z] = linalg::paulis();
    (CMatrix::identity(2, 2) + x.scale(n[0]) + y.scale(n[1]) + z.scale(n[2])).scale(0.5)
}

/// Deterministic near-uniform point set on the unit sphere.
pub fn fibonacci_sphere(count: usize) -> Vec<[f64; 3]> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..count)
        .map(|i| {
            let t = i as f64 + 0.5;
            let z = 1.0 - 2.0 * t / count as f64;
            let r = (1.0 - z * z).max(0.0).sqrt();
            let phi = golden * t;
            [r * phi.cos(), r * phi.sin(), z]
        })
        .collect()
}

/// `1 ± r·n` for a unit axis `n`, written as `½(|r ± n|² + 1 − |r|²)` so
/// that values near zero keep their relative precision.
fn one_plus_dot(r: &[f64; 3], n: &[f64; 3], sign: f64) -> f64 {
    let d2: f64 = (0..3).map(|i| (r[i] + sign * n[i]).powi(2)).sum();
    let r2: f64 = r.iter().map(|x| x * x).sum();
    0.5 * (d2 + (1.0 - r2).max(0.0))
}

/// Value of the two-outcome measurement along `n` for qubits with Bloch vectors `r`, `s`.
fn projective_value(r: &[f64; 3], s: &[f64; 3], n: &[f64; 3]) -> f64 {
    let up = (one_plus_dot(r, n, 1.0) * one_plus_dot(s, n, 1.0)).sqrt();
    let down = (one_plus_dot(r, n, -1.0) * one_plus_dot(s, n, -1.0)).sqrt();
    0.5 * (up + down)
}

/// Scales a Bloch vector that roundoff pushed outside the unit ball back onto it.
fn into_ball(v: [f64; 3]) -> [f64; 3] {
    let len = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    if len > 1.0 {
        [v[0] / len, v[1] / len, v[2] / len]
    } else {
        v
    }
}

fn qubit_blochs(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<([f64; 3], [f64; 3])> {
    if rho.dim() != 2 {
        return Err(Error::UnsupportedDimension(rho.dim()));
    }
    if sigma.dim() != 2 {
        return Err(Error::UnsupportedDimension(sigma.dim()));
    }
    Ok((
        into_ball(bloch_vector(rho)?.as_array()),
        into_ball(bloch_vector(sigma)?.as_array()),
    ))
}

/// Fibonacci grid of `resolution` axes followed by the three coordinate axes.
pub fn measurement_axes(resolution: usize) -> Vec<[f64; 3]> {
    let mut axes = fibonacci_sphere(resolution);
    axes.extend([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]);
    axes
}

/// Minimum of the POVM objective over two-outcome projective measurements
/// along [`measurement_axes`]. An upper bound on the fidelity that converges
/// to it as the grid refines.
pub fn fidelity_povm_grid_min(rho: &DensityMatrix, sigma: &DensityMatrix, resolution: usize) -> Result<f64> {
    let (r, s) = qubit_blochs(rho, sigma)?;
    if resolution == 0 {
        return Err(Error::InvalidInput("grid resolution must be positive".into()));
    }
    Ok(measurement_axes(resolution)
        .par_iter()
        .map(|n| projective_value(&r, &s, n))
        .reduce(|| f64::INFINITY, f64::min))
}

/// How many of the best grid axes seed a local polish.
const POLISH_SEEDS: usize = 3;

/// POVM-minimization oracle for the qubit fidelity.
///
/// Sweeps [`measurement_axes`] for `resolution`, then polishes the
/// best few axes with a local simplex search on the sphere. Every value it
/// evaluates belongs to a genuine measurement, so the result never drops below
/// the true minimum (up to roundoff). The polish removes the `O(grid spacing)`
/// error that a bare grid suffers when an input is rank-deficient.
pub fn fidelity_povm_oracle(rho: &DensityMatrix, sigma: &DensityMatrix, resolution: usize) -> Result<f64> {
    let (r, s) = qubit_blochs(rho, sigma)?;
    if resolution == 0 {
        return Err(Error::InvalidInput("grid resolution must be positive".into()));
    }
    let grid = measurement_axes(resolution);
    let mut scored: Vec<(f64, usize)> = grid
        .iter()
        .enumerate()
        .map(|(k, n)| (projective_value(&r, &s, n), k))
        .collect();
    scored.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let spacing = (4.0 * std::f64::consts::PI / resolution as f64).sqrt();
    let cfg = NelderMeadConfig {
        max_iters: 2000,
        diameter_tol: 1e-13,
        initial_step: spacing,
        target_value: None,
    };
    let mut best = scored[0].0;
    for &(_, k) in scored.iter().take(POLISH_SEEDS) {
        let n0 = grid[k];
        let (e1, e2) = tangent_basis(&n0);
        let axis = |p: &[f64]| {
            let v = [
                n0[0] + p[0] * e1[0] + p[1] * e2[0],
                n0[1] + p[0] * e1[1] + p[1] * e2[1],
                n0[2] + p[0] * e1[2] + p[1] * e2[2],
            ];
            let len = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
            [v[0] / len, v[1] / len, v[2] / len]
        };
        let m = nelder_mead(|p| projective_value(&r, &s, &axis(p)), &[0.0, 0.0], &cfg);
        best = best.min(m.value);
    }
    Ok(best)
}

fn tangent_basis(n: &[f64; 3]) -> ([f64; 3], [f64; 3]) {
    let helper = if n[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
    let e1 = normalize(cross(n, &helper));
    let e2 = cross(n, &e1);
    (e1, e2)
}

fn cross(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn normalize(v: [f64; 3]) -> [f64; 3] {
    let l = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    [v[0] / l, v[1] / l, v[2] / l]
}

/// Bloch vector of a single-spin state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlochVector {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl BlochVector {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn norm(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn dot(&self, other: &BlochVector) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    /// `(I + r·σ)/2`.
    pub fn to_density(&self) -> Result<DensityMatrix> {
        DensityMatrix::new(projector_along(self.as_array()))
    }
}

/// `(Tr[ρσₓ], Tr[ρσ_y], Tr[ρσ_z])`.
pub fn bloch_vector(rho: &DensityMatrix) -> Result<BlochVector> {
    if rho.dim() != 2 {
        return Err(Error::UnsupportedDimension(rho.dim()));
    }
    let [x, y, z] = linalg::paulis();
    let comp = |p: &CMatrix| -> f64 { linalg::trace(&(rho.matrix() * p)).re };
    Ok(BlochVector::new(comp(&x), comp(&y), comp(&z)))
}

/// Angle in `[0, π]` between two nonzero Bloch vectors.
pub fn relative_angle(a: &BlochVector, b: &BlochVector) -> Result<f64> {
    let (na, nb) = (a.norm(), b.norm());
    if na <= 1e-12 || nb <= 1e-12 {
        return Err(Error::UndefinedAngle);
    }
    let cos = (a.dot(b) / (na * nb)).clamp(-1.0, 1.0);
    Ok(cos.acos())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::C64;
    use crate::state::SpinState;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn ket(bits: &[u8]) -> DensityMatrix {
        SpinState::basis(bits).unwrap().density()
    }

    fn plus() -> DensityMatrix {
        SpinState::new(1, vec![C64::new(FRAC_1_SQRT_2, 0.0); 2]).unwrap().density()
    }

    #[test]
    fn fidelity_examples() {
        let zero = ket(&[0]);
        assert!((fidelity(&zero, &zero).unwrap() - 1.0).abs() < 1e-14);
        assert!(fidelity(&zero, &ket(&[1])).unwrap().abs() < 1e-14);
        assert!((fidelity(&zero, &plus()).unwrap() - FRAC_1_SQRT_2).abs() < 1e-14);
        assert!((fidelity_squared(&zero, &plus()).unwrap() - 0.5).abs() < 1e-14);
        let mm = DensityMatrix::maximally_mixed(1).unwrap();
        assert!((fidelity(&mm, &mm).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn dimension_mismatch() {
        assert!(matches!(
            fidelity(&ket(&[0]), &ket(&[0, 0])),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(trace_distance(&ket(&[0]), &ket(&[0, 0])).is_err());
    }

    #[test]
    fn trace_distance_examples() {
        let zero = ket(&[0]);
        assert!(trace_distance(&zero, &zero).unwrap().abs() < 1e-15);
        assert!((trace_distance(&zero, &ket(&[1])).unwrap() - 1.0).abs() < 1e-14);
        assert!((trace_distance(&zero, &plus()).unwrap() - FRAC_1_SQRT_2).abs() < 1e-14);
    }

    #[test]
    fn helstrom_examples() {
        let zero = ket(&[0]);
        assert!((helstrom_error(&zero, &zero, 0.5).unwrap() - 0.5).abs() < 1e-15);
        assert!(helstrom_error(&zero, &ket(&[1]), 0.5).unwrap().abs() < 1e-15);
        let expected = (1.0 - FRAC_1_SQRT_2) / 2.0;
        assert!((helstrom_error(&zero, &plus(), 0.5).unwrap() - expected).abs() < 1e-14);
        assert!(helstrom_error(&zero, &zero, 0.0).is_err());
        assert!(helstrom_error(&zero, &zero, 1.0).is_err());
    }

    #[test]
    fn helstrom_projectors_are_complementary() {
        let h = helstrom(&ket(&[0]), &plus(), 0.3).unwrap();
        let sum = &h.projector_a + &h.projector_b;
        assert!(linalg::max_abs_diff(&sum, &CMatrix::identity(2, 2)) < 1e-15);
        let sq = &h.projector_a * &h.projector_a;
        assert!(linalg::max_abs_diff(&sq, &h.projector_a) < 1e-13);
    }

    #[test]
    fn equal_states_half_prior_guess_a() {
        let h = helstrom(&plus(), &plus(), 0.5).unwrap();
        assert!(linalg::max_abs_diff(&h.projector_a, &CMatrix::identity(2, 2)) < 1e-15);
    }

    #[test]
    fn bloch_examples() {
        let b = bloch_vector(&ket(&[0])).unwrap();
        assert_eq!(b.as_array(), [0.0, 0.0, 1.0]);
        let b = bloch_vector(&DensityMatrix::maximally_mixed(1).unwrap()).unwrap();
        assert!(b.norm() < 1e-15);
        let b = bloch_vector(&plus()).unwrap();
        assert!((b.x - 1.0).abs() < 1e-15 && b.y.abs() < 1e-15 && b.z.abs() < 1e-15);
        assert!(matches!(
            bloch_vector(&ket(&[0, 0])),
            Err(Error::UnsupportedDimension(4))
        ));
    }

    #[test]
    fn relative_angle_examples() {
        let up = BlochVector::new(0.0, 0.0, 1.0);
        let down = BlochVector::new(0.0, 0.0, -1.0);
        let x = BlochVector::new(1.0, 0.0, 0.0);
        assert!(relative_angle(&up, &up).unwrap().abs() < 1e-15);
        assert!((relative_angle(&up, &down).unwrap() - PI).abs() < 1e-15);
        let theta = relative_angle(&up, &x).unwrap();
        assert!((theta - PI / 2.0).abs() < 1e-15);
        let f2 = fidelity_squared(&up.to_density().unwrap(), &x.to_density().unwrap()).unwrap();
        assert!((f2 - (1.0 + theta.cos()) / 2.0).abs() < 1e-12);
        assert!(matches!(
            relative_angle(&up, &BlochVector::new(0.0, 0.0, 0.0)),
            Err(Error::UndefinedAngle)
        ));
    }

    #[test]
    fn povm_oracle_examples() {
        let zero = ket(&[0]);
        for r in [1, 7, 50] {
            assert!((fidelity_povm_oracle(&zero, &zero, r).unwrap() - 1.0).abs() < 1e-12);
        }
        assert!(fidelity_povm_grid_min(&zero, &ket(&[1]), 2).unwrap().abs() < 1e-12);
        let v = fidelity_povm_oracle(&zero, &plus(), 200).unwrap();
        assert!(v >= FRAC_1_SQRT_2 - 1e-12);
        assert!(v - FRAC_1_SQRT_2 < 1e-3);
        assert!(matches!(
            fidelity_povm_oracle(&ket(&[0, 0]), &ket(&[0, 0]), 10),
            Err(Error::UnsupportedDimension(4))
        ));
    }

    #[test]
    fn orthogonal_states_oracle_with_z_axis() {
        // Any grid containing ±z sees zero overlap; the polish finds it from nearby axes.
        let v = fidelity_povm_oracle(&ket(&[0]), &ket(&[1]), 20).unwrap();
        assert!(v.abs() < 1e-6, "{v}");
        let z_only = Povm::qubit_projective([0.0, 0.0, 1.0]).unwrap();
        assert_eq!(z_only.bhattacharyya(&ket(&[0]), &ket(&[1])).unwrap(), 0.0);
    }

    #[test]
    fn povm_validation() {
        let p = projector_along([0.0, 0.0, 1.0]);
        assert!(Povm::new(vec![p.clone()]).is_err());
        assert!(Povm::new(vec![p.clone(), CMatrix::identity(2, 2) - p]).is_ok());
        assert!(Povm::qubit_projective([1.0, 1.0, 0.0]).is_err());
    }

    #[test]
    fn convention_parsing() {
        assert_eq!("sqrt".parse::<Convention>().unwrap(), Convention::Sqrt);
        assert_eq!("squared".parse::<Convention>().unwrap(), Convention::Squared);
        assert!("cubed".parse::<Convention>().is_err());
        assert_eq!(Convention::Squared.from_sqrt(0.6), 0.36);
    }
}
