//! Collective unitaries `V^⊗N` and the numerical probes around them: Haar
//! sampling, the PU(2) → SO(3) map, invariance checks, statistical
//! falsification with generic unitaries, and distance to the collective set.

use nalgebra::Matrix3;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fidelity::Convention;
use crate::limits;
use crate::linalg::{self, CMatrix, C64};
use crate::optim::{multistart, NelderMeadConfig};
use crate::rng::{stream_rng, Stream};
use crate::signature::{enumerate_pairs, signature_distance, signature_over, PairFamily};
use crate::state::SpinState;
use crate::unitary::{GlobalUnitary, Rotation3, SingleSpinUnitary, U2Params};

/// Deviation above which a trial counts as "signature changed".
pub const FALSIFICATION_THRESHOLD: f64 = 1e-3;
/// Maximum deviation tolerated for collective controls.
pub const CONTROL_TOLERANCE: f64 = 1e-9;

/// `e^{iφ} R_z(θ₁) R_y(θ₂) R_z(θ₃)`.
pub fn u2_from_params(phase: f64, theta1: f64, theta2: f64, theta3: f64) -> SingleSpinUnitary {
    SingleSpinUnitary::from_params(U2Params {
        phase,
        theta1,
        theta2,
        theta3,
    })
}

/// Haar-random `dim × dim` unitary: QR of a complex Ginibre matrix with the
/// phases of `R`'s diagonal moved into `Q`.
pub fn haar_matrix<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CMatrix {
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    let mut g = CMatrix::zeros(dim, dim);
    // Fill row-major so the draw order is independent of storage layout.
    for r in 0..dim {
        for c in 0..dim {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            g[(r, c)] = C64::new(re * scale, im * scale);
        }
    }
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for k in 0..dim {
        let d = r[(k, k)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { linalg::ONE };
        for row in 0..dim {
            q[(row, k)] *= phase;
        }
    }
    q
}

pub fn haar_random_u2_with<R: Rng + ?Sized>(rng: &mut R) -> SingleSpinUnitary {
    SingleSpinUnitary::new(haar_matrix(2, rng)).expect("Haar sample is unitary")
}

pub fn haar_random_u2(seed: u64) -> SingleSpinUnitary {
    haar_random_u2_with(&mut stream_rng(seed, Stream::HaarUnitary, 0))
}

pub fn haar_random_unitary_with<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<GlobalUnitary> {
    let n = linalg::is_power_of_two_dim(dim)
        .ok_or_else(|| Error::InvalidInput(format!("dimension {dim} is not a power of two >= 2")))?;
    limits::check_storage(n)?;
    Ok(GlobalUnitary::from_trusted(n, haar_matrix(dim, rng)))
}

pub fn haar_random_unitary(dim: usize, seed: u64) -> Result<GlobalUnitary> {
    haar_random_unitary_with(dim, &mut stream_rng(seed, Stream::HaarUnitary, 0))
}

/// Unitarily invariant random pure state.
pub fn haar_random_state_with<R: Rng + ?Sized>(num_spins: usize, rng: &mut R) -> Result<SpinState> {
    limits::check_storage(num_spins)?;
    let amps: Vec<C64> = (0..1usize << num_spins)
        .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    SpinState::normalized(num_spins, amps)
}

pub fn haar_random_state(num_spins: usize, seed: u64) -> Result<SpinState> {
    haar_random_state_with(num_spins, &mut stream_rng(seed, Stream::HaarState, 0))
}

/// `V^⊗N`.
pub fn collective(v: &SingleSpinUnitary, num_spins: usize) -> Result<GlobalUnitary> {
    limits::check_spins(num_spins)?;
    Ok(GlobalUnitary::from_trusted(num_spins, kron_power(v.matrix(), num_spins)))
}

fn kron_power(v: &CMatrix, n: usize) -> CMatrix {
    let mut out = v.clone();
    for _ in 1..n {
        out = out.kronecker(v);
    }
    out
}

/// Rotation `R_ij = ½ Tr[σᵢ V σⱼ V†]` induced on Bloch vectors.
pub fn pu2_to_so3(v: &SingleSpinUnitary) -> Result<Rotation3> {
    let sigma = linalg::paulis();
    let vm = v.matrix();
    let vd = vm.adjoint();
    let mut m = Matrix3::zeros();
    let mut worst_imag: f64 = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            let t = linalg::trace(&(&sigma[i] * vm * &sigma[j] * &vd)) * 0.5;
            worst_imag = worst_imag.max(t.im.abs());
            m[(i, j)] = t.re;
        }
    }
    if worst_imag > 1e-8 {
        return Err(Error::NumericalConsistency(format!(
            "rotation entries carry imaginary residue {worst_imag:e}"
        )));
    }
    Rotation3::new(m)
}

/// Largest change of any signature entry when `u` acts on `state`.
pub fn signature_deviation(
    state: &SpinState,
    u: &GlobalUnitary,
    family: &PairFamily,
    convention: Convention,
) -> Result<f64> {
    let pairs = enumerate_pairs(state.num_spins(), family)?;
    let before = signature_over(state, &pairs, family.clone(), convention)?;
    let after = signature_over(&state.apply(u)?, &pairs, family.clone(), convention)?;
    signature_distance(&before, &after)
}

/// Deviation between the signatures of `state` and `V^⊗N · state`.
pub fn verify_collective_invariance(
    state: &SpinState,
    v: &SingleSpinUnitary,
    family: &PairFamily,
    convention: Convention,
) -> Result<f64> {
    let u = collective(v, state.num_spins())?;
    signature_deviation(state, &u, family, convention)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FalsificationConfig {
    pub num_spins: usize,
    pub trials: usize,
    pub family: PairFamily,
    pub convention: Convention,
    pub seed: u64,
    pub threshold: f64,
}

impl FalsificationConfig {
    pub fn new(num_spins: usize, trials: usize, seed: u64) -> Self {
        Self {
            num_spins,
            trials,
            family: PairFamily::single_spin(),
            convention: Convention::Sqrt,
            seed,
            threshold: FALSIFICATION_THRESHOLD,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FalsificationTrial {
    pub trial: usize,
    /// Deviation under a Haar-random unitary on the full register.
    pub haar_deviation: f64,
    /// Deviation under a Haar-random collective unitary (control arm).
    pub control_deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FalsificationReport {
    pub config: FalsificationConfig,
    pub trials: Vec<FalsificationTrial>,
    pub fraction_above_threshold: f64,
    pub min_haar_deviation: f64,
    pub max_control_deviation: f64,
}

impl FalsificationReport {
    pub fn controls_pass(&self) -> bool {
        self.max_control_deviation < CONTROL_TOLERANCE
    }
}

/// Applies Haar-random global unitaries and collective controls to
/// Haar-random states and records how far the signature moves.
pub fn falsification_experiment(cfg: &FalsificationConfig) -> Result<FalsificationReport> {
    limits::check_spins(cfg.num_spins)?;
    if cfg.trials == 0 {
        return Err(Error::InvalidInput("need at least one trial".into()));
    }
    let n = cfg.num_spins;
    let pairs = enumerate_pairs(n, &cfg.family)?;
    let trials = (0..cfg.trials)
        .into_par_iter()
        .map(|t| -> Result<FalsificationTrial> {
            let mut rng = stream_rng(cfg.seed, Stream::Falsification, t as u64);
            let state = haar_random_state_with(n, &mut rng)?;
            let u = haar_random_unitary_with(1 << n, &mut rng)?;
            let v = haar_random_u2_with(&mut rng);
            let base = signature_over(&state, &pairs, cfg.family.clone(), cfg.convention)?;
            let deviation = |w: &GlobalUnitary| -> Result<f64> {
                let moved = signature_over(&state.apply(w)?, &pairs, cfg.family.clone(), cfg.convention)?;
                signature_distance(&base, &moved)
            };
            Ok(FalsificationTrial {
                trial: t,
                haar_deviation: deviation(&u)?,
                control_deviation: deviation(&collective(&v, n)?)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let above = trials
        .iter()
        .filter(|t| t.haar_deviation > cfg.threshold)
        .count();
    Ok(FalsificationReport {
        config: cfg.clone(),
        fraction_above_threshold: above as f64 / trials.len() as f64,
        min_haar_deviation: trials
            .iter()
            .map(|t| t.haar_deviation)
            .fold(f64::INFINITY, f64::min),
        max_control_deviation: trials.iter().map(|t| t.control_deviation).fold(0.0, f64::max),
        trials,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceOptions {
    pub restarts: usize,
    pub seed: u64,
    /// Minimize `‖U − e^{iγ}V^⊗N‖` over γ as well (projective distance).
    pub phase_optimized: bool,
    pub optimizer: NelderMeadConfig,
}

impl DistanceOptions {
    pub fn new(restarts: usize, seed: u64) -> Self {
        Self {
            restarts,
            seed,
            phase_optimized: false,
            optimizer: NelderMeadConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RestartRecord {
    pub restart: usize,
    pub distance: f64,
    pub iterations: usize,
    pub converged: bool,
    pub params: U2Params,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CollectiveDistance {
    /// Best Frobenius distance found; an upper bound on the true minimum.
    pub distance: f64,
    pub best_params: U2Params,
    pub best_restart: usize,
    pub converged: bool,
    pub restarts: Vec<RestartRecord>,
}

impl CollectiveDistance {
    pub fn best_v(&self) -> SingleSpinUnitary {
        SingleSpinUnitary::from_params(self.best_params)
    }
}

/// Squared Frobenius distance from `u` to `V(params)^⊗N`, optionally minimized over a global phase.
pub fn collective_distance_sq(u: &GlobalUnitary, params: &[f64], phase_optimized: bool) -> f64 {
    let v = SingleSpinUnitary::from_params(U2Params::from_slice(params));
    let w = kron_power(v.matrix(), u.num_spins());
    if phase_optimized {
        // min_γ ‖U − e^{iγ}W‖² = ‖U‖² + ‖W‖² − 2|Tr(U†W)|
        let overlap: C64 = u
            .matrix()
            .iter()
            .zip(w.iter())
            .map(|(a, b)| a.conj() * b)
            .sum();
        let nu: f64 = u.matrix().iter().map(|z| z.norm_sqr()).sum();
        let nw: f64 = w.iter().map(|z| z.norm_sqr()).sum();
        (nu + nw - 2.0 * overlap.norm()).max(0.0)
    } else {
        u.matrix()
            .iter()
            .zip(w.iter())
            .map(|(a, b)| (a - b).norm_sqr())
            .sum()
    }
}

/// Multistart simplex search for the collective unitary closest to `u`.
pub fn distance_to_collective(u: &GlobalUnitary, opts: &DistanceOptions) -> Result<CollectiveDistance> {
    limits::check_spins(u.num_spins())?;
    if opts.restarts == 0 {
        return Err(Error::InvalidInput("need at least one restart".into()));
    }
    let two_pi = 2.0 * std::f64::consts::PI;
    let start = |r: usize| {
        let mut rng = stream_rng(opts.seed, Stream::DistanceRestart, r as u64);
        vec![
            rng.random_range(0.0..two_pi),
            rng.random_range(0.0..2.0 * two_pi),
            rng.random_range(0.0..std::f64::consts::PI),
            rng.random_range(0.0..2.0 * two_pi),
        ]
    };
    let ms = multistart(
        |p| collective_distance_sq(u, p, opts.phase_optimized),
        start,
        opts.restarts,
        &opts.optimizer,
    );
    let restarts: Vec<RestartRecord> = ms
        .runs
        .iter()
        .enumerate()
        .map(|(k, m)| RestartRecord {
            restart: k,
            distance: m.value.max(0.0).sqrt(),
            iterations: m.iterations,
            converged: m.converged,
            params: U2Params::from_slice(&m.x),
        })
        .collect();
    let best = &restarts[ms.best];
    Ok(CollectiveDistance {
        distance: best.distance,
        best_params: best.params,
        best_restart: ms.best,
        converged: best.converged,
        restarts,
    })
}
