//! Monte-Carlo simulation of the discrimination game: a machine picks
//! procedure A (subsystem `spec_a`) with prior `p` or B (`spec_b`) otherwise,
//! and each laboratory, seeing the global state through its own frame,
//! guesses which with the optimal single-copy measurement.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fidelity::{self, helstrom};
use crate::limits;
use crate::linalg::{self, CMatrix};
use crate::rng::{stream_rng, Stream};
use crate::state::{DensityMatrix, SpinState, SubsystemSpec};
use crate::symmetry::{collective, haar_random_u2_with, haar_random_unitary_with};
use crate::unitary::{GlobalUnitary, SingleSpinUnitary, U2Params};

/// Spread of analytic errors tolerated across collective frames.
pub const POSTULATE1_TOLERANCE: f64 = 1e-10;
/// Trials simulated per random stream.
pub const CHUNK_TRIALS: usize = 4096;

/// How a laboratory's frame relates to the reference frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Frame {
    Identity,
    /// `V^⊗M` for a row-major `[re, im]` 2×2 matrix.
    Collective { v: Vec<[f64; 2]> },
    /// `V^⊗M` with `V` given by Euler parameters.
    CollectiveParams { params: U2Params },
    /// `V^⊗M` with Haar-random `V` drawn from `seed`.
    HaarCollective { seed: u64 },
    /// Haar-random unitary on the whole register, drawn from `seed`.
    HaarGlobal { seed: u64 },
    /// Row-major `[re, im]` matrix on the whole register.
    Explicit { matrix: Vec<[f64; 2]> },
}

impl Frame {
    pub fn is_collective(&self) -> bool {
        matches!(
            self,
            Frame::Identity | Frame::Collective { .. } | Frame::CollectiveParams { .. } | Frame::HaarCollective { .. }
        )
    }

    pub fn unitary(&self, total_spins: usize) -> Result<GlobalUnitary> {
        let u = match self {
            Frame::Identity => GlobalUnitary::identity(total_spins)?,
            Frame::Collective { v } => collective(&SingleSpinUnitary::from_pairs(v)?, total_spins)?,
            Frame::CollectiveParams { params } => {
                collective(&SingleSpinUnitary::from_params(*params), total_spins)?
            }
            Frame::HaarCollective { seed } => {
                let v = haar_random_u2_with(&mut stream_rng(*seed, Stream::GameFrames, 0));
                collective(&v, total_spins)?
            }
            Frame::HaarGlobal { seed } => {
                limits::check_spins(total_spins)?;
                haar_random_unitary_with(1 << total_spins, &mut stream_rng(*seed, Stream::GameFrames, 1))?
            }
            Frame::Explicit { matrix } => GlobalUnitary::from_pairs(matrix)?,
        };
        if u.num_spins() != total_spins {
            return Err(Error::DimensionMismatch {
                expected: 1 << total_spins,
                found: u.dim(),
            });
        }
        Ok(u)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Lab {
    pub id: String,
    pub frame: Frame,
}

impl Lab {
    pub fn new(id: impl Into<String>, frame: Frame) -> Self {
        Self { id: id.into(), frame }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GameConfig {
    pub total_spins: usize,
    pub global_state: SpinState,
    pub spec_a: SubsystemSpec,
    pub spec_b: SubsystemSpec,
    pub p: f64,
    pub labs: Vec<Lab>,
    pub trials: usize,
    pub seed: u64,
}

impl GameConfig {
    pub fn validate(&self) -> Result<()> {
        limits::check_spins(self.total_spins)?;
        if self.global_state.num_spins() != self.total_spins {
            return Err(Error::DimensionMismatch {
                expected: 1 << self.total_spins,
                found: self.global_state.dim(),
            });
        }
        self.spec_a.check_within(self.total_spins)?;
        self.spec_b.check_within(self.total_spins)?;
        if self.spec_a.len() != self.spec_b.len() {
            return Err(Error::InvalidInput(format!(
                "subsystems {} and {} differ in size",
                self.spec_a, self.spec_b
            )));
        }
        if !(self.p > 0.0 && self.p < 1.0) {
            return Err(Error::InvalidInput(format!("prior {} must lie in (0, 1)", self.p)));
        }
        if self.trials == 0 {
            return Err(Error::InvalidInput("need at least one trial".into()));
        }
        if self.labs.is_empty() {
            return Err(Error::InvalidInput("need at least one lab".into()));
        }
        Ok(())
    }
}

/// The pair `(ρ_A, ρ_B)` a lab sees: frame applied to the global state, then
/// reduced onto each subsystem.
pub fn lab_frame_pair(cfg: &GameConfig, lab: &Lab) -> Result<(DensityMatrix, DensityMatrix)> {
    let w = lab.frame.unitary(cfg.total_spins)?;
    let state = cfg.global_state.apply(&w)?;
    Ok((state.reduce(&cfg.spec_a)?, state.reduce(&cfg.spec_b)?))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabReport {
    pub lab: String,
    pub collective: bool,
    pub rho_a: DensityMatrix,
    pub rho_b: DensityMatrix,
    pub fidelity: f64,
    pub analytic_p_err: f64,
    pub mc_p_err: f64,
    pub mc_std_err: f64,
    pub mc_errors: u64,
}

fn born(projector: &CMatrix, rho: &DensityMatrix) -> f64 {
    linalg::trace(&(projector * rho.matrix())).re.clamp(0.0, 1.0)
}

/// Counts wrong guesses over `trials` rounds given the probabilities of
/// guessing A when A (`hit_a`) or B (`false_a`) was prepared.
fn simulate(trials: usize, p: f64, hit_a: f64, false_a: f64, seed: u64, lab: usize) -> u64 {
    let chunks = trials.div_ceil(CHUNK_TRIALS);
    (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = stream_rng(seed, Stream::GameTrials, ((lab as u64) << 32) | c as u64);
            let n = CHUNK_TRIALS.min(trials - c * CHUNK_TRIALS);
            let mut errors = 0u64;
            for _ in 0..n {
                let is_a = rng.random::<f64>() < p;
                let guess_a = rng.random::<f64>() < if is_a { hit_a } else { false_a };
                if guess_a != is_a {
                    errors += 1;
                }
            }
            errors
        })
        .sum()
}

fn lab_report(cfg: &GameConfig, index: usize, lab: &Lab) -> Result<LabReport> {
    let (rho_a, rho_b) = lab_frame_pair(cfg, lab)?;
    let h = helstrom(&rho_a, &rho_b, cfg.p)?;
    let hit_a = born(&h.projector_a, &rho_a);
    let false_a = born(&h.projector_a, &rho_b);
    let errors = simulate(cfg.trials, cfg.p, hit_a, false_a, cfg.seed, index);
    let n = cfg.trials as f64;
    let rate = errors as f64 / n;
    Ok(LabReport {
        lab: lab.id.clone(),
        collective: lab.frame.is_collective(),
        fidelity: fidelity::fidelity(&rho_a, &rho_b)?,
        analytic_p_err: h.error,
        mc_p_err: rate,
        mc_std_err: (rate * (1.0 - rate) / n).sqrt(),
        mc_errors: errors,
        rho_a,
        rho_b,
    })
}

pub fn run_game(cfg: &GameConfig) -> Result<Vec<LabReport>> {
    cfg.validate()?;
    cfg.labs
        .iter()
        .enumerate()
        .map(|(i, lab)| lab_report(cfg, i, lab))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Postulate1Check {
    /// Largest difference in analytic error between any two labs.
    pub max_spread: f64,
    pub pass: bool,
    pub all_collective: bool,
}

pub fn postulate1_from_reports(reports: &[LabReport]) -> Postulate1Check {
    let errs = reports.iter().map(|r| r.analytic_p_err);
    let max = errs.clone().fold(f64::NEG_INFINITY, f64::max);
    let min = errs.fold(f64::INFINITY, f64::min);
    let max_spread = if reports.is_empty() { 0.0 } else { max - min };
    Postulate1Check {
        max_spread,
        pass: max_spread <= POSTULATE1_TOLERANCE,
        all_collective: reports.iter().all(|r| r.collective),
    }
}

/// Analytic-only check that every lab assigns the same optimal error.
pub fn postulate1_check(cfg: &GameConfig) -> Result<Postulate1Check> {
    cfg.validate()?;
    let mut errs = Vec::with_capacity(cfg.labs.len());
    for lab in &cfg.labs {
        let (a, b) = lab_frame_pair(cfg, lab)?;
        errs.push(fidelity::helstrom_error(&a, &b, cfg.p)?);
    }
    let max = errs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = errs.iter().copied().fold(f64::INFINITY, f64::min);
    let max_spread = max - min;
    Ok(Postulate1Check {
        max_spread,
        pass: max_spread <= POSTULATE1_TOLERANCE,
        all_collective: cfg.labs.iter().all(|l| l.frame.is_collective()),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GameReport {
    pub config: GameConfig,
    pub labs: Vec<LabReport>,
    pub postulate1: Postulate1Check,
}

pub fn play(cfg: &GameConfig) -> Result<GameReport> {
    let labs = run_game(cfg)?;
    let postulate1 = postulate1_from_reports(&labs);
    Ok(GameReport {
        config: cfg.clone(),
        labs,
        postulate1,
    })
}
