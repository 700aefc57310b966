//! Independent reference implementations and random fixtures for the
//! integration tests.

#![allow(dead_code)]

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;
use spinframe_core::rng::{stream_rng, Stream};
use spinframe_core::{CMatrix, DensityMatrix, SpinState, SubsystemSpec, C64};

pub fn rng(seed: u64, index: u64) -> rand_chacha::ChaCha20Rng {
    stream_rng(seed, Stream::Test, index)
}

pub fn gaussian<R: Rng>(rng: &mut R) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Random density matrix `GG†/Tr` with `G` of shape `dim × rank`.
pub fn random_density<R: Rng>(dim: usize, rank: usize, rng: &mut R) -> DensityMatrix {
    let g = DMatrix::from_fn(dim, rank, |_, _| gaussian(rng));
    let m = &g * g.adjoint();
    let tr = m.trace().re;
    DensityMatrix::new(m.unscale(tr)).unwrap()
}

pub fn random_state<R: Rng>(n: usize, rng: &mut R) -> SpinState {
    let amps = (0..1usize << n).map(|_| gaussian(rng)).collect();
    SpinState::normalized(n, amps).unwrap()
}

/// Reduced density matrix by the textbook sum over traced-out bit strings,
/// with kept spins listed in tuple order.
pub fn reduce_naive(state: &SpinState, keep: &[usize]) -> CMatrix {
    let n = state.num_spins();
    let rest: Vec<usize> = (1..=n).filter(|s| !keep.contains(s)).collect();
    let k = keep.len();
    let dk = 1usize << k;
    let compose = |kept: usize, traced: usize| -> usize {
        let mut idx = 0usize;
        for (pos, &spin) in keep.iter().enumerate() {
            let bit = (kept >> (k - 1 - pos)) & 1;
            idx |= bit << (n - spin);
        }
        for (pos, &spin) in rest.iter().enumerate() {
            let bit = (traced >> (rest.len() - 1 - pos)) & 1;
            idx |= bit << (n - spin);
        }
        idx
    };
    let psi = state.amplitudes();
    DMatrix::from_fn(dk, dk, |i, j| {
        (0..1usize << rest.len())
            .map(|t| psi[compose(i, t)] * psi[compose(j, t)].conj())
            .sum()
    })
}

fn herm_sqrt(m: &CMatrix) -> CMatrix {
    let eig = m.clone().symmetric_eigen();
    let d = DMatrix::from_diagonal(&eig.eigenvalues.map(|v| C64::new(v.max(0.0).sqrt(), 0.0)));
    &eig.eigenvectors * d * eig.eigenvectors.adjoint()
}

/// `Tr √(√ρ σ √ρ)` by nested matrix square roots.
pub fn fidelity_naive(rho: &CMatrix, sigma: &CMatrix) -> f64 {
    let s = herm_sqrt(rho);
    let inner = &s * sigma * &s;
    let inner = (&inner + inner.adjoint()).unscale(2.0);
    inner
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .map(|v| v.max(0.0).sqrt())
        .sum()
}

/// Qubit fidelity from Bloch vectors:
/// `F² = ½(1 + r·s + √((1 − |r|²)(1 − |s|²)))`.
pub fn qubit_fidelity(r: [f64; 3], s: [f64; 3]) -> f64 {
    let dot = r[0] * s[0] + r[1] * s[1] + r[2] * s[2];
    let rr = r.iter().map(|x| x * x).sum::<f64>();
    let ss = s.iter().map(|x| x * x).sum::<f64>();
    (0.5 * (1.0 + dot + ((1.0 - rr).max(0.0) * (1.0 - ss).max(0.0)).sqrt()))
        .max(0.0)
        .sqrt()
}

pub fn spec(v: &[usize]) -> SubsystemSpec {
    SubsystemSpec::new(v.to_vec()).unwrap()
}

pub fn max_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}
