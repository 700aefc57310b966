//! Fidelity signatures of multi-spin pure states and the collective
//! (reference-frame) symmetry that preserves them.
//!
//! States live on `N` spin-½ particles with spin 1 as the most significant bit
//! of the basis index. Subsystems are ordered tuples of 1-based spin indices.

pub mod equivalence;
pub mod error;
pub mod fidelity;
pub mod game;
pub mod limits;
pub mod linalg;
pub mod optim;
pub mod rng;
pub mod signature;
pub mod state;
pub mod symmetry;
pub mod unitary;

pub use equivalence::{
    macro_state, micro_state, micromacro_table, non_collectivity_witness, relabel_unitary,
    search_state_with_signature, MicroMacroConfig, MicroMacroTable, SearchConfig, SearchResult, TableRow,
    WitnessReport,
};
pub use error::{Error, Result};
pub use fidelity::{
    bloch_vector, fidelity, fidelity_in, fidelity_povm_oracle, fidelity_squared, helstrom, helstrom_error,
    relative_angle, trace_distance, BlochVector, Convention,
};
pub use game::{lab_frame_pair, play, postulate1_check, run_game, Frame, GameConfig, GameReport, Lab, LabReport};
pub use limits::{max_spins, set_max_spins, HARD_MAX_SPINS};
pub use linalg::{CMatrix, C64};
pub use signature::{
    enumerate_pairs, signature, signature_diff, signature_distance, signatures_equal, FidelitySignature,
    PairFamily, PairKey, PairMode,
};
pub use state::{DensityMatrix, SpinState, SubsystemSpec};
pub use symmetry::{
    collective, distance_to_collective, falsification_experiment, haar_random_state, haar_random_u2,
    haar_random_unitary, pu2_to_so3, signature_deviation, verify_collective_invariance, CollectiveDistance,
    DistanceOptions, FalsificationConfig, FalsificationReport,
};
pub use unitary::{GlobalUnitary, Rotation3, SingleSpinUnitary, U2Params};
