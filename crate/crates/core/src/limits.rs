//! Spin-count caps.
//!
//! Dense storage is `O(4^N)` for density matrices, so every entry point that
//! takes a spin count checks it against the active cap. The cap defaults to
//! [`DEFAULT_MAX_SPINS`], may be raised up to [`HARD_MAX_SPINS`] through
//! [`set_max_spins`], and the `SPINFRAME_MAX_SPINS` environment variable can
//! only lower it.

use std::sync::atomic::{AtomicUsize, Ordering};

use crate::error::{Error, Result};

pub const HARD_MAX_SPINS: usize = 14;
pub const DEFAULT_MAX_SPINS: usize = 10;
pub const ENV_MAX_SPINS: &str = "SPINFRAME_MAX_SPINS";

static CONFIGURED: AtomicUsize = AtomicUsize::new(DEFAULT_MAX_SPINS);

/// Sets the process-wide cap. Values above [`HARD_MAX_SPINS`] or below 1 are rejected.
pub fn set_max_spins(n: usize) -> Result<()> {
    if n == 0 || n > HARD_MAX_SPINS {
        return Err(Error::InvalidInput(format!(
            "spin cap must be in 1..={HARD_MAX_SPINS}, got {n}"
        )));
    }
    CONFIGURED.store(n, Ordering::Relaxed);
    Ok(())
}

fn env_cap() -> Option<usize> {
    std::env::var(ENV_MAX_SPINS)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&v| v >= 1)
}

/// The cap currently in force.
pub fn max_spins() -> usize {
    let configured = CONFIGURED.load(Ordering::Relaxed);
    match env_cap() {
        Some(env) => configured.min(env),
        None => configured,
    }
}

pub fn check_spins(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidInput("spin count must be at least 1".into()));
    }
    let cap = max_spins();
    if n > cap {
        return Err(Error::CapExceeded { requested: n, cap });
    }
    Ok(())
}

/// Check against the hard storage limit only.
pub(crate) fn check_storage(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidInput("spin count must be at least 1".into()));
    }
    if n > HARD_MAX_SPINS {
        return Err(Error::CapExceeded {
            requested: n,
            cap: HARD_MAX_SPINS,
        });
    }
    Ok(())
}
