//! Shared fixtures for the engine benchmarks.

use evoipd_core::dsl::{synth_attitude_set, AttitudeSets};
use evoipd_core::Attitude;

/// Synthetic A, C and N sets of `size` strategies each.
pub fn synthetic_sets(seed: u64, size: usize) -> AttitudeSets {
    AttitudeSets::new(
        synth_attitude_set(Attitude::Aggressive, seed, size),
        synth_attitude_set(Attitude::Cooperative, seed, size),
        synth_attitude_set(Attitude::Neutral, seed, size),
    )
    .expect("synthetic sets share labels")
}
