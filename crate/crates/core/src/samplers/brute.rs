//! Exhaustive enumeration of every assignment.
//!
//! Exact stand-in for an optimizer at small n: the returned set contains all
//! 2^n assignments with occurrence 1, so the first record is the global
//! minimum and any downstream feasibility filter sees the full search space.

use crate::error::Error;
use crate::exec;
use crate::qubo::{BitVector, QuboMatrix};
use crate::samplers::SampleSet;

/// Hard cap on enumeration size (2^24 assignments).
pub const MAX_BRUTE_FORCE_VARS: usize = 24;

/// Enumerates all assignments of `q`; one record per assignment, sorted.
///
/// Fails with [`Error::TooManyVariables`] above [`MAX_BRUTE_FORCE_VARS`].
pub fn brute_force_sample(q: &QuboMatrix) -> Result<SampleSet, Error> {
    brute_force_sample_seeded(q, 0)
}

/// Sequential variant, for benchmarking against the parallel path.
pub fn brute_force_sample_sequential(q: &QuboMatrix) -> Result<SampleSet, Error> {
    let states = exec::map_indexed_sequential(state_count(q)?, |mask| {
        BitVector::from_mask(mask as u64, q.n())
    });
    SampleSet::from_states(q, states, 0)
}

/// Rayon variant; identical output to the sequential path.
#[cfg(feature = "parallel")]
pub fn brute_force_sample_parallel(q: &QuboMatrix) -> Result<SampleSet, Error> {
    let states = exec::map_indexed_parallel(state_count(q)?, |mask| {
        BitVector::from_mask(mask as u64, q.n())
    });
    SampleSet::from_states(q, states, 0)
}

/// Same enumeration but stamping a caller-chosen seed lineage, so
/// postprocessing an exact set stays reproducible.
pub(crate) fn brute_force_sample_seeded(q: &QuboMatrix, seed: u64) -> Result<SampleSet, Error> {
    let states = exec::map_indexed(state_count(q)?, |mask| {
        BitVector::from_mask(mask as u64, q.n())
    });
    SampleSet::from_states(q, states, seed)
}

fn state_count(q: &QuboMatrix) -> Result<usize, Error> {
    if q.n() > MAX_BRUTE_FORCE_VARS {
        return Err(Error::TooManyVariables {
            n: q.n(),
            max: MAX_BRUTE_FORCE_VARS,
        });
    }
    Ok(1usize << q.n())
}
