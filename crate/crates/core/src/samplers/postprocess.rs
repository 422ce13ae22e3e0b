//! Sample refinement: steepest descent and Gibbs resampling.
//!
//! These mirror the two postprocessing modes of annealing hardware.
//! Optimization mode pushes each sample to a 1-flip local minimum
//! ([`greedy_descent_postprocess`]); sampling mode re-equilibrates each read
//! toward the Boltzmann distribution `P(x) ~ exp(-beta * E(x) / scale)` at a
//! fixed inverse temperature ([`boltzmann_postprocess`]). As in the annealer,
//! `beta` is read on the normalized energy scale (energies divided by the
//! largest coefficient magnitude), so the same beta means the same thing
//! across problems.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::Error;
use crate::exec;
use crate::qubo::{Adjacency, BitVector, QuboMatrix};
use crate::rng::{child_seed, uniform01, STREAM_GIBBS_CHAIN};
use crate::samplers::SampleSet;

/// Drives every record to a 1-flip local minimum by steepest descent.
///
/// Each step flips the variable with the largest strict energy decrease
/// (lowest index on ties) and stops when no flip decreases the energy.
/// Occurrence counts follow their record; states that descend to the same
/// minimum merge.
pub fn greedy_descent_postprocess(q: &QuboMatrix, s: &SampleSet) -> Result<SampleSet, Error> {
    check_widths(q, s)?;
    let adj = Adjacency::new(q);
    let n = q.n();
    let descended = exec::map_indexed(s.records().len(), |k| {
        let record = &s.records()[k];
        let mut bits = record.x.bits().to_vec();
        loop {
            let mut best = 0.0;
            let mut best_i = None;
            for i in 0..n {
                let delta = adj.flip_delta(&bits, i);
                if delta < best {
                    best = delta;
                    best_i = Some(i);
                }
            }
            match best_i {
                Some(i) => bits[i] ^= 1,
                None => break,
            }
        }
        (BitVector::from_raw(bits), record.occurrences)
    });
    SampleSet::from_counted(q, descended, s.seed())
}

/// Re-equilibrates every read with `gibbs_sweeps` sweeps of single-site
/// Gibbs updates at inverse temperature `beta` (normalized scale).
///
/// Each of the `total_reads` reads becomes one independent chain seeded from
/// the set's root seed by chain index, so the result is deterministic and
/// feature-independent. The output seed is advanced past all chain seeds.
pub fn boltzmann_postprocess(
    q: &QuboMatrix,
    s: &SampleSet,
    beta: f64,
    gibbs_sweeps: usize,
) -> Result<SampleSet, Error> {
    if !(beta.is_finite() && beta > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "beta must be positive and finite, got {beta}"
        )));
    }
    check_widths(q, s)?;
    let adj = Adjacency::new(q);
    let n = q.n();
    let scale = match q.max_abs_term() {
        m if m > 0.0 => m,
        _ => 1.0,
    };
    let beta_eff = beta / scale;

    // Record index of each chain, expanding occurrence counts in order.
    let mut chain_record = Vec::with_capacity(s.total_reads() as usize);
    for (k, record) in s.records().iter().enumerate() {
        for _ in 0..record.occurrences {
            chain_record.push(k);
        }
    }

    let finals = exec::map_indexed(chain_record.len(), |c| {
        let record = &s.records()[chain_record[c]];
        let mut rng = ChaCha8Rng::seed_from_u64(child_seed(s.seed(), STREAM_GIBBS_CHAIN, c as u64));
        let mut bits = record.x.bits().to_vec();
        for _ in 0..gibbs_sweeps {
            for i in 0..n {
                // local = E(x_i = 1) - E(x_i = 0) given the rest; then
                // P(x_i = 1 | rest) = 1 / (1 + exp(beta_eff * local)).
                let delta = adj.flip_delta(&bits, i);
                let local = if bits[i] == 1 { -delta } else { delta };
                let p_one = 1.0 / (1.0 + (beta_eff * local).exp());
                bits[i] = (uniform01(&mut rng) < p_one) as u8;
            }
        }
        BitVector::from_raw(bits)
    });

    let out_seed = child_seed(s.seed(), STREAM_GIBBS_CHAIN, s.total_reads());
    SampleSet::from_states(q, finals, out_seed)
}

fn check_widths(q: &QuboMatrix, s: &SampleSet) -> Result<(), Error> {
    for record in s.records() {
        if record.x.len() != q.n() {
            return Err(Error::DimensionMismatch {
                expected: q.n(),
                got: record.x.len(),
            });
        }
    }
    Ok(())
}
