//! QUBO samplers and postprocessing.
//!
//! Every sampler returns a [`SampleSet`]: a merged, energy-sorted multiset of
//! assignments. Three interchangeable sources implement [`Sampler`]:
//! exhaustive enumeration ([`brute_force_sample`]), simulated annealing
//! ([`simulated_annealing_sample`]), and anything a caller plugs in. Two
//! postprocessors refine a set in place of hardware-side modes: steepest
//! single-flip descent ([`greedy_descent_postprocess`], an optimization-mode
//! analog) and fixed-temperature Gibbs resampling
//! ([`boltzmann_postprocess`], a sampling-mode analog).
//!
//! Determinism contract: identical `(q, params, seed)` produce bit-identical
//! sets, with or without the `parallel` feature. Each read or chain derives
//! its own generator from the root seed by index, and merging is order-fixed.

mod brute;
mod postprocess;
mod sa;

#[cfg(feature = "parallel")]
pub use brute::brute_force_sample_parallel;
pub use brute::brute_force_sample_sequential;
pub use brute::{brute_force_sample, MAX_BRUTE_FORCE_VARS};
pub use postprocess::{boltzmann_postprocess, greedy_descent_postprocess};
#[cfg(feature = "parallel")]
pub use sa::simulated_annealing_sample_parallel;
pub use sa::{simulated_annealing_sample, simulated_annealing_sample_sequential};

use crate::error::Error;
use crate::qubo::{BitVector, QuboMatrix};

/// One distinct assignment with its energy and how many reads landed on it.
#[derive(Clone, Debug, PartialEq)]
pub struct SampleRecord {
    pub x: BitVector,
    pub energy: f64,
    pub occurrences: u64,
}

/// Merged multiset of sampler reads, sorted by energy then bit-vector.
///
/// Invariants, preserved by every operation in this module:
/// duplicate assignments are merged with summed occurrences; occurrences sum
/// to `total_reads`; each record's energy equals the exact
/// [`QuboMatrix::energy`] of its assignment; records are sorted by
/// `(energy, x)` ascending, so the first record is the best read and ties
/// resolve to the lexicographically smallest assignment.
///
/// The set remembers the root `seed` it was produced from; postprocessors
/// derive their chain seeds from it, which is what "deterministic given the
/// set's seed lineage" means.
#[derive(Clone, Debug, PartialEq)]
pub struct SampleSet {
    records: Vec<SampleRecord>,
    total_reads: u64,
    seed: u64,
}

impl SampleSet {
    /// Merges raw per-read states into a set; energies are computed here.
    pub(crate) fn from_states(
        q: &QuboMatrix,
        states: Vec<BitVector>,
        seed: u64,
    ) -> Result<Self, Error> {
        SampleSet::from_counted(q, states.into_iter().map(|x| (x, 1)), seed)
    }

    /// Merges `(state, occurrences)` pairs; duplicates accumulate.
    pub(crate) fn from_counted<I>(q: &QuboMatrix, counted: I, seed: u64) -> Result<Self, Error>
    where
        I: IntoIterator<Item = (BitVector, u64)>,
    {
        let mut merged: std::collections::BTreeMap<BitVector, u64> =
            std::collections::BTreeMap::new();
        let mut total_reads = 0u64;
        for (x, count) in counted {
            total_reads += count;
            *merged.entry(x).or_insert(0) += count;
        }
        // Evaluating against a flat term list matches QuboMatrix::energy
        // exactly: same terms, same order, same additions.
        let terms: Vec<((usize, usize), f64)> = q.terms().collect();
        let offset = q.offset();
        let n = q.n();
        let mut records = Vec::with_capacity(merged.len());
        for (x, occurrences) in merged {
            if x.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: x.len(),
                });
            }
            let mut energy = 0.0;
            for &((i, j), v) in &terms {
                if x.is_set(i) && x.is_set(j) {
                    energy += v;
                }
            }
            energy += offset;
            records.push(SampleRecord {
                x,
                energy,
                occurrences,
            });
        }
        // Stable sort on energy keeps the lexicographic order within ties
        // (records arrive sorted by x from the BTreeMap).
        records.sort_by(|a, b| a.energy.total_cmp(&b.energy));
        Ok(SampleSet {
            records,
            total_reads,
            seed,
        })
    }

    /// Records sorted by `(energy, x)`; first is the best read.
    pub fn records(&self) -> &[SampleRecord] {
        &self.records
    }

    pub fn total_reads(&self) -> u64 {
        self.total_reads
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Root seed this set descends from.
    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Best record, if any.
    pub fn min_energy_record(&self) -> Option<&SampleRecord> {
        self.records.first()
    }

    /// Checks every invariant against the QUBO the set claims to describe.
    pub fn check_consistency(&self, q: &QuboMatrix) -> Result<(), Error> {
        let mut occurrence_sum = 0u64;
        for record in &self.records {
            if record.occurrences == 0 {
                return Err(Error::InvalidParameter(
                    "sample record with zero occurrences".into(),
                ));
            }
            occurrence_sum += record.occurrences;
            let expected = q.energy(&record.x)?;
            if record.energy != expected {
                return Err(Error::InvalidParameter(format!(
                    "record energy {} does not match recomputed {}",
                    record.energy, expected
                )));
            }
        }
        if occurrence_sum != self.total_reads {
            return Err(Error::InvalidParameter(format!(
                "occurrences sum to {} but total_reads is {}",
                occurrence_sum, self.total_reads
            )));
        }
        for pair in self.records.windows(2) {
            let ordered = pair[0].energy < pair[1].energy
                || (pair[0].energy == pair[1].energy && pair[0].x < pair[1].x);
            if !ordered {
                return Err(Error::InvalidParameter(
                    "records not strictly sorted by (energy, x)".into(),
                ));
            }
        }
        Ok(())
    }
}

/// Simulated-annealing schedule parameters.
///
/// Temperatures apply to energies normalized by the largest coefficient
/// magnitude of the QUBO, so the defaults are scale-free.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SaParams {
    pub num_reads: usize,
    /// Sweeps per read; one sweep proposes every variable once in index order.
    pub sweeps: usize,
    pub beta_min: f64,
    pub beta_max: f64,
    /// Root seed; read r runs on `seed + r`.
    pub seed: u64,
}

impl Default for SaParams {
    fn default() -> Self {
        SaParams {
            num_reads: 2000,
            sweeps: 100,
            beta_min: 0.1,
            beta_max: 10.0,
            seed: 0,
        }
    }
}

impl SaParams {
    pub fn validate(&self) -> Result<(), Error> {
        if self.num_reads == 0 {
            return Err(Error::InvalidParameter("num_reads must be >= 1".into()));
        }
        if self.sweeps == 0 {
            return Err(Error::InvalidParameter("sweeps must be >= 1".into()));
        }
        if !(self.beta_min.is_finite() && self.beta_max.is_finite())
            || self.beta_min <= 0.0
            || self.beta_min > self.beta_max
        {
            return Err(Error::InvalidParameter(format!(
                "need 0 < beta_min <= beta_max, got [{}, {}]",
                self.beta_min, self.beta_max
            )));
        }
        Ok(())
    }
}

/// Anything that can draw low-energy samples from a QUBO.
///
/// The solver in [`crate::admm`] talks to samplers only through this
/// interface, so exhaustive enumeration, simulated annealing, and external
/// hardware are interchangeable.
pub trait Sampler {
    fn sample(&self, q: &QuboMatrix, seed: u64) -> Result<SampleSet, Error>;
}

/// Exhaustive enumeration as a [`Sampler`]; exact but capped at
/// [`MAX_BRUTE_FORCE_VARS`] variables.
#[derive(Clone, Copy, Debug, Default)]
pub struct BruteForceSampler;

impl Sampler for BruteForceSampler {
    fn sample(&self, q: &QuboMatrix, seed: u64) -> Result<SampleSet, Error> {
        brute::brute_force_sample_seeded(q, seed)
    }
}

/// Simulated annealing as a [`Sampler`]; the per-call seed replaces
/// `params.seed`.
#[derive(Clone, Copy, Debug, Default)]
pub struct SaSampler {
    pub params: SaParams,
}

impl SaSampler {
    pub fn new(params: SaParams) -> Self {
        SaSampler { params }
    }
}

impl Sampler for SaSampler {
    fn sample(&self, q: &QuboMatrix, seed: u64) -> Result<SampleSet, Error> {
        let params = SaParams {
            seed,
            ..self.params
        };
        simulated_annealing_sample(q, &params)
    }
}
