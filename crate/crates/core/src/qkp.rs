//! Quadratic knapsack instances: generation, exact oracle, accuracy metric.
//!
//! An instance asks to maximize `x' P x` subject to `w . x <= c` with
//! nonnegative integer profits, so it converts to the minimization form the
//! solver wants by negating profits. Instances follow the classic dense
//! random scheme: each upper-triangular profit (diagonal included) is
//! nonzero with probability `delta` and then uniform on `[1, 100]`, weights
//! are uniform on `[1, 50]`, and the capacity is uniform on
//! `[min(50, sum w), sum w]`.
//!
//! Generation is reproducible across platforms: all draws come from a
//! ChaCha20 stream through a fixed word discipline (see [`GENERATOR_ID`]),
//! so `(n, delta, seed)` pins the instance bytes, not just its distribution.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::error::Error;
use crate::problem::{ConstrainedProblem, LinearConstraint};
use crate::qubo::{BitVector, QuboMatrix};

/// Name of the instance-generation discipline, recorded in instance files.
///
/// `chacha20-qkp-v1` means: seed ChaCha20 with the 64-bit instance seed;
/// walk the upper triangle row-major (i from 0, j from i); per cell draw one
/// word `u` and call the cell nonzero when `delta >= 1` or
/// `(u >> 11) / 2^53 < delta`, drawing a second word `v` for the value
/// `1 + v mod 100` only when nonzero; then one word per weight,
/// `1 + u mod 50`; then one word for the capacity,
/// `lo + u mod (hi - lo + 1)` with `lo = min(50, sum w)`, `hi = sum w`.
pub const GENERATOR_ID: &str = "chacha20-qkp-v1";

/// Cap for [`brute_force_opt`] (2^24 assignments).
pub const MAX_ORACLE_VARS: usize = 24;

/// One quadratic knapsack instance.
///
/// Profits are stored as sparse upper-triangular triplets `(i, j, value)`
/// with `i <= j`, sorted row-major, nonzero values only. The objective
/// `x' P x` counts each stored triplet once when both endpoints are set.
#[derive(Clone, Debug, PartialEq)]
pub struct QkpInstance {
    pub n: usize,
    pub profits: Vec<(usize, usize, i64)>,
    pub weights: Vec<i64>,
    pub capacity: i64,
    pub delta: f64,
    pub seed: u64,
}

impl QkpInstance {
    /// Profit `x' P x` of an assignment; exact integer arithmetic.
    pub fn profit(&self, x: &BitVector) -> i64 {
        debug_assert_eq!(x.len(), self.n);
        self.profits
            .iter()
            .filter(|&&(i, j, _)| x.is_set(i) && x.is_set(j))
            .map(|&(_, _, v)| v)
            .sum()
    }

    /// Total load `w . x`.
    pub fn load(&self, x: &BitVector) -> i64 {
        self.weights
            .iter()
            .zip(x.bits())
            .map(|(&w, &b)| w * b as i64)
            .sum()
    }

    pub fn total_weight(&self) -> i64 {
        self.weights.iter().sum()
    }
}

/// Draws an instance; deterministic in `(n, delta, seed)`.
///
/// Panics if `n = 0` or `delta` is outside `(0, 1]`; those are caller bugs,
/// not data conditions.
pub fn generate(n: usize, delta: f64, seed: u64) -> QkpInstance {
    assert!(n >= 1, "instance needs at least one variable");
    assert!(
        delta > 0.0 && delta <= 1.0,
        "density must be in (0, 1], got {delta}"
    );
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut profits = Vec::new();
    for i in 0..n {
        for j in i..n {
            let u = rng.next_u64();
            // Top 53 bits against delta; delta = 1 short-circuits so the
            // comparison never misfires on the open upper end.
            let nonzero = delta >= 1.0 || ((u >> 11) as f64) * (1.0 / (1u64 << 53) as f64) < delta;
            if nonzero {
                let v = 1 + (rng.next_u64() % 100) as i64;
                profits.push((i, j, v));
            }
        }
    }
    let weights: Vec<i64> = (0..n).map(|_| 1 + (rng.next_u64() % 50) as i64).collect();
    let sum_w: i64 = weights.iter().sum();
    let lo = sum_w.min(50);
    let span = (sum_w - lo + 1) as u64;
    let capacity = lo + (rng.next_u64() % span) as i64;
    QkpInstance {
        n,
        profits,
        weights,
        capacity,
        delta,
        seed,
    }
}

/// Generates with [`generate`], retrying `seed + 1, seed + 2, ...` until the
/// instance's constrained optimum is positive (the accuracy metric divides
/// by it). Returns the instance and how many seeds were skipped.
///
/// Needs the oracle, so `n` is capped at [`MAX_ORACLE_VARS`].
pub fn generate_nondegenerate(
    n: usize,
    delta: f64,
    seed: u64,
) -> Result<(QkpInstance, u64), Error> {
    const MAX_ATTEMPTS: u64 = 64;
    for attempt in 0..MAX_ATTEMPTS {
        let inst = generate(n, delta, seed.wrapping_add(attempt));
        let (_, value) = brute_force_opt(&inst)?;
        if value > 0 {
            return Ok((inst, attempt));
        }
    }
    Err(Error::DegenerateInstances {
        start_seed: seed,
        attempts: MAX_ATTEMPTS,
    })
}

/// Minimization form: objective terms `-p_ij`, one `w . x <= c` constraint.
pub fn to_problem(inst: &QkpInstance) -> ConstrainedProblem {
    let objective = QuboMatrix::from_terms(
        inst.n,
        inst.profits.iter().map(|&(i, j, v)| ((i, j), -(v as f64))),
        0.0,
    )
    .expect("instance indices are in range and values finite");
    ConstrainedProblem::new(
        objective,
        vec![],
        vec![LinearConstraint::inequality_le(
            inst.weights.clone(),
            inst.capacity,
        )],
    )
    .expect("constraint length matches n")
}

/// Exhaustive constrained maximizer: best profit over all feasible
/// assignments, ties to the lexicographically smallest assignment.
pub fn brute_force_opt(inst: &QkpInstance) -> Result<(BitVector, i64), Error> {
    if inst.n > MAX_ORACLE_VARS {
        return Err(Error::TooManyVariables {
            n: inst.n,
            max: MAX_ORACLE_VARS,
        });
    }
    let n = inst.n;
    // Profit and load updated incrementally along a Gray-code walk; both are
    // integers, so the running values stay exact.
    let mut diag = vec![0i64; n];
    let mut neighbors: Vec<Vec<(usize, i64)>> = vec![Vec::new(); n];
    for &(i, j, v) in &inst.profits {
        if i == j {
            diag[i] += v;
        } else {
            neighbors[i].push((j, v));
            neighbors[j].push((i, v));
        }
    }

    let mut bits = vec![0u8; n];
    let mut profit = 0i64;
    let mut load = 0i64;
    // x = 0 is always feasible: weights are positive and capacity >= 0 by
    // construction (callers may build degenerate instances by hand; the scan
    // still finds the true optimum, possibly with no feasible point at all).
    let mut best: Option<(u64, i64)> = if load <= inst.capacity {
        Some((0, 0))
    } else {
        None
    };

    for step in 1u64..(1 << n) {
        let flip = step.trailing_zeros() as usize;
        let mut local = diag[flip];
        for &(j, v) in &neighbors[flip] {
            if bits[j] == 1 {
                local += v;
            }
        }
        if bits[flip] == 1 {
            profit -= local;
            load -= inst.weights[flip];
            bits[flip] = 0;
        } else {
            profit += local;
            load += inst.weights[flip];
            bits[flip] = 1;
        }
        if load > inst.capacity {
            continue;
        }
        let mask = gray(step);
        let better = match best {
            None => true,
            Some((bm, bp)) => profit > bp || (profit == bp && lex_key(mask, n) < lex_key(bm, n)),
        };
        if better {
            best = Some((mask, profit));
        }
    }

    match best {
        Some((mask, value)) => Ok((BitVector::from_mask(mask, n), value)),
        None => Err(Error::InvalidParameter(
            "no feasible assignment exists (negative capacity)".into(),
        )),
    }
}

/// Gray code of `k`: bit i of the result is the state of `x_i` after k steps.
#[inline]
fn gray(k: u64) -> u64 {
    k ^ (k >> 1)
}

/// Key whose numeric order equals lexicographic order of the unpacked bits
/// (`x_0` most significant).
#[inline]
fn lex_key(mask: u64, n: usize) -> u64 {
    mask.reverse_bits() >> (64 - n)
}

/// Mean absolute relative gap between reference optima and found values.
///
/// Every reference value must be strictly positive; a zero optimum makes the
/// relative gap undefined and is rejected (such instances are filtered at
/// generation, see [`generate_nondegenerate`]).
pub fn mape(opt_values: &[f64], found_values: &[f64]) -> Result<f64, Error> {
    if opt_values.len() != found_values.len() {
        return Err(Error::ValueListMismatch {
            left: opt_values.len(),
            right: found_values.len(),
        });
    }
    if opt_values.is_empty() {
        return Err(Error::InvalidParameter(
            "mape needs at least one value pair".into(),
        ));
    }
    let mut acc = 0.0;
    for (index, (&opt, &found)) in opt_values.iter().zip(found_values).enumerate() {
        if opt <= 0.0 {
            return Err(Error::NonPositiveReference { index });
        }
        acc += (opt - found).abs() / opt;
    }
    Ok(acc / opt_values.len() as f64)
}
