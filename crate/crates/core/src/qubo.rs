//! Binary vectors and QUBO matrices.
//!
//! A QUBO over `x in {0,1}^n` is stored in upper-triangular canonical form:
//! one coefficient per unordered pair `{i, j}` keyed by `(min, max)`, plus a
//! constant offset. Because `x_i^2 = x_i`, diagonal entries `(i, i)` double
//! as linear terms. The energy of an assignment is
//!
//! ```text
//! E(x) = sum_{i <= j} q_ij x_i x_j + offset
//! ```

use std::collections::BTreeMap;
use std::fmt;

use crate::error::Error;

/// Fixed-length vector of binary variables.
///
/// Ordering is lexicographic with `x_0` most significant, so `011 < 100`.
/// That ordering is the tie-breaker used everywhere a minimum over
/// assignments has to be unique.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BitVector {
    bits: Vec<u8>,
}

impl BitVector {
    /// All-zeros vector of length `n`.
    pub fn zeros(n: usize) -> Self {
        BitVector { bits: vec![0; n] }
    }

    /// Builds from an explicit bit list; every entry must be 0 or 1.
    pub fn from_bits(bits: Vec<u8>) -> Result<Self, Error> {
        for (index, &value) in bits.iter().enumerate() {
            if value > 1 {
                return Err(Error::InvalidBit { index, value });
            }
        }
        Ok(BitVector { bits })
    }

    /// Unpacks the low `n` bits of `mask`, with bit `i` of the mask becoming
    /// `x_i`. Panics if `n > 64`.
    pub fn from_mask(mask: u64, n: usize) -> Self {
        assert!(n <= 64, "mask form only covers up to 64 variables");
        BitVector {
            bits: (0..n).map(|i| ((mask >> i) & 1) as u8).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    /// Value of `x_i` as 0 or 1.
    #[inline]
    pub fn bit(&self, i: usize) -> u8 {
        self.bits[i]
    }

    #[inline]
    pub fn is_set(&self, i: usize) -> bool {
        self.bits[i] == 1
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    pub fn count_ones(&self) -> usize {
        self.bits.iter().filter(|&&b| b == 1).count()
    }

    pub(crate) fn from_raw(bits: Vec<u8>) -> Self {
        debug_assert!(bits.iter().all(|&b| b <= 1));
        BitVector { bits }
    }
}

impl fmt::Debug for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVector(")?;
        for &b in &self.bits {
            write!(f, "{b}")?;
        }
        write!(f, ")")
    }
}

/// Upper-triangular QUBO matrix with a constant offset.
///
/// Only structurally nonzero coefficients are stored; terms that cancel to
/// exactly zero are dropped, so two matrices describing the same quadratic
/// form compare equal.
#[derive(Clone, Debug, PartialEq)]
pub struct QuboMatrix {
    n: usize,
    terms: BTreeMap<(usize, usize), f64>,
    offset: f64,
}

impl QuboMatrix {
    /// Zero quadratic form over `n` variables.
    pub fn zero(n: usize) -> Self {
        QuboMatrix {
            n,
            terms: BTreeMap::new(),
            offset: 0.0,
        }
    }

    /// Builds from `((i, j), value)` pairs; indices in either order are
    /// folded onto `(min, max)` and repeated pairs accumulate.
    pub fn from_terms<I>(n: usize, terms: I, offset: f64) -> Result<Self, Error>
    where
        I: IntoIterator<Item = ((usize, usize), f64)>,
    {
        let mut q = QuboMatrix::zero(n);
        for ((i, j), value) in terms {
            q.add_term(i, j, value)?;
        }
        q.add_offset(offset);
        Ok(q)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    /// Adds `value` to the coefficient of `x_i x_j` (order-insensitive).
    pub fn add_term(&mut self, i: usize, j: usize, value: f64) -> Result<(), Error> {
        let index = i.max(j);
        if index >= self.n {
            return Err(Error::IndexOutOfRange { index, n: self.n });
        }
        if !value.is_finite() {
            return Err(Error::NonFiniteCoefficient { i, j, value });
        }
        let key = (i.min(j), index);
        let entry = self.terms.entry(key).or_insert(0.0);
        *entry += value;
        if *entry == 0.0 {
            self.terms.remove(&key);
        }
        Ok(())
    }

    pub fn add_offset(&mut self, value: f64) {
        self.offset += value;
    }

    /// Coefficient of `x_i x_j`; zero when the term is absent.
    pub fn term(&self, i: usize, j: usize) -> f64 {
        let key = (i.min(j), i.max(j));
        self.terms.get(&key).copied().unwrap_or(0.0)
    }

    /// Stored terms in key order; every key satisfies `i <= j < n`.
    pub fn terms(&self) -> impl Iterator<Item = ((usize, usize), f64)> + '_ {
        self.terms.iter().map(|(&k, &v)| (k, v))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Energy `x' Q x + offset` of one assignment.
    pub fn energy(&self, x: &BitVector) -> Result<f64, Error> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: x.len(),
            });
        }
        let mut acc = 0.0;
        for (&(i, j), &v) in &self.terms {
            if x.is_set(i) && x.is_set(j) {
                acc += v;
            }
        }
        Ok(acc + self.offset)
    }

    /// Returns `self + alpha * other`; offsets combine the same way.
    pub fn add_scaled(&self, other: &QuboMatrix, alpha: f64) -> Result<QuboMatrix, Error> {
        if other.n != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: other.n,
            });
        }
        let mut out = self.clone();
        for (&(i, j), &v) in &other.terms {
            out.add_term(i, j, alpha * v)?;
        }
        out.add_offset(alpha * other.offset);
        Ok(out)
    }

    /// QUBO form of the squared affine expression `(a . x + b)^2`.
    ///
    /// Using `x_i^2 = x_i`:
    /// diagonal `a_i^2 + 2 b a_i`, off-diagonal `2 a_i a_j` for `i < j`,
    /// offset `b^2`.
    pub fn square_of_affine(a: &[f64], b: f64) -> QuboMatrix {
        let n = a.len();
        let mut q = QuboMatrix::zero(n);
        for i in 0..n {
            if a[i] == 0.0 {
                continue;
            }
            q.add_term(i, i, a[i] * a[i] + 2.0 * b * a[i])
                .expect("index in range");
            for j in (i + 1)..n {
                if a[j] != 0.0 {
                    q.add_term(i, j, 2.0 * a[i] * a[j]).expect("index in range");
                }
            }
        }
        q.add_offset(b * b);
        q
    }

    /// QUBO form of the affine expression `a . x + b` (diagonal plus offset).
    pub fn affine(a: &[f64], b: f64) -> QuboMatrix {
        let mut q = QuboMatrix::zero(a.len());
        for (i, &coeff) in a.iter().enumerate() {
            if coeff != 0.0 {
                q.add_term(i, i, coeff).expect("index in range");
            }
        }
        q.add_offset(b);
        q
    }

    /// Largest coefficient magnitude; offset excluded. Zero for the zero form.
    pub fn max_abs_term(&self) -> f64 {
        self.terms.values().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Sum of coefficient magnitudes; offset excluded.
    pub fn sum_abs_terms(&self) -> f64 {
        self.terms.values().map(|v| v.abs()).sum()
    }
}

/// Neighbor-list view of a [`QuboMatrix`] for O(degree) single-flip deltas.
///
/// `local(x, i) = E(x with x_i = 1) - E(x with x_i = 0)` given the rest of
/// `x`; flipping `x_i` changes the energy by `+local` (0 to 1) or `-local`
/// (1 to 0).
pub(crate) struct Adjacency {
    diag: Vec<f64>,
    neighbors: Vec<Vec<(usize, f64)>>,
}

impl Adjacency {
    pub(crate) fn new(q: &QuboMatrix) -> Self {
        let n = q.n();
        let mut diag = vec![0.0; n];
        let mut neighbors = vec![Vec::new(); n];
        for ((i, j), v) in q.terms() {
            if i == j {
                diag[i] = v;
            } else {
                neighbors[i].push((j, v));
                neighbors[j].push((i, v));
            }
        }
        Adjacency { diag, neighbors }
    }

    pub(crate) fn n(&self) -> usize {
        self.diag.len()
    }

    /// Energy change from flipping `x_i` in `bits`.
    #[inline]
    pub(crate) fn flip_delta(&self, bits: &[u8], i: usize) -> f64 {
        let mut local = self.diag[i];
        for &(j, w) in &self.neighbors[i] {
            if bits[j] == 1 {
                local += w;
            }
        }
        if bits[i] == 1 {
            -local
        } else {
            local
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Oracle: dense symmetric evaluation, summing q_ij over the full matrix
    /// with off-diagonal mass split across both triangles.
    #[allow(clippy::needless_range_loop)]
    fn dense_energy(q: &QuboMatrix, x: &BitVector) -> f64 {
        let n = q.n();
        let mut full = vec![vec![0.0; n]; n];
        for ((i, j), v) in q.terms() {
            if i == j {
                full[i][i] += v;
            } else {
                full[i][j] += v / 2.0;
                full[j][i] += v / 2.0;
            }
        }
        let mut acc = q.offset();
        for i in 0..n {
            for j in 0..n {
                acc += full[i][j] * (x.bit(i) as f64) * (x.bit(j) as f64);
            }
        }
        acc
    }

    fn all_assignments(n: usize) -> impl Iterator<Item = BitVector> {
        (0u64..(1 << n)).map(move |mask| BitVector::from_mask(mask, n))
    }

    #[test]
    fn energy_of_example_matrix() {
        let q =
            QuboMatrix::from_terms(2, [((0, 0), 1.0), ((0, 1), 2.0), ((1, 1), 3.0)], 0.5).unwrap();
        assert_eq!(q.energy(&BitVector::from_mask(0b00, 2)).unwrap(), 0.5);
        assert_eq!(q.energy(&BitVector::from_mask(0b01, 2)).unwrap(), 1.5);
        assert_eq!(q.energy(&BitVector::from_mask(0b10, 2)).unwrap(), 3.5);
        assert_eq!(q.energy(&BitVector::from_mask(0b11, 2)).unwrap(), 6.5);
    }

    #[test]
    fn add_term_normalizes_index_order() {
        let mut q = QuboMatrix::zero(3);
        q.add_term(2, 0, 4.0).unwrap();
        assert_eq!(q.term(0, 2), 4.0);
        assert_eq!(q.term(2, 0), 4.0);
        let keys: Vec<_> = q.terms().map(|(k, _)| k).collect();
        assert_eq!(keys, vec![(0, 2)]);
    }

    #[test]
    fn add_term_accumulates_and_drops_exact_zeros() {
        let mut q = QuboMatrix::zero(2);
        q.add_term(0, 1, 1.5).unwrap();
        q.add_term(1, 0, 2.5).unwrap();
        assert_eq!(q.term(0, 1), 4.0);
        q.add_term(0, 1, -4.0).unwrap();
        assert_eq!(q.num_terms(), 0);
        assert_eq!(q, QuboMatrix::zero(2));
    }

    #[test]
    fn add_term_rejects_out_of_range_and_non_finite() {
        let mut q = QuboMatrix::zero(2);
        assert!(matches!(
            q.add_term(0, 2, 1.0),
            Err(Error::IndexOutOfRange { index: 2, n: 2 })
        ));
        assert!(matches!(
            q.add_term(0, 1, f64::NAN),
            Err(Error::NonFiniteCoefficient { .. })
        ));
    }

    #[test]
    fn energy_rejects_dimension_mismatch() {
        let q = QuboMatrix::zero(3);
        let x = BitVector::zeros(2);
        assert!(matches!(
            q.energy(&x),
            Err(Error::DimensionMismatch {
                expected: 3,
                got: 2
            })
        ));
    }

    #[test]
    fn square_of_affine_matches_hand_expansion() {
        // (x0 + x1 - 1)^2
        let q = QuboMatrix::square_of_affine(&[1.0, 1.0], -1.0);
        assert_eq!(q.term(0, 0), -1.0);
        assert_eq!(q.term(1, 1), -1.0);
        assert_eq!(q.term(0, 1), 2.0);
        assert_eq!(q.offset(), 1.0);
        assert_eq!(q.energy(&BitVector::from_mask(0b00, 2)).unwrap(), 1.0);
        assert_eq!(q.energy(&BitVector::from_mask(0b01, 2)).unwrap(), 0.0);
        assert_eq!(q.energy(&BitVector::from_mask(0b11, 2)).unwrap(), 1.0);
    }

    #[test]
    fn affine_matches_dot_product() {
        let a = [2.0, -3.0, 0.5];
        let q = QuboMatrix::affine(&a, 7.0);
        for x in all_assignments(3) {
            let dot: f64 = (0..3).map(|i| a[i] * x.bit(i) as f64).sum();
            assert_eq!(q.energy(&x).unwrap(), dot + 7.0);
        }
    }

    #[test]
    fn bitvector_orders_lexicographically_from_x0() {
        let a = BitVector::from_bits(vec![0, 1, 1]).unwrap();
        let b = BitVector::from_bits(vec![1, 0, 0]).unwrap();
        assert!(a < b);
        // Mask order disagrees with lexicographic order here: a's mask is
        // 0b110 = 6, b's is 0b001 = 1.
        assert!(BitVector::from_mask(6, 3) < BitVector::from_mask(1, 3));
    }

    #[test]
    fn from_bits_rejects_non_binary_entries() {
        assert!(matches!(
            BitVector::from_bits(vec![0, 2]),
            Err(Error::InvalidBit { index: 1, value: 2 })
        ));
    }

    #[test]
    fn from_mask_places_bit_i_at_x_i() {
        let x = BitVector::from_mask(0b101, 3);
        assert_eq!(x.bits(), &[1, 0, 1]);
        assert_eq!(x.count_ones(), 2);
    }

    #[test]
    fn flip_delta_matches_energy_difference() {
        let q = QuboMatrix::from_terms(
            4,
            [
                ((0, 0), 1.0),
                ((1, 1), -2.0),
                ((0, 1), 3.0),
                ((1, 3), -1.5),
                ((2, 3), 0.25),
            ],
            0.75,
        )
        .unwrap();
        let adj = Adjacency::new(&q);
        for x in all_assignments(4) {
            for i in 0..4 {
                let mut flipped = x.bits().to_vec();
                flipped[i] ^= 1;
                let flipped = BitVector::from_raw(flipped);
                let expected = q.energy(&flipped).unwrap() - q.energy(&x).unwrap();
                assert_eq!(adj.flip_delta(x.bits(), i), expected);
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(256))]

        #[test]
        fn energy_matches_dense_oracle(
            entries in proptest::collection::vec(((0usize..6, 0usize..6), -5.0f64..5.0), 0..20),
            offset in -3.0f64..3.0,
            mask in 0u64..64,
        ) {
            let q = QuboMatrix::from_terms(6, entries, offset).unwrap();
            let x = BitVector::from_mask(mask, 6);
            let direct = q.energy(&x).unwrap();
            let oracle = dense_energy(&q, &x);
            prop_assert!((direct - oracle).abs() <= 1e-9 * (1.0 + oracle.abs()));
        }

        #[test]
        fn canonical_keys_are_upper_triangular_and_sorted(
            entries in proptest::collection::vec(((0usize..8, 0usize..8), -5.0f64..5.0), 0..30),
        ) {
            let q = QuboMatrix::from_terms(8, entries, 0.0).unwrap();
            let keys: Vec<_> = q.terms().map(|(k, _)| k).collect();
            for &(i, j) in &keys {
                prop_assert!(i <= j && j < 8);
            }
            let mut sorted = keys.clone();
            sorted.sort();
            sorted.dedup();
            prop_assert_eq!(keys, sorted);
        }

        #[test]
        fn add_scaled_distributes_over_energy(
            left in proptest::collection::vec(((0usize..5, 0usize..5), -4.0f64..4.0), 0..12),
            right in proptest::collection::vec(((0usize..5, 0usize..5), -4.0f64..4.0), 0..12),
            alpha in -3.0f64..3.0,
            mask in 0u64..32,
        ) {
            let a = QuboMatrix::from_terms(5, left, 1.25).unwrap();
            let b = QuboMatrix::from_terms(5, right, -0.5).unwrap();
            let combined = a.add_scaled(&b, alpha).unwrap();
            let x = BitVector::from_mask(mask, 5);
            let expected = a.energy(&x).unwrap() + alpha * b.energy(&x).unwrap();
            prop_assert!((combined.energy(&x).unwrap() - expected).abs() <= 1e-9 * (1.0 + expected.abs()));
        }

        #[test]
        fn square_of_affine_equals_square_and_is_nonnegative(
            a in proptest::collection::vec(-4.0f64..4.0, 1..7),
            b in -4.0f64..4.0,
            mask in 0u64..128,
        ) {
            let n = a.len();
            let q = QuboMatrix::square_of_affine(&a, b);
            let x = BitVector::from_mask(mask & ((1 << n) - 1), n);
            let dot: f64 = (0..n).map(|i| a[i] * x.bit(i) as f64).sum();
            let expected = (dot + b) * (dot + b);
            let got = q.energy(&x).unwrap();
            prop_assert!((got - expected).abs() <= 1e-9 * (1.0 + expected.abs()));
            prop_assert!(got >= -1e-9);
        }
    }

    #[test]
    fn add_scaled_rejects_dimension_mismatch() {
        let a = QuboMatrix::zero(3);
        let b = QuboMatrix::zero(4);
        assert!(matches!(
            a.add_scaled(&b, 1.0),
            Err(Error::DimensionMismatch {
                expected: 3,
                got: 4
            })
        ));
    }
}
