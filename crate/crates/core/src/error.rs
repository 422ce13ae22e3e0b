//! Error type shared across the crate.

/// Everything that can go wrong when building or solving a problem.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected} variables, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("constraint {index}: expected {expected} coefficients, got {got}")]
    ConstraintLength {
        index: usize,
        expected: usize,
        got: usize,
    },

    #[error("variable index {index} out of range for dimension {n}")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("coefficient at ({i}, {j}) is not finite: {value}")]
    NonFiniteCoefficient { i: usize, j: usize, value: f64 },

    #[error("penalty weight must be positive and finite, got {0}")]
    InvalidPenalty(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("exhaustive enumeration supports at most {max} variables, got {n}")]
    TooManyVariables { n: usize, max: usize },

    #[error("sample set is empty")]
    EmptySampleSet,

    #[error("bit value at position {index} is {value}, expected 0 or 1")]
    InvalidBit { index: usize, value: u8 },

    #[error("problem has no inequality constraints to relax")]
    NoInequalities,

    #[error("value lists differ in length: {left} vs {right}")]
    ValueListMismatch { left: usize, right: usize },

    #[error("reference value at position {index} is not positive; relative error is undefined")]
    NonPositiveReference { index: usize },

    #[error(
        "no instance with a positive optimum within {attempts} seeds starting at {start_seed}"
    )]
    DegenerateInstances { start_seed: u64, attempts: u64 },

    #[error("sampler failed at iteration {iteration}: {source}")]
    Sampler {
        iteration: usize,
        #[source]
        source: Box<Error>,
    },
}
