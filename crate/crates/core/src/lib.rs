//! Dual-decomposition solver for binary quadratic programs with linear
//! inequality constraints, targeting samplers that can only minimize an
//! unconstrained QUBO.
//!
//! A constrained problem
//!
//! ```text
//! min f(x) = x' Q x      s.t.  F_l x = C_l,   G_m x >= D_m,   x in {0,1}^n
//! ```
//!
//! is handled by an augmented-Lagrangian outer loop ([`admm`]) that folds the
//! inequality residuals into a sequence of plain QUBOs, each of which is
//! handed to a [`samplers::Sampler`]. Slack variables never enter the sampled
//! problem, so the variable count stays at `n` regardless of how many
//! inequality rows there are; the classic slack-bit encoding is still
//! available ([`problem::slack_encode`]) as a baseline.
//!
//! The [`qkp`] module generates quadratic knapsack instances and converts
//! them to this form, which is how the solver is exercised end to end.
//!
//! Everything is deterministic given a seed: samplers use counter-derived
//! per-read seeds, so results do not depend on thread scheduling, and the
//! `parallel` feature (rayon fan-out, on by default) produces bit-identical
//! output to the sequential fallback.

pub mod admm;
pub mod error;
pub mod exec;
pub mod problem;
pub mod qkp;
pub mod qubo;
pub mod samplers;

mod rng;

pub use error::Error;
pub use qubo::{BitVector, QuboMatrix};
