//! Constrained binary programs and the two classic constraint encodings.
//!
//! A [`ConstrainedProblem`] is an objective QUBO `f(x)` plus integer linear
//! constraints, either `F_l . x = C_l` or `G_m . x <= D_m`. Constraint
//! coefficients and bounds are integers, so residuals and feasibility checks
//! are exact; no tolerance is involved anywhere.
//!
//! Two encodings reduce constraints to plain QUBO form:
//! [`ConstrainedProblem::penalized_qubo_equality`] folds equalities as
//! `mu * (F_l . x - C_l)^2`, and [`ConstrainedProblem::slack_encode`] folds
//! inequalities the traditional way, paying `ceil(log2(R_m + 1))` extra
//! binary variables per constraint. The dual-decomposition loop in
//! [`crate::admm`] is the slack-free alternative.

use crate::error::Error;
use crate::qubo::{BitVector, QuboMatrix};

/// Which side of the constraint zoo a [`LinearConstraint`] lives in.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConstraintKind {
    /// `coeffs . x = bound`
    Equality,
    /// `coeffs . x <= bound`
    InequalityLe,
}

/// Integer linear constraint over binary variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearConstraint {
    coeffs: Vec<i64>,
    bound: i64,
    kind: ConstraintKind,
}

impl LinearConstraint {
    pub fn equality(coeffs: Vec<i64>, bound: i64) -> Self {
        LinearConstraint {
            coeffs,
            bound,
            kind: ConstraintKind::Equality,
        }
    }

    pub fn inequality_le(coeffs: Vec<i64>, bound: i64) -> Self {
        LinearConstraint {
            coeffs,
            bound,
            kind: ConstraintKind::InequalityLe,
        }
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    pub fn bound(&self) -> i64 {
        self.bound
    }

    pub fn kind(&self) -> ConstraintKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `coeffs . x`; exact integer arithmetic.
    pub fn dot(&self, x: &BitVector) -> i64 {
        debug_assert_eq!(x.len(), self.coeffs.len());
        self.coeffs
            .iter()
            .zip(x.bits())
            .map(|(&c, &b)| c * b as i64)
            .sum()
    }

    /// Signed gap `coeffs . x - bound`. Zero means tight; for `InequalityLe`
    /// a positive value means violated.
    pub fn residual(&self, x: &BitVector) -> i64 {
        self.dot(x) - self.bound
    }

    /// Whether `x` satisfies this constraint.
    pub fn satisfied_by(&self, x: &BitVector) -> bool {
        match self.kind {
            ConstraintKind::Equality => self.residual(x) == 0,
            ConstraintKind::InequalityLe => self.residual(x) <= 0,
        }
    }

    /// Minimum of `coeffs . x` over the hypercube: sum of negative entries.
    fn min_dot(&self) -> i64 {
        self.coeffs.iter().filter(|&&c| c < 0).sum()
    }
}

/// Objective QUBO plus integer linear constraints.
///
/// `gamma` weights each violated constraint in the scalar infeasibility
/// measure [`ConstrainedProblem::evaluate_e_ineq`]; it must dominate the
/// objective's range for that measure to rank any feasible point below any
/// infeasible one. The default is `max(1, 10 * sum |objective terms|)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ConstrainedProblem {
    objective: QuboMatrix,
    equalities: Vec<LinearConstraint>,
    inequalities: Vec<LinearConstraint>,
    gamma: f64,
}

/// Result of [`ConstrainedProblem::slack_encode`]: an equivalent problem
/// without inequalities, plus how many slack bits each inequality cost.
#[derive(Clone, Debug)]
pub struct SlackEncoding {
    /// Enlarged problem over `n + sum(slack_bits)` variables; the original
    /// variables keep their indices, slack bits follow in constraint order.
    pub problem: ConstrainedProblem,
    /// Slack-bit count per original inequality, in order.
    pub slack_bits: Vec<usize>,
}

impl SlackEncoding {
    /// Total variable count of the enlarged problem.
    pub fn total_vars(&self) -> usize {
        self.problem.n()
    }
}

impl ConstrainedProblem {
    /// Builds a problem with the default `gamma`.
    pub fn new(
        objective: QuboMatrix,
        equalities: Vec<LinearConstraint>,
        inequalities: Vec<LinearConstraint>,
    ) -> Result<Self, Error> {
        let gamma = default_gamma(&objective);
        ConstrainedProblem::with_gamma(objective, equalities, inequalities, gamma)
    }

    /// Builds a problem with an explicit `gamma > 0`.
    pub fn with_gamma(
        objective: QuboMatrix,
        equalities: Vec<LinearConstraint>,
        inequalities: Vec<LinearConstraint>,
        gamma: f64,
    ) -> Result<Self, Error> {
        if !(gamma.is_finite() && gamma > 0.0) {
            return Err(Error::InvalidPenalty(gamma));
        }
        let n = objective.n();
        for (index, c) in equalities.iter().chain(inequalities.iter()).enumerate() {
            if c.len() != n {
                return Err(Error::ConstraintLength {
                    index,
                    expected: n,
                    got: c.len(),
                });
            }
        }
        if equalities
            .iter()
            .any(|c| c.kind() != ConstraintKind::Equality)
        {
            return Err(Error::InvalidParameter(
                "equalities list contains a non-equality constraint".into(),
            ));
        }
        if inequalities
            .iter()
            .any(|c| c.kind() != ConstraintKind::InequalityLe)
        {
            return Err(Error::InvalidParameter(
                "inequalities list contains a non-inequality constraint".into(),
            ));
        }
        Ok(ConstrainedProblem {
            objective,
            equalities,
            inequalities,
            gamma,
        })
    }

    pub fn n(&self) -> usize {
        self.objective.n()
    }

    pub fn objective(&self) -> &QuboMatrix {
        &self.objective
    }

    pub fn equalities(&self) -> &[LinearConstraint] {
        &self.equalities
    }

    pub fn inequalities(&self) -> &[LinearConstraint] {
        &self.inequalities
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Constraint gaps of `x`: `(F_l . x - C_l)` per equality and
    /// `(G_m . x - D_m)` per inequality.
    pub fn residuals(&self, x: &BitVector) -> Result<(Vec<f64>, Vec<f64>), Error> {
        self.check_dim(x)?;
        let eq = self
            .equalities
            .iter()
            .map(|c| c.residual(x) as f64)
            .collect();
        let ineq = self
            .inequalities
            .iter()
            .map(|c| c.residual(x) as f64)
            .collect();
        Ok((eq, ineq))
    }

    /// True iff every equality residual is zero and every inequality
    /// residual is non-positive. Exact; no tolerance.
    pub fn is_feasible(&self, x: &BitVector) -> Result<bool, Error> {
        Ok(self.count_violations(x)? == 0)
    }

    /// Number of violated constraints (equalities off zero plus
    /// inequalities with positive residual).
    pub fn count_violations(&self, x: &BitVector) -> Result<usize, Error> {
        self.check_dim(x)?;
        Ok(self
            .equalities
            .iter()
            .chain(self.inequalities.iter())
            .filter(|c| !c.satisfied_by(x))
            .count())
    }

    /// Scalar merit `f(x) + gamma * (violated constraint count)`.
    ///
    /// Feasible points score exactly their objective energy; each violated
    /// constraint adds one step of `gamma`.
    pub fn evaluate_e_ineq(&self, x: &BitVector) -> Result<f64, Error> {
        let energy = self.objective.energy(x)?;
        let violations = self.count_violations(x)?;
        Ok(energy + self.gamma * violations as f64)
    }

    /// Objective plus `mu * sum_l (F_l . x - C_l)^2`.
    ///
    /// Inequalities are untouched; they are handled by either
    /// [`ConstrainedProblem::slack_encode`] or the solver in [`crate::admm`].
    pub fn penalized_qubo_equality(&self, mu: f64) -> Result<QuboMatrix, Error> {
        if !(mu.is_finite() && mu > 0.0) {
            return Err(Error::InvalidPenalty(mu));
        }
        let mut out = self.objective.clone();
        for c in &self.equalities {
            let coeffs: Vec<f64> = c.coeffs().iter().map(|&v| v as f64).collect();
            let square = QuboMatrix::square_of_affine(&coeffs, -(c.bound() as f64));
            out = out.add_scaled(&square, mu)?;
        }
        Ok(out)
    }

    /// Classic slack-bit encoding of the inequalities.
    ///
    /// Inequality m with maximum slack `R_m = D_m - min_x(G_m . x)` (the
    /// minimum taken coefficient-wise over the hypercube) gains
    /// `k_m = ceil(log2(R_m + 1))` fresh binary variables encoding an integer
    /// `s_m in {0..R_m}` with coefficients `1, 2, 4, ..., 2^(k-2)` and a final
    /// coefficient `R_m - (2^(k-1) - 1)` so the range is covered exactly with
    /// no overshoot. The returned objective gains
    /// `mu * sum_m (G_m . x - D_m + s_m)^2` and the inequality list is empty.
    ///
    /// Constraints with `R_m <= 0` get no bits: either every assignment is
    /// tight-or-violated and the penalty does what it can, or the constraint
    /// only binds at equality.
    pub fn slack_encode(&self, mu: f64) -> Result<SlackEncoding, Error> {
        if !(mu.is_finite() && mu > 0.0) {
            return Err(Error::InvalidPenalty(mu));
        }
        let n = self.n();
        let expansions: Vec<Vec<i64>> = self
            .inequalities
            .iter()
            .map(|c| slack_coefficients(c.bound() - c.min_dot()))
            .collect();
        let slack_bits: Vec<usize> = expansions.iter().map(Vec::len).collect();
        let total: usize = n + slack_bits.iter().sum::<usize>();

        let mut objective =
            QuboMatrix::from_terms(total, self.objective.terms(), self.objective.offset())?;
        let mut next_slack = n;
        for (c, expansion) in self.inequalities.iter().zip(&expansions) {
            let mut affine = vec![0.0; total];
            for (j, &g) in c.coeffs().iter().enumerate() {
                affine[j] = g as f64;
            }
            for &coeff in expansion {
                affine[next_slack] = coeff as f64;
                next_slack += 1;
            }
            let square = QuboMatrix::square_of_affine(&affine, -(c.bound() as f64));
            objective = objective.add_scaled(&square, mu)?;
        }

        let equalities = self
            .equalities
            .iter()
            .map(|c| {
                let mut coeffs = c.coeffs().to_vec();
                coeffs.resize(total, 0);
                LinearConstraint::equality(coeffs, c.bound())
            })
            .collect();

        let problem =
            ConstrainedProblem::with_gamma(objective, equalities, Vec::new(), self.gamma)?;
        Ok(SlackEncoding {
            problem,
            slack_bits,
        })
    }

    fn check_dim(&self, x: &BitVector) -> Result<(), Error> {
        if x.len() != self.n() {
            return Err(Error::DimensionMismatch {
                expected: self.n(),
                got: x.len(),
            });
        }
        Ok(())
    }
}

/// `max(1, 10 * sum |objective terms|)`: an upper bound on the objective's
/// range with headroom, so one constraint violation always outweighs any
/// objective difference.
fn default_gamma(objective: &QuboMatrix) -> f64 {
    (10.0 * objective.sum_abs_terms()).max(1.0)
}

/// Binary-expansion coefficients covering `{0..r}` exactly; empty for r <= 0.
///
/// `k = bit_length(r)` coefficients: `1, 2, ..., 2^(k-2)` and a last
/// coefficient `r - (2^(k-1) - 1)`, which lies in `[1, 2^(k-1)]`, so every
/// integer in the range is representable and none above it.
fn slack_coefficients(r: i64) -> Vec<i64> {
    if r <= 0 {
        return Vec::new();
    }
    let k = (64 - r.leading_zeros()) as usize;
    let mut coeffs: Vec<i64> = (0..k - 1).map(|t| 1i64 << t).collect();
    coeffs.push(r - ((1i64 << (k - 1)) - 1));
    coeffs
}
