//! Augmented-Lagrangian outer loop over a QUBO sampler.
//!
//! Inequalities `G_m . x <= D_m` never enter the sampled problem as extra
//! variables. Instead each one gets an auxiliary real `z_m` and a multiplier
//! `lambda_m`, and every iteration samples the QUBO form of
//!
//! ```text
//! E(x) = f(x) + sum_m lambda_m (G_m.x - D_m - z_m)
//!             + (rho/2) sum_m (G_m.x - D_m - z_m)^2
//! ```
//!
//! then updates, in closed form,
//!
//! ```text
//! z_m      = min(0, G_m . x_cost - D_m)
//! lambda_m = lambda_m + rho (G_m . x_cost - D_m - z_m)
//! ```
//!
//! where `x_cost` is the best sample of the step QUBO. A multiplier grows
//! exactly when its constraint is violated by `x_cost`; a feasible `x_cost`
//! leaves every multiplier untouched. Separately, the best feasible sample
//! by original objective (`x_feas`) is retained as the incumbent answer
//! across iterations.
//!
//! The loop stops on whichever comes first: the iteration budget, `t_conv`
//! iterations without incumbent improvement, or the incumbent's residual
//! norm `sqrt(sum_m (G_m.x_feas - D_m - z_m)^2)` dropping below `epsilon`.

use std::time::{Duration, Instant};

use crate::error::Error;
use crate::problem::{ConstrainedProblem, LinearConstraint};
use crate::qubo::{BitVector, QuboMatrix};
use crate::rng::{child_seed, STREAM_ADMM_ITER};
use crate::samplers::{boltzmann_postprocess, greedy_descent_postprocess, SampleSet, Sampler};

/// What happens to each sample set before selection.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PostprocessMode {
    /// Use raw sampler output.
    None,
    /// Steepest single-flip descent per read (optimization-mode analog).
    Greedy,
    /// Gibbs re-equilibration at inverse temperature `beta`, normalized
    /// scale (sampling-mode analog).
    Boltzmann { beta: f64 },
}

/// Loop parameters. Defaults: `rho = 0.1`, `t_max = 30`, `t_conv = 10`,
/// `epsilon = 1e-3`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AdmmParams {
    /// Quadratic penalty coefficient on the relaxed residuals.
    pub rho: f64,
    /// Per-violation weight used when reporting infeasibility merit; `None`
    /// defers to the problem's own gamma. Never enters the step QUBO.
    pub gamma: Option<f64>,
    /// Iteration budget; exactly this many sampler calls at most.
    pub t_max: usize,
    /// Stop after this many consecutive iterations without incumbent
    /// improvement.
    pub t_conv: usize,
    /// Residual-norm convergence threshold.
    pub epsilon: f64,
    pub postprocess: PostprocessMode,
    /// Sweeps for `PostprocessMode::Boltzmann`.
    pub gibbs_sweeps: usize,
    /// Root seed; iteration t samples with a child seed derived by t.
    pub seed: u64,
}

impl Default for AdmmParams {
    fn default() -> Self {
        AdmmParams {
            rho: 0.1,
            gamma: None,
            t_max: 30,
            t_conv: 10,
            epsilon: 1e-3,
            postprocess: PostprocessMode::None,
            gibbs_sweeps: 10,
            seed: 0,
        }
    }
}

impl AdmmParams {
    pub fn validate(&self) -> Result<(), Error> {
        if !(self.rho.is_finite() && self.rho > 0.0) {
            return Err(Error::InvalidPenalty(self.rho));
        }
        if !(self.epsilon.is_finite() && self.epsilon > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "epsilon must be positive, got {}",
                self.epsilon
            )));
        }
        if self.t_max == 0 {
            return Err(Error::InvalidParameter("t_max must be >= 1".into()));
        }
        if self.t_conv == 0 || self.t_conv > self.t_max {
            return Err(Error::InvalidParameter(format!(
                "need 1 <= t_conv <= t_max, got t_conv = {}, t_max = {}",
                self.t_conv, self.t_max
            )));
        }
        if let Some(gamma) = self.gamma {
            if !(gamma.is_finite() && gamma > 0.0) {
                return Err(Error::InvalidPenalty(gamma));
            }
        }
        if let PostprocessMode::Boltzmann { beta } = self.postprocess {
            if !(beta.is_finite() && beta > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "boltzmann beta must be positive, got {beta}"
                )));
            }
        }
        Ok(())
    }
}

/// One line of the iteration history.
#[derive(Clone, Debug, PartialEq)]
pub struct IterationRecord {
    pub t: usize,
    /// Step-QUBO energy of the iteration's best sample (the augmented cost
    /// minus its x-independent gamma term).
    pub x_cost_energy: f64,
    /// Infeasibility merit of the incumbent; equals its objective value
    /// while the incumbent is feasible. Absent before the first incumbent.
    pub incumbent_e_ineq: Option<f64>,
    /// Convergence norm `sqrt(sum_m (G_m.x_feas - D_m - z_m)^2)` for the
    /// incumbent against this iteration's z. Absent before the first
    /// incumbent.
    pub residual_norm: Option<f64>,
}

/// Wall-clock breakdown of a solve.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Timings {
    /// Time inside the sampler.
    pub sampler: Duration,
    /// Time inside postprocessing.
    pub postprocess: Duration,
    /// QUBO construction, selection, updates, convergence checks.
    pub bookkeeping: Duration,
    /// Whole solve.
    pub total: Duration,
}

/// Mutable loop state; public so convergence checking is an ordinary
/// function of visible data.
#[derive(Clone, Debug)]
pub struct AdmmState {
    /// Iteration counter; starts at 1, already incremented when the
    /// convergence check runs (so `t = t_max + 1` means the budget is spent).
    pub t: usize,
    /// Auxiliary residual stand-ins, one per inequality; all `<= 0` after
    /// the first update.
    pub z: Vec<f64>,
    /// Multipliers, one per inequality.
    pub lambda: Vec<f64>,
    /// Best feasible sample seen so far with its objective value.
    pub best_feasible: Option<(BitVector, f64)>,
    /// Consecutive iterations without incumbent improvement.
    pub stall_counter: usize,
    pub history: Vec<IterationRecord>,
    pub timings: Timings,
}

/// Why the loop stopped.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StopReason {
    MaxIterations,
    Stalled,
    ConvergedResidual,
}

/// Final classification of a solve.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AdmmStatus {
    ConvergedResidual,
    Stalled,
    MaxIterations,
    /// No sampled assignment ever satisfied the constraints;
    /// `best_feasible` is absent exactly in this case.
    NoFeasibleFound,
}

/// Outcome of [`solve`].
#[derive(Clone, Debug)]
pub struct AdmmResult {
    pub status: AdmmStatus,
    pub best_feasible: Option<(BitVector, f64)>,
    /// Completed iterations (sampler calls).
    pub iterations: usize,
    pub history: Vec<IterationRecord>,
    pub timings: Timings,
}

/// QUBO of one x-minimization step.
///
/// `energy(result, x) = f(x) + sum_m lambda_m (G_m.x - D_m - z_m)
/// + (rho/2) sum_m (G_m.x - D_m - z_m)^2`. The per-violation gamma term of
/// the full augmented cost is constant in x and excluded. Equalities, when
/// present, are pre-folded as `(F_l.x - C_l)^2` at unit weight; callers
/// wanting a different equality weight fold it into the objective first via
/// [`ConstrainedProblem::penalized_qubo_equality`].
pub fn build_step_qubo(
    p: &ConstrainedProblem,
    z: &[f64],
    lambda: &[f64],
    rho: f64,
) -> Result<QuboMatrix, Error> {
    let m = p.inequalities().len();
    if z.len() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            got: z.len(),
        });
    }
    if lambda.len() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            got: lambda.len(),
        });
    }
    if !(rho.is_finite() && rho > 0.0) {
        return Err(Error::InvalidPenalty(rho));
    }
    let mut q = if p.equalities().is_empty() {
        p.objective().clone()
    } else {
        p.penalized_qubo_equality(1.0)?
    };
    for (cm, (&zm, &lm)) in p.inequalities().iter().zip(z.iter().zip(lambda)) {
        let coeffs: Vec<f64> = cm.coeffs().iter().map(|&g| g as f64).collect();
        let shift = -(cm.bound() as f64) - zm;
        if lm != 0.0 {
            q = q.add_scaled(&QuboMatrix::affine(&coeffs, shift), lm)?;
        }
        q = q.add_scaled(&QuboMatrix::square_of_affine(&coeffs, shift), rho / 2.0)?;
    }
    Ok(q)
}

/// Best sample of the step QUBO: minimum energy, ties to the
/// lexicographically smallest assignment.
pub fn select_x_cost(s: &SampleSet) -> Result<&BitVector, Error> {
    s.min_energy_record()
        .map(|r| &r.x)
        .ok_or(Error::EmptySampleSet)
}

/// Best feasible sample by original objective, if any; ties to the
/// lexicographically smallest assignment. Note the ranking ignores the
/// step-QUBO energy entirely.
pub fn select_x_feas<'a>(
    s: &'a SampleSet,
    p: &ConstrainedProblem,
) -> Result<Option<&'a BitVector>, Error> {
    let mut best: Option<(&'a BitVector, f64)> = None;
    for record in s.records() {
        if !p.is_feasible(&record.x)? {
            continue;
        }
        let value = p.objective().energy(&record.x)?;
        let better = match best {
            None => true,
            Some((bx, bv)) => value < bv || (value == bv && record.x < *bx),
        };
        if better {
            best = Some((&record.x, value));
        }
    }
    Ok(best.map(|(x, _)| x))
}

/// Closed-form z update: `z_m = min(0, G_m . x_cost - D_m)`.
pub fn update_z(x_cost: &BitVector, inequalities: &[LinearConstraint]) -> Vec<f64> {
    inequalities
        .iter()
        .map(|c| (c.residual(x_cost) as f64).min(0.0))
        .collect()
}

/// Dual ascent: `lambda_m + rho (G_m . x_cost - D_m - z_m)`.
///
/// With z from [`update_z`], the increment is exactly zero for every
/// constraint `x_cost` satisfies.
pub fn update_lambda(
    lambda: &[f64],
    rho: f64,
    x_cost: &BitVector,
    z: &[f64],
    inequalities: &[LinearConstraint],
) -> Vec<f64> {
    assert_eq!(lambda.len(), inequalities.len());
    assert_eq!(z.len(), inequalities.len());
    inequalities
        .iter()
        .zip(lambda.iter().zip(z))
        .map(|(c, (&lm, &zm))| lm + rho * (c.residual(x_cost) as f64 - zm))
        .collect()
}

/// Stop test, applied after an iteration's updates and t increment.
///
/// In order: iteration budget spent (`t > t_max`); incumbent unimproved for
/// `t_conv` iterations; incumbent residual norm below `epsilon`. The latter
/// two are skipped while no feasible incumbent exists.
pub fn check_convergence(
    state: &AdmmState,
    params: &AdmmParams,
    p: &ConstrainedProblem,
) -> Option<StopReason> {
    if state.t > params.t_max {
        return Some(StopReason::MaxIterations);
    }
    if let Some((x_feas, _)) = &state.best_feasible {
        if state.stall_counter >= params.t_conv {
            return Some(StopReason::Stalled);
        }
        if residual_norm(x_feas, &state.z, p.inequalities()) < params.epsilon {
            return Some(StopReason::ConvergedResidual);
        }
    }
    None
}

fn residual_norm(x: &BitVector, z: &[f64], inequalities: &[LinearConstraint]) -> f64 {
    inequalities
        .iter()
        .zip(z)
        .map(|(c, &zm)| {
            let d = c.residual(x) as f64 - zm;
            d * d
        })
        .sum::<f64>()
        .sqrt()
}

/// Runs the full loop against `sampler`.
///
/// Deterministic for fixed `(p, params, sampler)`: iteration t samples with
/// a child seed derived from `params.seed` and t. The incumbent is the best
/// feasible sample across all iterations, so its objective value is
/// non-increasing; `NoFeasibleFound` cannot occur if any iteration sampled
/// any feasible assignment.
pub fn solve(
    p: &ConstrainedProblem,
    params: &AdmmParams,
    sampler: &dyn Sampler,
) -> Result<AdmmResult, Error> {
    params.validate()?;
    if p.inequalities().is_empty() {
        return Err(Error::NoInequalities);
    }
    let gamma = params.gamma.unwrap_or_else(|| p.gamma());
    let m = p.inequalities().len();
    let solve_start = Instant::now();
    let mut state = AdmmState {
        t: 1,
        z: vec![0.0; m],
        lambda: vec![0.0; m],
        best_feasible: None,
        stall_counter: 0,
        history: Vec::new(),
        timings: Timings::default(),
    };

    let reason = loop {
        let tick = Instant::now();
        let q = build_step_qubo(p, &state.z, &state.lambda, params.rho)?;
        state.timings.bookkeeping += tick.elapsed();

        let tick = Instant::now();
        let seed = child_seed(params.seed, STREAM_ADMM_ITER, state.t as u64);
        let raw = sampler.sample(&q, seed).map_err(|e| Error::Sampler {
            iteration: state.t,
            source: Box::new(e),
        })?;
        state.timings.sampler += tick.elapsed();

        let tick = Instant::now();
        let samples = apply_postprocess(&q, raw, params).map_err(|e| Error::Sampler {
            iteration: state.t,
            source: Box::new(e),
        })?;
        state.timings.postprocess += tick.elapsed();

        let tick = Instant::now();
        let x_cost = select_x_cost(&samples)?.clone();
        let x_cost_energy = samples.min_energy_record().expect("nonempty set").energy;

        match select_x_feas(&samples, p)? {
            Some(x_feas) => {
                let value = p.objective().energy(x_feas)?;
                let improved = state
                    .best_feasible
                    .as_ref()
                    .is_none_or(|&(_, best)| value < best);
                if improved {
                    state.best_feasible = Some((x_feas.clone(), value));
                    state.stall_counter = 0;
                } else {
                    state.stall_counter += 1;
                }
            }
            None => {
                if state.best_feasible.is_some() {
                    state.stall_counter += 1;
                }
            }
        }

        state.z = update_z(&x_cost, p.inequalities());
        state.lambda = update_lambda(
            &state.lambda,
            params.rho,
            &x_cost,
            &state.z,
            p.inequalities(),
        );

        let (incumbent_e_ineq, res_norm) = match &state.best_feasible {
            Some((x, _)) => {
                let merit = p.objective().energy(x)? + gamma * p.count_violations(x)? as f64;
                (
                    Some(merit),
                    Some(residual_norm(x, &state.z, p.inequalities())),
                )
            }
            None => (None, None),
        };
        state.history.push(IterationRecord {
            t: state.t,
            x_cost_energy,
            incumbent_e_ineq,
            residual_norm: res_norm,
        });

        state.t += 1;
        let decision = check_convergence(&state, params, p);
        state.timings.bookkeeping += tick.elapsed();
        if let Some(reason) = decision {
            break reason;
        }
    };

    state.timings.total = solve_start.elapsed();
    let status = match (&state.best_feasible, reason) {
        (None, _) => AdmmStatus::NoFeasibleFound,
        (Some(_), StopReason::MaxIterations) => AdmmStatus::MaxIterations,
        (Some(_), StopReason::Stalled) => AdmmStatus::Stalled,
        (Some(_), StopReason::ConvergedResidual) => AdmmStatus::ConvergedResidual,
    };
    Ok(AdmmResult {
        status,
        best_feasible: state.best_feasible,
        iterations: state.t - 1,
        history: state.history,
        timings: state.timings,
    })
}

fn apply_postprocess(
    q: &QuboMatrix,
    raw: SampleSet,
    params: &AdmmParams,
) -> Result<SampleSet, Error> {
    match params.postprocess {
        PostprocessMode::None => Ok(raw),
        PostprocessMode::Greedy => greedy_descent_postprocess(q, &raw),
        PostprocessMode::Boltzmann { beta } => {
            boltzmann_postprocess(q, &raw, beta, params.gibbs_sweeps)
        }
    }
}
