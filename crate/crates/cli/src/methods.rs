//! Solver method dispatch shared by `solve` and `benchmark`.

use std::time::{Duration, Instant};

use clap::ValueEnum;

use qubo_admm::admm::{solve, AdmmParams, PostprocessMode};
use qubo_admm::qkp::{self, QkpInstance, MAX_ORACLE_VARS};
use qubo_admm::samplers::{
    boltzmann_postprocess, greedy_descent_postprocess, simulated_annealing_sample,
    BruteForceSampler, SaParams, SaSampler, SampleSet,
};
use qubo_admm::BitVector;

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Method {
    /// Dual-decomposition loop driven by simulated annealing
    AdmmSa,
    /// Dual-decomposition loop driven by exhaustive enumeration (n <= 24)
    AdmmExact,
    /// Slack-bit penalty reformulation solved by simulated annealing
    SlackSa,
    /// Exhaustive constrained optimum (n <= 24)
    Oracle,
}

impl Method {
    pub fn tag(self) -> &'static str {
        match self {
            Method::AdmmSa => "admm-sa",
            Method::AdmmExact => "admm-exact",
            Method::SlackSa => "slack-sa",
            Method::Oracle => "oracle",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, ValueEnum)]
pub enum Postprocess {
    None,
    Greedy,
    Boltzmann,
}

/// Everything a method run needs besides the instance. One value serves a
/// whole benchmark; `seed` is overridden per repeat.
#[derive(Clone, Debug)]
pub struct SolverSpec {
    pub method: Method,
    pub postprocess: Postprocess,
    pub beta: f64,
    pub gibbs_sweeps: usize,
    pub reads: usize,
    pub sweeps: usize,
    pub rho: f64,
    pub t_max: usize,
    pub t_conv: usize,
    pub epsilon: f64,
    pub gamma: Option<f64>,
    pub mu: Option<f64>,
    pub seed: u64,
}

impl SolverSpec {
    pub fn postprocess_tag(&self) -> String {
        if self.method == Method::Oracle {
            return "none".to_string();
        }
        match self.postprocess {
            Postprocess::None => "none".to_string(),
            Postprocess::Greedy => "greedy".to_string(),
            Postprocess::Boltzmann => format!("boltzmann-{}", self.beta),
        }
    }

    /// Default slack penalty weight: one above the objective range, so no
    /// constraint violation can ever pay for itself.
    pub fn slack_mu(&self, inst: &QkpInstance) -> f64 {
        self.mu
            .unwrap_or_else(|| 1.0 + inst.profits.iter().map(|&(_, _, v)| v as f64).sum::<f64>())
    }

    fn admm_params(&self) -> AdmmParams {
        let postprocess = match self.postprocess {
            Postprocess::None => PostprocessMode::None,
            Postprocess::Greedy => PostprocessMode::Greedy,
            Postprocess::Boltzmann => PostprocessMode::Boltzmann { beta: self.beta },
        };
        AdmmParams {
            rho: self.rho,
            gamma: self.gamma,
            t_max: self.t_max,
            t_conv: self.t_conv,
            epsilon: self.epsilon,
            postprocess,
            gibbs_sweeps: self.gibbs_sweeps,
            seed: self.seed,
        }
    }

    fn sa_params(&self) -> SaParams {
        SaParams {
            num_reads: self.reads,
            sweeps: self.sweeps,
            seed: self.seed,
            ..Default::default()
        }
    }
}

/// Result of one method run; `found`/`x` are present only when a feasible
/// assignment was produced.
pub struct Outcome {
    pub found: Option<i64>,
    pub x: Option<BitVector>,
    pub feasible: bool,
    pub iterations: usize,
    pub total: Duration,
    pub sampler: Duration,
    pub postprocess: Duration,
    pub slack_bits: Option<usize>,
    pub total_vars: Option<usize>,
    pub mu: Option<f64>,
}

pub fn run(inst: &QkpInstance, spec: &SolverSpec) -> Result<Outcome, CliError> {
    let outcome = match spec.method {
        Method::Oracle => run_oracle(inst),
        Method::AdmmSa | Method::AdmmExact => run_admm(inst, spec),
        Method::SlackSa => run_slack(inst, spec),
    }?;
    if let (Some(found), Some(x)) = (outcome.found, &outcome.x) {
        assert!(
            inst.load(x) <= inst.capacity && inst.profit(x) == found,
            "method reported an assignment that fails its own instance recheck"
        );
    }
    Ok(outcome)
}

fn empty_outcome(total: Duration) -> Outcome {
    Outcome {
        found: None,
        x: None,
        feasible: false,
        iterations: 0,
        total,
        sampler: Duration::ZERO,
        postprocess: Duration::ZERO,
        slack_bits: None,
        total_vars: None,
        mu: None,
    }
}

fn run_oracle(inst: &QkpInstance) -> Result<Outcome, CliError> {
    let started = Instant::now();
    if inst.n > MAX_ORACLE_VARS {
        return Err(CliError::Parameter(format!(
            "oracle supports at most {MAX_ORACLE_VARS} variables, instance has {}",
            inst.n
        )));
    }
    // Weights are positive, so a feasible assignment exists iff the empty
    // knapsack fits.
    if inst.capacity < 0 {
        return Ok(empty_outcome(started.elapsed()));
    }
    let (x, opt) = qkp::brute_force_opt(inst).map_err(CliError::param)?;
    Ok(Outcome {
        found: Some(opt),
        x: Some(x),
        feasible: true,
        iterations: 0,
        total: started.elapsed(),
        sampler: Duration::ZERO,
        postprocess: Duration::ZERO,
        slack_bits: None,
        total_vars: None,
        mu: None,
    })
}

fn run_admm(inst: &QkpInstance, spec: &SolverSpec) -> Result<Outcome, CliError> {
    let p = qkp::to_problem(inst);
    let params = spec.admm_params();
    let result = match spec.method {
        Method::AdmmExact => solve(&p, &params, &BruteForceSampler),
        _ => solve(&p, &params, &SaSampler::new(spec.sa_params())),
    }
    .map_err(CliError::param)?;
    let (found, x, feasible) = match result.best_feasible {
        Some((x, _value)) => (Some(inst.profit(&x)), Some(x), true),
        None => (None, None, false),
    };
    Ok(Outcome {
        found,
        x,
        feasible,
        iterations: result.iterations,
        total: result.timings.total,
        sampler: result.timings.sampler,
        postprocess: result.timings.postprocess,
        slack_bits: None,
        total_vars: None,
        mu: None,
    })
}

fn run_slack(inst: &QkpInstance, spec: &SolverSpec) -> Result<Outcome, CliError> {
    let started = Instant::now();
    let p = qkp::to_problem(inst);
    let mu = spec.slack_mu(inst);
    let enc = p.slack_encode(mu).map_err(CliError::param)?;
    let q = enc.problem.objective();

    let sampler_started = Instant::now();
    let raw = simulated_annealing_sample(q, &spec.sa_params()).map_err(CliError::param)?;
    let sampler_time = sampler_started.elapsed();

    let post_started = Instant::now();
    let samples: SampleSet = match spec.postprocess {
        Postprocess::None => raw,
        Postprocess::Greedy => greedy_descent_postprocess(q, &raw).map_err(CliError::param)?,
        Postprocess::Boltzmann => {
            boltzmann_postprocess(q, &raw, spec.beta, spec.gibbs_sweeps).map_err(CliError::param)?
        }
    };
    let post_time = post_started.elapsed();

    // Project each sample back to the original variables and keep the best
    // feasible one; ties go to the lexicographically smallest assignment.
    let mut best: Option<(i64, BitVector)> = None;
    for record in samples.records() {
        let x = BitVector::from_bits(record.x.bits()[..inst.n].to_vec())
            .expect("bits of a sample are valid");
        if inst.load(&x) > inst.capacity {
            continue;
        }
        let profit = inst.profit(&x);
        let better = match &best {
            None => true,
            Some((bp, bx)) => profit > *bp || (profit == *bp && x < *bx),
        };
        if better {
            best = Some((profit, x));
        }
    }
    let (found, x, feasible) = match best {
        Some((profit, x)) => (Some(profit), Some(x), true),
        None => (None, None, false),
    };
    Ok(Outcome {
        found,
        x,
        feasible,
        iterations: 0,
        total: started.elapsed(),
        sampler: sampler_time,
        postprocess: post_time,
        slack_bits: Some(enc.slack_bits.iter().sum()),
        total_vars: Some(enc.total_vars()),
        mu: Some(mu),
    })
}
