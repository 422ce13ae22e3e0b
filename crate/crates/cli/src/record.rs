//! Per-run result records, one JSON object per line on standard output.

use serde::Serialize;

use crate::methods::{Method, Outcome, Postprocess, SolverSpec};

#[derive(Debug, Serialize)]
pub struct RunRecord {
    pub instance: String,
    pub method: &'static str,
    pub postprocess: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub found_value: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub optimal_value: Option<i64>,
    pub feasible: bool,
    pub iterations: usize,
    pub timing_total_s: f64,
    pub timing_sampler_s: f64,
    pub timing_postprocess_s: f64,
    pub seed: u64,
    pub params: ParamsEcho,
}

/// Echo of the knobs that shaped a run; fields irrelevant to the method are
/// omitted from the line.
#[derive(Debug, Default, Serialize)]
pub struct ParamsEcho {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rho: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_max: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_conv: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reads: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweeps: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gibbs_sweeps: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mu: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub slack_bits: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub total_vars: Option<usize>,
}

impl RunRecord {
    pub fn new(
        instance_id: String,
        spec: &SolverSpec,
        outcome: &Outcome,
        optimal: Option<i64>,
    ) -> Self {
        RunRecord {
            instance: instance_id,
            method: spec.method.tag(),
            postprocess: spec.postprocess_tag(),
            found_value: outcome.found,
            optimal_value: optimal,
            feasible: outcome.feasible,
            iterations: outcome.iterations,
            timing_total_s: outcome.total.as_secs_f64(),
            timing_sampler_s: outcome.sampler.as_secs_f64(),
            timing_postprocess_s: outcome.postprocess.as_secs_f64(),
            seed: spec.seed,
            params: ParamsEcho::new(spec, outcome),
        }
    }

    pub fn to_line(&self) -> String {
        serde_json::to_string(self).expect("record serialization")
    }
}

impl ParamsEcho {
    fn new(spec: &SolverSpec, outcome: &Outcome) -> Self {
        let mut echo = ParamsEcho::default();
        let sa = matches!(spec.method, Method::AdmmSa | Method::SlackSa);
        if sa {
            echo.reads = Some(spec.reads);
            echo.sweeps = Some(spec.sweeps);
        }
        if matches!(spec.method, Method::AdmmSa | Method::AdmmExact) {
            echo.rho = Some(spec.rho);
            echo.t_max = Some(spec.t_max);
            echo.t_conv = Some(spec.t_conv);
            echo.epsilon = Some(spec.epsilon);
            echo.gamma = spec.gamma;
        }
        if spec.method != Method::Oracle {
            match spec.postprocess {
                Postprocess::None => {}
                Postprocess::Greedy => {}
                Postprocess::Boltzmann => {
                    echo.beta = Some(spec.beta);
                    echo.gibbs_sweeps = Some(spec.gibbs_sweeps);
                }
            }
        }
        echo.slack_bits = outcome.slack_bits;
        echo.total_vars = outcome.total_vars;
        echo.mu = outcome.mu;
        echo
    }
}
