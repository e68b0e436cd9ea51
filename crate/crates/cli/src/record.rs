//! The run record emitted by `train`, and the trial runner shared with `sweep`.

use std::time::Instant;

use marginrcn::dimreduce::{default_beta, derive_reduced_params, reduced_train, with_reduced_iterations, JlConfig, JlRoute};
use marginrcn::learner::{derive_params_in, disagreement_rate, evaluate_error, train_and_select, PsgdOptions};
use marginrcn::model::norm;
use marginrcn::{Dataset, Execution, UnitVector};
use serde::Serialize;

use crate::error::CliResult;
use crate::RUN_SCHEMA;

#[derive(Debug, Clone, PartialEq)]
pub enum JlSpec {
    /// Derived `m` from `γ` and `β = εδ/(20N)`.
    Derived { seed: u64, route: Option<JlRoute> },
    Fixed { m: usize, seed: u64, route: Option<JlRoute> },
}

/// Everything one learner run consumes.
#[derive(Debug, Clone)]
pub struct TrialInputs<'a> {
    pub train: &'a Dataset,
    pub holdout: &'a Dataset,
    pub test: Option<&'a Dataset>,
    pub eps: f64,
    pub delta: f64,
    pub eta: f64,
    pub gamma: f64,
    pub t_override: Option<usize>,
    pub jl: Option<JlSpec>,
    pub w_star: Option<&'a UnitVector>,
    pub exec: Execution,
    pub timing: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub d: usize,
    pub eps: f64,
    pub delta: f64,
    pub eta: f64,
    pub gamma: f64,
    #[serde(rename = "T")]
    pub t: usize,
    pub mu: f64,
    pub jl: bool,
    pub n_train: usize,
    pub n_holdout: usize,
    pub n_test: Option<usize>,
    /// Input paths and seed, when the run came from files.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub data: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub holdout: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub test: Option<String>,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SelectedSummary {
    pub index: usize,
    pub norm: f64,
    pub w: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunRecord {
    pub schema: &'static str,
    pub config: RunConfig,
    pub m: Option<usize>,
    pub beta: Option<f64>,
    pub jl_seed: Option<u64>,
    pub route: Option<JlRoute>,
    pub selected: SelectedSummary,
    pub train_error: f64,
    pub holdout_error: f64,
    pub test_error: Option<f64>,
    /// Disagreement of the selected hypothesis with `w*`, on the test set when
    /// present and on the training set otherwise.
    pub disagreement: Option<f64>,
    /// Smallest training disagreement with `w*` along the run.
    pub min_train_disagreement: Option<f64>,
    pub average_gap: Option<f64>,
    pub regret_bound: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wallclock_ms: Option<f64>,
}

pub fn run_trial(inp: &TrialInputs) -> CliResult<RunRecord> {
    let start = Instant::now();
    let d = inp.train.dim();
    let reduced = inp.jl.is_some();
    let mut params = if reduced {
        derive_reduced_params(inp.eps, inp.delta, inp.eta, inp.gamma)?
    } else {
        derive_params_in(inp.eps, inp.delta, inp.eta, inp.gamma, d)?
    };
    if let Some(t) = inp.t_override {
        params = if reduced { with_reduced_iterations(params, t) } else { params.with_iterations(t) };
    }

    let (selected, m, beta, jl_seed, route, min_dis, gap) = match &inp.jl {
        None => {
            let opts = PsgdOptions {
                exec: inp.exec,
                w_star: inp.w_star,
            };
            let run = train_and_select(inp.train, inp.holdout, &params, opts)?;
            let (min_dis, gap) = (run.trace.min_train_disagreement(), run.trace.average_gap());
            (run.selected, None, None, None, None, min_dis, gap)
        }
        Some(spec) => {
            let beta = default_beta(inp.eps, inp.delta, inp.train.len());
            let (cfg, route) = match *spec {
                JlSpec::Derived { seed, route } => (JlConfig::derive(inp.gamma, beta, seed)?, route),
                JlSpec::Fixed { m, seed, route } => (JlConfig::with_dimension(m, seed, beta, inp.gamma), route),
            };
            let out = reduced_train(inp.train, inp.holdout, &params, &cfg, route, inp.exec)?;
            (out.selected, Some(out.m), Some(out.beta), Some(out.jl_seed), Some(out.route), None, None)
        }
    };

    let w = selected.w.as_slice();
    let test_error = inp.test.map(|t| evaluate_error(w, t)).transpose()?;
    let disagreement = match inp.w_star {
        Some(ws) => Some(disagreement_rate(w, ws.as_slice(), inp.test.unwrap_or(inp.train))?),
        None => None,
    };
    Ok(RunRecord {
        schema: RUN_SCHEMA,
        config: RunConfig {
            d,
            eps: inp.eps,
            delta: inp.delta,
            eta: inp.eta,
            gamma: inp.gamma,
            t: params.t,
            mu: params.mu,
            jl: reduced,
            n_train: inp.train.len(),
            n_holdout: inp.holdout.len(),
            n_test: inp.test.map(Dataset::len),
            data: None,
            holdout: None,
            test: None,
            seed: None,
        },
        m,
        beta,
        jl_seed,
        route,
        selected: SelectedSummary {
            index: selected.index,
            norm: norm(w),
            w: w.to_vec(),
        },
        train_error: evaluate_error(w, inp.train)?,
        holdout_error: selected.holdout_error,
        test_error,
        disagreement,
        min_train_disagreement: min_dis,
        average_gap: gap,
        regret_bound: params.regret_bound(),
        wallclock_ms: inp.timing.then(|| start.elapsed().as_secs_f64() * 1e3),
    })
}
