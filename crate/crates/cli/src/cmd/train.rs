use std::io::Write;
use std::path::Path;

use marginrcn::dimreduce::JlRoute;
use marginrcn::learner::holdout_size;
use marginrcn::{read_dataset, Dataset, DatasetFile, Execution, UnitVector};

use crate::args::{RouteArg, TrainArgs};
use crate::error::{CliError, CliResult};
use crate::output::{emit, to_json, DatasetMeta};
use crate::record::{run_trial, JlSpec, TrialInputs};

fn read_sphere(path: &Path) -> CliResult<Dataset> {
    match read_dataset(path)? {
        DatasetFile::Sphere(ds) => Ok(ds),
        other => Err(CliError::format(format!(
            "{}: expected a sphere dataset, found format={}",
            path.display(),
            other.format_name()
        ))),
    }
}

pub fn run(a: &TrainArgs, out: &mut dyn Write) -> CliResult<()> {
    let data = read_sphere(&a.data)?;
    let meta = DatasetMeta::read_for(&a.data)?;
    let from_meta = |flag: &str, v: Option<f64>, m: Option<f64>| {
        v.or(m)
            .ok_or_else(|| CliError::usage(format!("--{flag} is required when {} has no metadata sidecar", a.data.display())))
    };
    let eta = from_meta("eta", a.eta, meta.as_ref().map(|m| m.config.eta))?;
    let gamma = from_meta("gamma", a.gamma, meta.as_ref().map(|m| m.config.gamma))?;
    let w_star = match &meta {
        Some(m) => Some(UnitVector::new(m.w_star.clone())?),
        None => None,
    };

    let route = a.route.map(|r| match r {
        RouteArg::Direct => JlRoute::Direct,
        RouteArg::Gram => JlRoute::Gram,
    });
    let jl = a.jl.then_some(match a.m {
        Some(m) => JlSpec::Fixed { m, seed: a.jl_seed, route },
        None => JlSpec::Derived { seed: a.jl_seed, route },
    });

    let (train, holdout) = match &a.holdout {
        Some(p) => (data, read_sphere(p)?),
        None => {
            // N′ depends on T, which the trial derives; derive it the same way here.
            let t = match a.t {
                Some(t) => t,
                None if a.jl => marginrcn::dimreduce::derive_reduced_params(a.eps, a.delta, eta, gamma)?.t,
                None => marginrcn::learner::derive_params(a.eps, a.delta, eta, gamma)?.t,
            };
            let nh = holdout_size(a.eps, a.delta, t);
            if nh >= data.len() {
                return Err(CliError::failure(format!(
                    "{} has {} rows but the holdout alone needs N' = {nh}; pass --holdout",
                    a.data.display(),
                    data.len()
                )));
            }
            data.split_at(data.len() - nh)
        }
    };
    let test = a.test.as_deref().map(read_sphere).transpose()?;
    if let Some(t) = &test {
        if t.dim() != train.dim() {
            return Err(CliError::format(format!("test set has d={}, training set d={}", t.dim(), train.dim())));
        }
    }

    let mut record = run_trial(&TrialInputs {
        train: &train,
        holdout: &holdout,
        test: test.as_ref(),
        eps: a.eps,
        delta: a.delta,
        eta,
        gamma,
        t_override: a.t,
        jl,
        w_star: w_star.as_ref(),
        exec: Execution::Parallel,
        timing: a.timing,
    })?;
    record.config.data = Some(a.data.display().to_string());
    record.config.holdout = a.holdout.as_ref().map(|p| p.display().to_string());
    record.config.test = a.test.as_ref().map(|p| p.display().to_string());
    record.config.seed = meta.map(|m| m.config.seed);
    emit(a.out.as_deref(), &to_json(&record)?, out)
}
