//! Grid sweeps: one simulate+train trial per `(cell, seed)`, emitted as CSV.
//!
//! Trial `(c, s)` uses simulator seed `seed + s`, draws `N + N′` training rows
//! from stream `trial_stream(c, s, Train)` and `test_n` test rows from stream
//! `trial_stream(c, s, Test)`. For cell 0 and seed index 0 those are streams 0
//! and 2, so the trial equals `simulate --stream 0` / `--stream 2` followed by
//! `train`.

use std::io::Write;
use std::path::{Path, PathBuf};

use marginrcn::learner::holdout_size;
use marginrcn::rng::{trial_stream, Purpose};
use marginrcn::{generate_dataset, Execution, SimulatorConfig, WStarMode};
use serde::Deserialize;

use crate::args::SweepArgs;
use crate::error::{CliError, CliResult};
use crate::output::emit;
use crate::record::{run_trial, JlSpec, RunRecord, TrialInputs};
use crate::SWEEP_SCHEMA;

pub const MAX_CELLS: usize = 10_000;
pub const MAX_TRIALS: usize = 100_000;

pub const COLUMNS: [&str; 13] = [
    "seed",
    "d",
    "gamma",
    "eta",
    "eps",
    "N",
    "T",
    "m",
    "err_holdout",
    "err_test",
    "min_disagreement",
    "wallclock_ms",
    "error",
];

fn default_delta() -> f64 {
    0.1
}

fn default_test_n() -> usize {
    10_000
}

fn default_parallel() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub d: Vec<usize>,
    pub gamma: Vec<f64>,
    pub eta: Vec<f64>,
    pub eps: Vec<f64>,
    #[serde(rename = "N")]
    pub n: Vec<usize>,
    pub seeds_per_cell: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_delta")]
    pub delta: f64,
    #[serde(default = "default_test_n")]
    pub test_n: usize,
    /// Iteration override applied to every cell.
    #[serde(default, rename = "T")]
    pub t: Option<usize>,
    #[serde(default)]
    pub jl: bool,
    #[serde(default)]
    pub m: Option<usize>,
    #[serde(default)]
    pub w_star_mode: WStarMode,
    #[serde(default)]
    pub out: Option<PathBuf>,
    #[serde(default = "default_parallel")]
    pub parallel: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cell {
    pub d: usize,
    pub gamma: f64,
    pub eta: f64,
    pub eps: f64,
    pub n: usize,
}

impl SweepConfig {
    pub fn from_path(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?;
        let cfg: SweepConfig =
            serde_json::from_str(&text).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> CliResult<()> {
        let grids = [
            ("d", self.d.len()),
            ("gamma", self.gamma.len()),
            ("eta", self.eta.len()),
            ("eps", self.eps.len()),
            ("N", self.n.len()),
        ];
        if let Some((name, _)) = grids.iter().find(|(_, l)| *l == 0) {
            return Err(CliError::usage(format!("sweep grid `{name}` is empty")));
        }
        if self.seeds_per_cell == 0 {
            return Err(CliError::usage("seeds_per_cell must be positive"));
        }
        let cells = grids.iter().try_fold(1usize, |a, (_, l)| a.checked_mul(*l));
        match cells {
            Some(c) if c <= MAX_CELLS => {}
            _ => return Err(CliError::usage(format!("sweep has more than {MAX_CELLS} cells"))),
        }
        if cells.unwrap().saturating_mul(self.seeds_per_cell) > MAX_TRIALS {
            return Err(CliError::usage(format!("sweep has more than {MAX_TRIALS} trials")));
        }
        if self.parallel == 0 {
            return Err(CliError::usage("parallel must be positive"));
        }
        if self.test_n == 0 {
            return Err(CliError::usage("test_n must be positive"));
        }
        Ok(())
    }

    /// Cells in row-major order over `(d, gamma, eta, eps, N)`.
    pub fn cells(&self) -> Vec<Cell> {
        let mut out = Vec::new();
        for &d in &self.d {
            for &gamma in &self.gamma {
                for &eta in &self.eta {
                    for &eps in &self.eps {
                        for &n in &self.n {
                            out.push(Cell { d, gamma, eta, eps, n });
                        }
                    }
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub seed: u64,
    pub cell: Cell,
    pub record: Result<RunRecord, String>,
}

fn trial(cfg: &SweepConfig, index: usize, cell: Cell, s: usize, timing: bool) -> SweepRow {
    let seed = cfg.seed.wrapping_add(s as u64);
    let record = run_cell_trial(cfg, index, cell, s, seed, timing).map_err(|e| e.message);
    SweepRow { seed, cell, record }
}

fn run_cell_trial(cfg: &SweepConfig, index: usize, cell: Cell, s: usize, seed: u64, timing: bool) -> CliResult<RunRecord> {
    let t = match cfg.t {
        Some(t) => t,
        None if cfg.jl => marginrcn::dimreduce::derive_reduced_params(cell.eps, cfg.delta, cell.eta, cell.gamma)?.t,
        None => marginrcn::learner::derive_params(cell.eps, cfg.delta, cell.eta, cell.gamma)?.t,
    };
    let nh = holdout_size(cell.eps, cfg.delta, t);
    let sim = |n, purpose| SimulatorConfig {
        w_star_mode: cfg.w_star_mode,
        stream: trial_stream(index as u64, s as u64, purpose),
        ..SimulatorConfig::new(cell.d, cell.gamma, cell.eta, n, seed)
    };
    let (data, instance) = generate_dataset(&sim(cell.n + nh, Purpose::Train))?;
    let (test, _) = generate_dataset(&sim(cfg.test_n, Purpose::Test))?;
    let (train, holdout) = data.split_at(cell.n);
    let jl = cfg.jl.then_some(match cfg.m {
        Some(m) => JlSpec::Fixed { m, seed, route: None },
        None => JlSpec::Derived { seed, route: None },
    });
    let mut record = run_trial(&TrialInputs {
        train: &train,
        holdout: &holdout,
        test: Some(&test),
        eps: cell.eps,
        delta: cfg.delta,
        eta: cell.eta,
        gamma: cell.gamma,
        t_override: cfg.t,
        jl,
        w_star: Some(&instance.w_star),
        exec: Execution::Sequential,
        timing,
    })?;
    record.config.seed = Some(seed);
    Ok(record)
}

/// Every trial, in `(cell, seed)` order, on a pool of `threads` workers.
pub fn run_sweep(cfg: &SweepConfig, threads: usize, timing: bool) -> CliResult<Vec<SweepRow>> {
    let jobs: Vec<(usize, Cell, usize)> = cfg
        .cells()
        .into_iter()
        .enumerate()
        .flat_map(|(i, c)| (0..cfg.seeds_per_cell).map(move |s| (i, c, s)))
        .collect();
    #[cfg(feature = "parallel")]
    if threads > 1 {
        use rayon::prelude::*;
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| CliError::failure(e.to_string()))?;
        return Ok(pool.install(|| jobs.par_iter().map(|&(i, c, s)| trial(cfg, i, c, s, timing)).collect()));
    }
    let _ = threads;
    Ok(jobs.iter().map(|&(i, c, s)| trial(cfg, i, c, s, timing)).collect())
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// The CSV fields of a row, in [`COLUMNS`] order.
pub fn row_fields(row: &SweepRow) -> Vec<String> {
    let c = &row.cell;
    let mut f = vec![
        row.seed.to_string(),
        c.d.to_string(),
        c.gamma.to_string(),
        c.eta.to_string(),
        c.eps.to_string(),
        c.n.to_string(),
    ];
    match &row.record {
        Ok(r) => f.extend([
            r.config.t.to_string(),
            opt(r.m),
            r.holdout_error.to_string(),
            opt(r.test_error),
            opt(r.min_train_disagreement),
            opt(r.wallclock_ms),
            String::new(),
        ]),
        Err(e) => {
            f.extend(std::iter::repeat_n(String::new(), 6));
            f.push(e.clone());
        }
    }
    f
}

pub fn to_csv(rows: &[SweepRow]) -> CliResult<String> {
    let mut buf = format!("# {SWEEP_SCHEMA}\n").into_bytes();
    {
        let mut w = csv::Writer::from_writer(&mut buf);
        let fail = |e: csv::Error| CliError::failure(e.to_string());
        w.write_record(COLUMNS).map_err(fail)?;
        for r in rows {
            w.write_record(row_fields(r)).map_err(fail)?;
        }
        w.flush()?;
    }
    Ok(String::from_utf8(buf).expect("csv output is UTF-8"))
}

pub fn run(a: &SweepArgs, out: &mut dyn Write) -> CliResult<()> {
    let cfg = SweepConfig::from_path(&a.config)?;
    let threads = a.parallel.unwrap_or(cfg.parallel);
    if threads == 0 {
        return Err(CliError::usage("invalid value for --parallel: must be positive"));
    }
    let rows = run_sweep(&cfg, threads, a.timing)?;
    let path = a.out.clone().or_else(|| cfg.out.clone());
    emit(path.as_deref(), &to_csv(&rows)?, out)
}
