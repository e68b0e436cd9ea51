//! The `verify` command: invariant suites over every module, plus a rerun-and-hash
//! reproducibility suite over the commands themselves.

use std::io::Write;
use std::path::Path;
use std::time::Instant;

use marginrcn::dimreduce::{margin_preservation_fraction, reduced_train, sample_jl_matrix, JlConfig, JlRoute};
use marginrcn::hardness::binomial::rational_string;
use marginrcn::hardness::correlation::{
    correlation_pair_formula, correlation_pair_with, rk_edge_bound, search_decay_constant, small_degree_check, LevelSpectrum,
    DEFAULT_FAMILY_C,
};
use marginrcn::hardness::fourier::{fourier_coefficient_enumerated, level_coefficients, walsh_spectrum};
use marginrcn::hardness::kravchuk::{kravchuk_by_subsets, kravchuk_sign_fault};
use marginrcn::hardness::distribution::pmf_conditional_enumerated;
use marginrcn::hardness::fourier::{fourier_coefficient_mask, parseval_sum};
use marginrcn::hardness::{
    distribution::pmf_conditional, kravchuk, kravchuk_bound_check, near_orthogonal_set, threshold_for_mass,
    HardDistribution, HypercubePoint, KravchukTable, ThresholdLtf,
};
use marginrcn::learner::{derive_params_in, evaluate_error, run_psgd_with, select_hypothesis, PsgdOptions};
use marginrcn::model::{dot, norm};
use marginrcn::rng::{stream_rng, StreamRng};
use marginrcn::simulate::{random_unit, ExampleStream};
use marginrcn::{
    disagreement_indicator, empirical_subgradient, generate_dataset, leaky_relu_subgradient, Dataset, Execution,
    LabeledExample, SignLabel, SimulatorConfig,
};
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;
use sha2::{Digest, Sha256};

use crate::args::{Fault, VerifyArgs};
use crate::error::{CliError, CliResult, EXIT_VERIFY_FAILED};

#[derive(Debug, Clone, Copy, Default)]
pub struct Ctx {
    pub quick: bool,
    pub fault: Option<Fault>,
}

impl Ctx {
    fn pick<T>(&self, quick: T, full: T) -> T {
        if self.quick {
            quick
        } else {
            full
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteResult {
    pub name: &'static str,
    pub passed: bool,
    /// One line per check; failures carry the counterexample.
    pub lines: Vec<String>,
}

struct Suite {
    name: &'static str,
    lines: Vec<String>,
    passed: bool,
}

impl Suite {
    fn new(name: &'static str) -> Self {
        Suite {
            name,
            lines: Vec::new(),
            passed: true,
        }
    }

    fn check(&mut self, ok: bool, what: impl Into<String>) {
        let what = what.into();
        self.lines.push(format!("{} {what}", if ok { "ok  " } else { "FAIL" }));
        self.passed &= ok;
    }

    fn info(&mut self, what: impl Into<String>) {
        self.lines.push(format!("info {}", what.into()));
    }

    fn finish(self) -> SuiteResult {
        SuiteResult {
            name: self.name,
            passed: self.passed,
            lines: self.lines,
        }
    }
}

pub type SuiteFn = fn(&Ctx) -> SuiteResult;

pub const SUITES: &[(&str, SuiteFn)] = &[
    ("kravchuk", kravchuk_suite),
    ("fourier", fourier_suite),
    ("pmf", pmf_suite),
    ("correlation", correlation_suite),
    ("levels", levels_suite),
    ("decay", decay_suite),
    ("family", family_suite),
    ("model", model_suite),
    ("learner", learner_suite),
    ("jl", jl_suite),
    ("repro", repro_suite),
];

pub fn run(a: &VerifyArgs, out: &mut dyn Write) -> CliResult<()> {
    let ctx = Ctx {
        quick: a.quick,
        fault: a.inject_fault,
    };
    for s in &a.suites {
        if !SUITES.iter().any(|(n, _)| n == s) {
            let names: Vec<&str> = SUITES.iter().map(|(n, _)| *n).collect();
            return Err(CliError::usage(format!("unknown suite `{s}`; available: {}", names.join(", "))));
        }
    }
    let selected: Vec<&(&str, SuiteFn)> = SUITES
        .iter()
        .filter(|(n, _)| a.suites.is_empty() || a.suites.iter().any(|s| s == n))
        .collect();
    let mut failed = Vec::new();
    for (name, f) in &selected {
        let start = Instant::now();
        let r = f(&ctx);
        eprintln!("{name}: {:.2} s", start.elapsed().as_secs_f64());
        writeln!(out, "{} {name}", if r.passed { "PASS" } else { "FAIL" })?;
        for l in &r.lines {
            writeln!(out, "    {l}")?;
        }
        if !r.passed {
            failed.push(*name);
        }
    }
    writeln!(out, "verify: {}/{} suites passed", selected.len() - failed.len(), selected.len())?;
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::new(EXIT_VERIFY_FAILED, format!("failed suites: {}", failed.join(", "))))
    }
}

fn rng(stream: u64) -> StreamRng {
    stream_rng(0x7665_7269_6679, stream)
}

fn random_point(d: usize, r: &mut StreamRng) -> HypercubePoint {
    HypercubePoint::new((0..d).map(|_| if r.random::<bool>() { 1 } else { -1 }).collect()).expect("d ≥ 1")
}

fn dist(v: HypercubePoint, s: usize, eta: &BigRational) -> HardDistribution {
    HardDistribution::new(ThresholdLtf::new(v, s).expect("s ≤ d+1"), eta.clone()).expect("η ∈ [0, 1/2)")
}

fn third() -> BigRational {
    marginrcn::hardness::default_eta()
}

pub fn kravchuk_suite(ctx: &Ctx) -> SuiteResult {
    let mut s = Suite::new("kravchuk");
    let closed = |n, a, b| match ctx.fault {
        Some(Fault::KravchukSign) => kravchuk_sign_fault(n, a, b),
        None => kravchuk(n, a, b),
    };
    let max_n = ctx.pick(10, 12);
    let mut mismatch = None;
    'outer: for n in 0..=max_n {
        for a in 0..=n {
            for b in 0..=n {
                let (c, o) = (closed(n, a, b).expect("in range"), kravchuk_by_subsets(n, a, b).expect("n ≤ 16"));
                if c != o {
                    mismatch = Some(format!(
                        "counterexample (n, a, b) = ({n}, {a}, {b}): closed form {} != subset average {}",
                        rational_string(&c),
                        rational_string(&o)
                    ));
                    break 'outer;
                }
            }
        }
    }
    match mismatch {
        None => s.check(true, format!("closed form equals the subset-pair average for all n <= {max_n}")),
        Some(m) => s.check(false, m),
    }

    let ns: Vec<usize> = if ctx.quick { (0..=20).chain([32, 64]).collect() } else { (0..=64).collect() };
    let bad = ns.iter().find_map(|&n| KravchukTable::new(n).invariant_violation().map(|v| (n, v)));
    match bad {
        None => s.check(true, format!("symmetry, reflection and |K| <= 1 on {} tables up to n = 64", ns.len())),
        Some((n, (a, b, what))) => s.check(false, format!("{what} fails at (n, a, b) = ({n}, {a}, {b})")),
    }

    let mut count = 0;
    let mut fail = None;
    for &d in ctx.pick(&[16usize, 24][..], &[16, 24, 32][..]) {
        for m in 0..=d {
            for k in 0..=d / 2 {
                let c = kravchuk_bound_check(d, m, k).expect("k <= d/2");
                count += 1;
                if !c.holds && fail.is_none() {
                    fail = Some(format!("bound fails at (d, m, k) = ({d}, {m}, {k}): {} > {}", c.value, c.bound));
                }
            }
        }
    }
    match fail {
        None => s.check(true, format!("growth bound holds on {count} (d, m, k) points")),
        Some(f) => s.check(false, f),
    }
    s.finish()
}

pub fn fourier_suite(ctx: &Ctx) -> SuiteResult {
    let mut s = Suite::new("fourier");
    let mut r = rng(1);
    let trials = ctx.pick(60, 200);
    let mut bad = None;
    for _ in 0..trials {
        let d = r.random_range(1..=14usize);
        let v = random_point(d, &mut r);
        let s_star = r.random_range(0..=d + 1);
        let subset: Vec<usize> = (0..d).filter(|_| r.random::<bool>()).collect();
        let ltf = ThresholdLtf::new(v, s_star).expect("s ≤ d+1");
        let closed = marginrcn::hardness::fourier_coefficient(&ltf, &subset).expect("valid subset");
        let enumerated = fourier_coefficient_enumerated(&ltf, &subset).expect("d ≤ 14");
        if closed != enumerated && bad.is_none() {
            bad = Some(format!(
                "v = {:?}, s* = {s_star}, T = {subset:?}: {} != {}",
                ltf.v.coords(),
                rational_string(&closed),
                rational_string(&enumerated)
            ));
        }
    }
    match bad {
        None => s.check(true, format!("closed form equals enumeration on {trials} random (v, s*, T)")),
        Some(b) => s.check(false, b),
    }

    let max_d = ctx.pick(10, 14);
    let mut bad = None;
    for d in 1..=max_d {
        let v = random_point(d, &mut r);
        let s_star = r.random_range(0..=d + 1);
        let ltf = ThresholdLtf::new(v, s_star).expect("s ≤ d+1");
        let levels = level_coefficients(d, s_star);
        let spec = walsh_spectrum(&ltf).expect("d ≤ 14");
        let same = spec
            .iter()
            .enumerate()
            .all(|(t, c)| *c == fourier_coefficient_mask(&ltf, &levels, t as u64).expect("d ≤ 64"));
        let parseval = parseval_sum(&ltf).expect("d ≤ 14") == ltf.mass();
        if !(same && parseval) && bad.is_none() {
            bad = Some(format!("d = {d}, s* = {s_star}: spectrum match {same}, Parseval {parseval}"));
        }
    }
    match bad {
        None => s.check(true, format!("full spectrum and Parseval exact for d = 1..={max_d}")),
        Some(b) => s.check(false, b),
    }
    s.finish()
}

pub fn pmf_suite(ctx: &Ctx) -> SuiteResult {
    let mut s = Suite::new("pmf");
    let mut r = rng(2);
    let etas = [third(), BigRational::zero(), BigRational::new(2.into(), 7.into())];
    let trials = ctx.pick(8, 20);
    let mut bad = None;
    for i in 0..trials {
        let d = r.random_range(1..=7usize);
        let dv = dist(random_point(d, &mut r), r.random_range(0..=d + 1), &etas[i % etas.len()]);
        for label in 0..=1u8 {
            let mut total = BigRational::zero();
            for mask in 0u64..1 << d {
                let x = HypercubePoint::from_neg_mask(d, mask);
                let p = pmf_conditional(&dv, &x, label).expect("valid");
                if p != pmf_conditional_enumerated(&dv, &x, label).expect("d ≤ 24") && bad.is_none() {
                    bad = Some(format!("v = {:?}, s* = {}, y = {label}, x = {:?}", dv.ltf.v.coords(), dv.ltf.s_star, x.coords()));
                }
                total += p;
            }
            let rate = dv.positive_rate();
            let degenerate = if label == 1 { rate.is_zero() } else { rate.is_one() };
            if !degenerate && total != BigRational::one() && bad.is_none() {
                bad = Some(format!("pmf sums to {} for y = {label}", rational_string(&total)));
            }
        }
    }
    match bad {
        None => s.check(true, format!("closed-form A_v, B_v equal enumeration and sum to 1 on {trials} instances")),
        Some(b) => s.check(false, b),
    }
    s.finish()
}

pub fn correlation_suite(ctx: &Ctx) -> SuiteResult {
    let mut s = Suite::new("correlation");
    let mut r = rng(3);
    let trials = ctx.pick(20, 50);
    let (mut bad, mut lemma_ok) = (None, 0);
    for _ in 0..trials {
        let d = r.random_range(1..=12usize);
        let s_star = r.random_range(0..=d + 1);
        let (dv, du) = (dist(random_point(d, &mut r), s_star, &third()), dist(random_point(d, &mut r), s_star, &third()));
        let spec = LevelSpectrum::new(d, s_star).expect("s ≤ d+1");
        let a = correlation_pair_with(&dv, &du, &spec, 10.0).expect("d ≤ 24");
        let b = correlation_pair_formula(&dv, &du, &spec, 10.0).expect("valid");
        let sum: BigRational = a.rk_terms.iter().sum();
        let ok = a == b && a.rk_terms[0] == &a.e_fv * &a.e_fv && sum == a.e_fvfu;
        if !ok && bad.is_none() {
            bad = Some(format!("v = {:?}, u = {:?}, s* = {s_star}", dv.ltf.v.coords(), du.ltf.v.coords()));
        }
        lemma_ok += usize::from(a.lemma_holds());
    }
    match bad {
        None => s.check(true, format!("enumeration and closed-form reports agree exactly on {trials} random pairs")),
        Some(b) => s.check(false, b),
    }
    s.info(format!("covariance and self bounds (informational) hold on {lemma_ok}/{trials} pairs"));

    let v = random_point(9, &mut r);
    let dv = dist(v, 6, &third());
    let same = correlation_pair_with(&dv, &dv, &LevelSpectrum::new(9, 6).expect("valid"), 10.0).expect("d ≤ 24");
    s.check(
        same.covariance == &dv.eps_actual * (BigRational::one() - &dv.eps_actual),
        "u = v gives covariance E[f](1 - E[f])",
    );
    s.finish()
}

pub fn levels_suite(ctx: &Ctx) -> SuiteResult {
    let mut s = Suite::new("levels");
    let max_d = ctx.pick(16, 20);
    let mut bad = None;
    for d in 1..=max_d {
        for s_star in 0..=d + 1 {
            let spec = LevelSpectrum::new(d, s_star).expect("valid");
            let edge = rk_edge_bound(d, s_star);
            for m in 0..=d {
                let t = spec.rk_terms(m).expect("m ≤ d");
                let r_d = if t[d] < BigRational::zero() { -t[d].clone() } else { t[d].clone() };
                if r_d > edge && bad.is_none() {
                    bad = Some(format!("(d, s*, m) = ({d}, {s_star}, {m})"));
                }
            }
        }
    }
    match bad {
        None => s.check(true, format!("|R_d| <= 2^-2d C(d-1, s*-1)^2 for all d <= {max_d}, s*, m")),
        Some(b) => s.check(false, format!("edge bound fails at {b}")),
    }

    let mut r = rng(4);
    let trials = ctx.pick(12, 30);
    let mut bad = None;
    for _ in 0..trials {
        let d = r.random_range(1..=max_d);
        let s_star = r.random_range(0..=d + 1);
        let (dv, du) = (dist(random_point(d, &mut r), s_star, &third()), dist(random_point(d, &mut r), s_star, &third()));
        let rep = correlation_pair_with(&dv, &du, &LevelSpectrum::new(d, s_star).expect("valid"), 10.0).expect("d ≤ 24");
        let sum: BigRational = rep.rk_terms.iter().sum();
        if sum != rep.e_fvfu && bad.is_none() {
            bad = Some(format!("d = {d}, s* = {s_star}, m = {}", rep.agreement_count));
        }
    }
    match bad {
        None => s.check(true, format!("sum of R_k equals enumerated E[f_v f_u] on {trials} pairs")),
        Some(b) => s.check(false, format!("level sum differs at {b}")),
    }
    s.finish()
}

pub fn decay_suite(_ctx: &Ctx) -> SuiteResult {
    let mut s = Suite::new("decay");
    let d = 32;
    let choice = threshold_for_mass(d, 0.05).expect("valid target");
    let spec = LevelSpectrum::new(d, choice.s_star).expect("valid");
    match search_decay_constant(&spec, d / 2, 0.05, 10.0).expect("ε > 0") {
        Some(c) => s.check(
            true,
            format!(
                "d = 32, m = 16, s* = {}: tail over k in [{}, {}] is {:.3e} <= eps^2/d = {:.3e} at c = {:.2}",
                choice.s_star, c.k_lo, c.k_hi, c.partial_sum, c.bound, c.c
            ),
        ),
        None => s.check(false, "no c <= 10 on the 0.05 grid satisfies the large-degree decay bound"),
    }
    let small = small_degree_check(&spec, d / 2 + 2, 1.0, DEFAULT_FAMILY_C).expect("v·u ≠ 0");
    s.info(format!(
        "small-degree ratio at c = 1, v.u = {}: max |R_k| / (4 eps^2 k' |v.u|/d) = {:.4} at k = {}",
        small.inner_product, small.max_ratio, small.worst_k
    ));
    s.finish()
}

pub fn family_suite(_ctx: &Ctx) -> SuiteResult {
    let mut s = Suite::new("family");
    match near_orthogonal_set(64, 0.25, 32, 1) {
        Ok(f) => {
            let mut max = 0;
            for i in 0..f.len() {
                for j in i + 1..f.len() {
                    max = max.max(f[i].dot(&f[j]).expect("same d").abs());
                }
            }
            s.check(f.len() == 32 && max <= 22, format!("d = 64, c = 0.25: 32 vectors with max |v.u| = {max} <= 22"));
        }
        Err(e) => s.check(false, format!("sampling failed: {e}")),
    }
    s.check(near_orthogonal_set(10, 0.25, 1, 5).map(|f| f.len() == 1).unwrap_or(false), "count = 1 is vacuous");
    s.finish()
}

fn random_ball(d: usize, r: &mut StreamRng) -> Vec<f64> {
    let u = random_unit(d, r);
    let rad: f64 = r.random();
    u.as_slice().iter().map(|x| x * rad).collect()
}

pub fn model_suite(ctx: &Ctx) -> SuiteResult {
    let mut s = Suite::new("model");
    let mut r = rng(5);
    let n = ctx.pick(20_000, 100_000);
    let (mut worst_norm, mut worst_id) = (f64::NEG_INFINITY, 0.0f64);
    for _ in 0..n {
        let d = r.random_range(1..=20usize);
        let eta = r.random_range(1e-6..0.5);
        let (w, wb) = (random_ball(d, &mut r), random_ball(d, &mut r));
        let x = random_unit(d, &mut r);
        let y = if r.random::<bool>() { SignLabel::Positive } else { SignLabel::Negative };
        let g = leaky_relu_subgradient(&w, &x, y, eta).expect("same d");
        let gb = leaky_relu_subgradient(&wb, &x, y, eta).expect("same d");
        worst_norm = worst_norm.max(norm(&g) - (1.0 - eta));
        let lhs: f64 = g.iter().zip(&gb).zip(w.iter().zip(&wb)).map(|((a, b), (c, e))| (a - b) * (c - e)).sum();
        let dis = f64::from(disagreement_indicator(&w, &wb, &x).expect("same d"));
        let rhs = (1.0 - 2.0 * eta) * dis * (dot(&w, x.as_slice()).abs() + dot(&wb, x.as_slice()).abs());
        worst_id = worst_id.max((lhs - rhs).abs());
    }
    s.check(worst_norm <= 1e-12, format!("subgradient norm <= 1 - eta + 1e-12 on {n} tuples (worst excess {worst_norm:.3e})"));
    s.check(worst_id <= 1e-10, format!("difference identity within 1e-10 on {n} tuples (worst {worst_id:.3e})"));

    let d = 6;
    let w = random_ball(d, &mut r);
    let mut ex: Vec<LabeledExample> = (0..50)
        .map(|_| LabeledExample {
            x: random_unit(d, &mut r),
            y: if r.random::<bool>() { SignLabel::Positive } else { SignLabel::Negative },
        })
        .collect();
    let a = empirical_subgradient(&w, &Dataset::from_examples(d, ex.clone()).expect("same d"), 0.2).expect("nonempty");
    ex.reverse();
    let b = empirical_subgradient(&w, &Dataset::from_examples(d, ex.clone()).expect("same d"), 0.2).expect("nonempty");
    let diff = a.iter().zip(&b).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max);
    s.check(diff <= 1e-15, format!("empirical subgradient permutation-invariant (max diff {diff:.1e})"));
    s.check(
        ex.iter().all(|e| disagreement_indicator(&w, &w, &e.x).expect("same d") == 0),
        "disagreement(w, w, x) = 0",
    );
    s.finish()
}

pub fn learner_suite(ctx: &Ctx) -> SuiteResult {
    let mut s = Suite::new("learner");
    let (eps, eta, gamma) = (0.3, 0.2, 0.3);
    let cfg = SimulatorConfig::new(10, gamma, eta, 2000, 11);
    let (train, inst) = generate_dataset(&cfg).expect("valid config");
    let params = derive_params_in(eps, 0.1, eta, gamma, 10).expect("valid");
    let holdout = ExampleStream::new(&inst, 11, 1).take(params.holdout_size()).expect("sampler");
    let test = ExampleStream::new(&inst, 11, 2).take(ctx.pick(5_000, 20_000)).expect("sampler");
    let opts = PsgdOptions {
        exec: Execution::Parallel,
        w_star: Some(&inst.w_star),
    };
    let trace = run_psgd_with(&train, &params, opts).expect("valid run");
    let gap = trace.average_gap().expect("diagnostics");
    s.check(
        gap <= params.regret_bound() + 1e-9,
        format!("average gap {gap:.5} <= 2(1-eta)/sqrt(T+1) = {:.5} (T = {})", params.regret_bound(), params.t),
    );
    let seq = run_psgd_with(&train, &params, PsgdOptions { exec: Execution::Sequential, ..opts }).expect("valid run");
    s.check(seq == trace, "sequential and parallel runs are bit-identical");
    let sel = select_hypothesis(&trace, &holdout).expect("nonempty");
    let err = evaluate_error(sel.w.as_slice(), &test).expect("nonempty");
    s.check(err <= eta + eps, format!("test error {err:.4} <= eta + eps = {:.2}", eta + eps));
    s.finish()
}

pub fn jl_suite(_ctx: &Ctx) -> SuiteResult {
    let mut s = Suite::new("jl");
    let (d, gamma) = (200, 0.3);
    let cfg = SimulatorConfig::new(d, gamma, 0.1, 500, 4);
    let (pts, inst) = generate_dataset(&cfg).expect("valid config");
    let jl = JlConfig::derive(gamma, 1e-3, 9).expect("valid");
    let a = sample_jl_matrix(&jl, d).expect("valid");
    let frac = margin_preservation_fraction(&a, &inst.w_star, &pts, gamma).expect("nonempty");
    s.check(frac == 0.0, format!("m = {}: no point loses half its margin (fraction {frac})", jl.m));

    let small = SimulatorConfig::new(20, 0.3, 0.2, 300, 5);
    let (train, inst) = generate_dataset(&small).expect("valid config");
    let holdout = ExampleStream::new(&inst, 5, 1).take(200).expect("sampler");
    let params = marginrcn::dimreduce::with_reduced_iterations(derive_params_in(0.3, 0.1, 0.2, 0.3, 20).expect("valid"), 60);
    let mut agree = true;
    for m in [5, 12, 30] {
        let jl = JlConfig::with_dimension(m, 3, 1e-3, 0.3);
        let x = reduced_train(&train, &holdout, &params, &jl, Some(JlRoute::Direct), Execution::Sequential).expect("run");
        let y = reduced_train(&train, &holdout, &params, &jl, Some(JlRoute::Gram), Execution::Sequential).expect("run");
        let diff = x
            .lifted
            .iter()
            .zip(&y.lifted)
            .flat_map(|(p, q)| p.as_slice().iter().zip(q.as_slice()).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max);
        agree &= diff < 1e-9 && x.selected.index == y.selected.index;
    }
    s.check(agree, "direct and Gram routes give the same lifted iterates for m in {5, 12, 30}");
    s.finish()
}

/// SHA-256 of the command's stdout followed by each listed output file.
pub fn run_and_hash(argv: &[String], files: &[&Path]) -> CliResult<String> {
    let mut stdout = Vec::new();
    crate::run_args(argv, &mut stdout)?;
    let mut h = Sha256::new();
    h.update(&stdout);
    for f in files {
        h.update(std::fs::read(f)?);
    }
    Ok(h.finalize().iter().map(|b| format!("{b:02x}")).collect())
}

/// Commands rerun by the reproducibility suite, as argv templates over `{dir}`
/// with the files each one writes.
pub fn repro_commands() -> Vec<(Vec<&'static str>, Vec<&'static str>)> {
    vec![
        (
            vec!["simulate", "--d", "8", "--gamma", "0.2", "--eta", "0.2", "--n", "700", "--seed", "7", "--out", "{dir}/a.ds"],
            vec!["a.ds", "a.ds.meta.json"],
        ),
        (
            vec!["simulate", "--d", "8", "--gamma", "0.2", "--eta", "0.2", "--n", "2000", "--seed", "7", "--stream", "2", "--out", "{dir}/t.ds"],
            vec!["t.ds", "t.ds.meta.json"],
        ),
        (
            vec!["simulate", "--d", "30", "--gamma", "0.6", "--eta", "0.1", "--n", "50", "--seed", "3", "--w-star", "random-unit", "--out", "{dir}/r.ds"],
            vec!["r.ds", "r.ds.meta.json"],
        ),
        (vec!["train", "--data", "{dir}/a.ds", "--test", "{dir}/t.ds", "--eps", "0.3", "--T", "150"], vec![]),
        (
            vec!["train", "--data", "{dir}/a.ds", "--eps", "0.3", "--T", "80", "--jl", "--m", "6", "--jl-seed", "2", "--out", "{dir}/jl.json"],
            vec!["jl.json"],
        ),
        (vec!["sweep", "--config", "{dir}/sweep.json", "--parallel", "2", "--out", "{dir}/sweep.csv"], vec!["sweep.csv"]),
        (vec!["hardness", "gen", "--d", "20", "--c", "0.25", "--count", "6", "--seed", "3", "--out", "{dir}/fam.json"], vec!["fam.json"]),
        (vec!["hardness", "correlate", "--family", "{dir}/fam.json", "--format", "csv"], vec![]),
        (vec!["hardness", "correlate", "--v", "++-+-+--+-", "--u", "+--+-++-+-", "--s-star", "7"], vec![]),
        (vec!["hardness", "correlate", "--v", "++-+-+--+-", "--u", "+--+-++-+-", "--approx", "--samples", "2000", "--seed", "4"], vec![]),
        (vec!["hardness", "rk", "--d", "16", "--m", "9", "--decay-step", "0.1", "--small-degree-c", "1"], vec![]),
        (vec!["hardness", "kravchuk", "--n", "6"], vec![]),
        (vec!["hardness", "sample", "--v", "+-+-+-+-", "--n", "100", "--seed", "2", "--out", "{dir}/s.cube"], vec!["s.cube"]),
    ]
}

pub const REPRO_SWEEP_CONFIG: &str = r#"{
  "d": [6], "gamma": [0.3], "eta": [0.1, 0.2], "eps": [0.3], "N": [150],
  "seeds_per_cell": 2, "seed": 5, "test_n": 500, "T": 40
}
"#;

pub fn repro_suite(_ctx: &Ctx) -> SuiteResult {
    let mut s = Suite::new("repro");
    let dir = match tempfile::tempdir() {
        Ok(d) => d,
        Err(e) => {
            s.check(false, format!("temporary directory: {e}"));
            return s.finish();
        }
    };
    let root = dir.path();
    if let Err(e) = std::fs::write(root.join("sweep.json"), REPRO_SWEEP_CONFIG) {
        s.check(false, format!("sweep config: {e}"));
        return s.finish();
    }
    let sub = |t: &str| t.replace("{dir}", &root.display().to_string());
    for (argv, files) in repro_commands() {
        let argv: Vec<String> = argv.iter().map(|a| sub(a)).collect();
        let paths: Vec<std::path::PathBuf> = files.iter().map(|f| root.join(f)).collect();
        let refs: Vec<&Path> = paths.iter().map(|p| p.as_path()).collect();
        let label = argv.iter().take(3).cloned().collect::<Vec<_>>().join(" ");
        match (run_and_hash(&argv, &refs), run_and_hash(&argv, &refs)) {
            (Ok(a), Ok(b)) => s.check(a == b, format!("{label}: sha256 {}", &a[..16])),
            (Err(e), _) | (_, Err(e)) => s.check(false, format!("{label}: {e}")),
        }
    }
    s.finish()
}
