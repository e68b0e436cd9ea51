use std::io::Write;

use marginrcn::dataset::{write_cube_dataset, write_dataset};
use marginrcn::hardness::binomial::{rational_string, to_f64};
use marginrcn::hardness::correlation::{
    correlation_pair_approx, correlation_pair_with, rk_edge_bound, search_decay_constant, small_degree_check, DecayCheck,
    LevelSpectrum, SmallDegreeCheck, DEFAULT_FAMILY_C,
};
use marginrcn::hardness::{
    check_enumeration_budget, correlation_sweep, hard_to_learner_dataset, near_orthogonal_set, report, sample_hard_cube,
    threshold_for_mass, HardDistribution, HypercubePoint, KravchukTable, ThresholdLtf,
};
use marginrcn::Execution;
use num_rational::BigRational;
use num_traits::Signed;
use serde::{Deserialize, Serialize};

use crate::args::{CorrelateArgs, GenArgs, HardnessCommand, KravchukArgs, ReportFormat, RkArgs, SampleArgs, ThresholdArgs};
use crate::error::{CliError, CliResult};
use crate::output::{emit, format_point, parse_eta, parse_point, to_json};
use crate::{FAMILY_SCHEMA, KRAVCHUK_SCHEMA, LEVELS_SCHEMA};

/// Largest `d` accepted by the level-decomposition and table commands.
pub const LEVELS_MAX_D: usize = 1000;

pub fn run(cmd: &HardnessCommand, out: &mut dyn Write) -> CliResult<()> {
    match cmd {
        HardnessCommand::Gen(a) => gen(a, out),
        HardnessCommand::Correlate(a) => correlate(a, out),
        HardnessCommand::Rk(a) => rk(a, out),
        HardnessCommand::Kravchuk(a) => kravchuk(a, out),
        HardnessCommand::Sample(a) => sample(a, out),
    }
}

fn s_star(d: usize, t: &ThresholdArgs) -> CliResult<usize> {
    match t.s_star {
        Some(s) if s > d + 1 => Err(CliError::usage(format!("invalid value for --s-star: {s} is outside [0, {}]", d + 1))),
        Some(s) => Ok(s),
        None => Ok(threshold_for_mass(d, t.target_mass)?.s_star),
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub struct FamilyFile {
    pub schema: String,
    pub d: usize,
    pub c: f64,
    pub count: usize,
    pub seed: u64,
    /// `d^{1/2+c}`; every pair satisfies `|v·u|` strictly below it.
    pub threshold: f64,
    pub max_abs_inner: i64,
    pub pairwise_ok: bool,
    pub vectors: Vec<String>,
}

fn max_abs_inner(family: &[HypercubePoint]) -> i64 {
    let mut best = 0;
    for i in 0..family.len() {
        for j in i + 1..family.len() {
            best = best.max(family[i].dot(&family[j]).expect("same d").abs());
        }
    }
    best
}

fn gen(a: &GenArgs, out: &mut dyn Write) -> CliResult<()> {
    let family = near_orthogonal_set(a.d, a.c, a.count, a.seed)?;
    let threshold = (a.d as f64).powf(0.5 + a.c);
    let max = max_abs_inner(&family);
    let file = FamilyFile {
        schema: FAMILY_SCHEMA.to_string(),
        d: a.d,
        c: a.c,
        count: a.count,
        seed: a.seed,
        threshold,
        max_abs_inner: max,
        pairwise_ok: family.len() < 2 || (max as f64) < threshold,
        vectors: family.iter().map(format_point).collect(),
    };
    emit(a.out.as_deref(), &to_json(&file)?, out)
}

fn read_family(path: &std::path::Path) -> CliResult<Vec<HypercubePoint>> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::failure(format!("{}: {e}", path.display())))?;
    let f: FamilyFile = serde_json::from_str(&text).map_err(|e| CliError::format(format!("{}: {e}", path.display())))?;
    if f.schema != FAMILY_SCHEMA {
        return Err(CliError::format(format!("{}: unsupported schema `{}`", path.display(), f.schema)));
    }
    let pts = f.vectors.iter().map(|s| parse_point(s)).collect::<CliResult<Vec<_>>>()?;
    if pts.iter().any(|p| p.dim() != f.d) {
        return Err(CliError::format(format!("{}: vector length differs from d = {}", path.display(), f.d)));
    }
    Ok(pts)
}

fn correlate(a: &CorrelateArgs, out: &mut dyn Write) -> CliResult<()> {
    let points = match (&a.v, &a.u, &a.family) {
        (Some(v), Some(u), None) => vec![parse_point(v)?, parse_point(u)?],
        (None, None, Some(p)) => read_family(p)?,
        _ => return Err(CliError::usage("pass either --v and --u, or --family")),
    };
    let d = points[0].dim();
    if points.iter().any(|p| p.dim() != d) {
        return Err(CliError::usage("all sign vectors must have the same length"));
    }
    let s = s_star(d, &a.threshold)?;
    let eta = parse_eta(&a.eta)?;
    let pair_mode = a.family.is_none();

    if a.approx {
        let dists = dists(&points, s, &eta)?;
        let mut reports = Vec::new();
        for (i, j) in pairs(points.len(), pair_mode) {
            reports.push(correlation_pair_approx(&dists[i], &dists[j], a.samples, a.seed)?);
        }
        let doc = serde_json::json!({ "schema": report::CORRELATION_SCHEMA, "approximate": true, "reports": reports });
        return emit(a.out.as_deref(), &to_json(&doc)?, out);
    }

    check_enumeration_budget(d).map_err(|e| CliError::from(e).with_hint("rerun with --approx for a Monte-Carlo estimate"))?;
    let reports = if pair_mode {
        let spectrum = LevelSpectrum::new(d, s)?;
        let dists = dists(&points, s, &eta)?;
        vec![correlation_pair_with(&dists[0], &dists[1], &spectrum, a.bound_constant)?]
    } else {
        correlation_sweep(&points, s, &eta, a.bound_constant, Execution::Parallel)?
    };
    let text = match a.format {
        ReportFormat::Json => report::to_json(&reports)? + "\n",
        ReportFormat::Csv => report::to_csv(&reports),
    };
    emit(a.out.as_deref(), &text, out)
}

fn dists(points: &[HypercubePoint], s: usize, eta: &BigRational) -> CliResult<Vec<HardDistribution>> {
    points
        .iter()
        .map(|p| Ok(HardDistribution::new(ThresholdLtf::new(p.clone(), s)?, eta.clone())?))
        .collect()
}

fn pairs(n: usize, single: bool) -> Vec<(usize, usize)> {
    if single {
        return vec![(0, 1)];
    }
    (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect()
}

#[derive(Debug, Serialize)]
struct LevelsReport {
    schema: &'static str,
    d: usize,
    s_star: usize,
    eps_actual: String,
    m: usize,
    inner_product: i64,
    rk_terms: Vec<String>,
    sum: String,
    sum_f64: f64,
    edge_bound: String,
    edge_bound_holds: bool,
    decay: Option<Option<DecayCheck>>,
    small_degree: Option<SmallDegreeCheck>,
}

fn rk(a: &RkArgs, out: &mut dyn Write) -> CliResult<()> {
    let (d, m) = match (&a.v, &a.u) {
        (Some(v), Some(u)) => {
            let (v, u) = (parse_point(v)?, parse_point(u)?);
            if let Some(d) = a.d {
                if d != v.dim() {
                    return Err(CliError::usage(format!("--d {d} differs from the vector length {}", v.dim())));
                }
            }
            (v.dim(), v.agreement(&u)?)
        }
        _ => {
            let d = a.d.ok_or_else(|| CliError::usage("--d is required without --v/--u"))?;
            (d, a.m.ok_or_else(|| CliError::usage("pass --m or --v/--u"))?)
        }
    };
    if d == 0 || d > LEVELS_MAX_D {
        return Err(CliError::usage(format!("invalid value for --d: {d} is outside [1, {LEVELS_MAX_D}]")));
    }
    let s = s_star(d, &a.threshold)?;
    let spectrum = LevelSpectrum::new(d, s)?;
    let terms = spectrum.rk_terms(m)?;
    let sum: BigRational = terms.iter().sum();
    let edge = rk_edge_bound(d, s);
    let decay = a.decay_step.map(|step| search_decay_constant(&spectrum, m, step, a.decay_max)).transpose()?;
    let small = match a.small_degree_c {
        Some(c) => Some(small_degree_check(&spectrum, m, c, DEFAULT_FAMILY_C)?),
        None => None,
    };
    let rep = LevelsReport {
        schema: LEVELS_SCHEMA,
        d,
        s_star: s,
        eps_actual: rational_string(spectrum.eps()),
        m,
        inner_product: 2 * m as i64 - d as i64,
        edge_bound_holds: terms[d].abs() <= edge,
        rk_terms: terms.iter().map(rational_string).collect(),
        sum_f64: to_f64(&sum),
        sum: rational_string(&sum),
        edge_bound: rational_string(&edge),
        decay,
        small_degree: small,
    };
    emit(a.out.as_deref(), &to_json(&rep)?, out)
}

#[derive(Debug, Serialize)]
struct KravchukReport {
    schema: &'static str,
    n: usize,
    /// `table[a][b] = K(n, a, b)`.
    table: Vec<Vec<String>>,
    invariants_hold: bool,
}

fn kravchuk(a: &KravchukArgs, out: &mut dyn Write) -> CliResult<()> {
    if a.n > LEVELS_MAX_D {
        return Err(CliError::usage(format!("invalid value for --n: {} is outside [0, {LEVELS_MAX_D}]", a.n)));
    }
    let t = KravchukTable::new(a.n);
    let rep = KravchukReport {
        schema: KRAVCHUK_SCHEMA,
        n: a.n,
        table: (0..=a.n).map(|x| (0..=a.n).map(|y| rational_string(t.get(x, y))).collect()).collect(),
        invariants_hold: t.invariant_violation().is_none(),
    };
    emit(a.out.as_deref(), &to_json(&rep)?, out)
}

fn sample(a: &SampleArgs, out: &mut dyn Write) -> CliResult<()> {
    let v = parse_point(&a.v)?;
    let s = s_star(v.dim(), &a.threshold)?;
    let dist = HardDistribution::new(ThresholdLtf::new(v, s)?, parse_eta(&a.eta)?)?;
    let fail = |e: marginrcn::Error| CliError::failure(format!("{}: {e}", a.out.display()));
    if a.sphere {
        write_dataset(&hard_to_learner_dataset(&dist, a.n, a.seed), &a.out).map_err(fail)?;
    } else {
        write_cube_dataset(&sample_hard_cube(&dist, a.n, a.seed), &a.out).map_err(fail)?;
    }
    writeln!(
        out,
        "wrote {} samples to {} (d={} s_star={} eps_actual={} eta={})",
        a.n,
        a.out.display(),
        dist.dim(),
        s,
        rational_string(&dist.eps_actual),
        rational_string(&dist.eta)
    )?;
    Ok(())
}
