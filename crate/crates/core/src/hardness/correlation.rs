//! Pairwise correlations of hard distributions and the level decomposition of
//! `E[f_v f_u]`.
//!
//! With `p = Pr[y = 1] = η + (1−2η)ε` and `D₀ = U_d × Bernoulli(p)`, summing
//! over the four `(f_v, f_u)` classes gives the closed forms
//! `χ_{D₀}(D_v, D_u) = (1−2η)²·(E[f_v f_u] − ε²)/(p(1−p))` and
//! `χ²(D_v, D₀) = (1−2η)²·ε(1−ε)/(p(1−p))`. The enumeration path sums
//! `D_v D_u / D₀` point by point instead; the two must agree exactly.
//!
//! `R_k = C(d,k)·c_k²·K(d, k, d−m)` where `m` counts the coordinates on which
//! `v` and `u` agree, because `Σ_{|T|=k} χ_T(v)χ_T(u) = Σ_{|T|=k} (−1)^{|T ∩ Δ|}`
//! for the disagreement set `Δ` of size `d−m`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::Rng;
use serde::Serialize;

use super::binomial::{binomial_or_zero, binomial_row, pow2, to_f64};
use super::check_enumeration;
use super::distribution::HardDistribution;
use super::fourier::level_coefficients_with;
use super::kravchuk::KravchukTable;
use super::ltf::HypercubePoint;
use super::report::{ser_rational, ser_rationals};
use crate::error::{out_of_range, Result};
use crate::model::check_dims;
use crate::par::{self, Execution};
use crate::rng::stream_rng;

/// Default `C` used for `bound_rhs` in reports.
pub const DEFAULT_BOUND_CONSTANT: f64 = 10.0;

/// Default `c` in the near-orthogonality hypothesis `|v·u| < d^{1/2+c}`.
pub const DEFAULT_FAMILY_C: f64 = 0.25;

/// Level coefficients and the Kravchuk table of one `(d, s*)`, shared across pairs.
#[derive(Debug, Clone)]
pub struct LevelSpectrum {
    pub d: usize,
    pub s_star: usize,
    pub levels: Vec<BigRational>,
    table: KravchukTable,
    binomials: Vec<BigInt>,
}

impl LevelSpectrum {
    pub fn new(d: usize, s_star: usize) -> Result<Self> {
        if s_star > d + 1 {
            return Err(out_of_range("s_star", s_star, "[0, d+1]"));
        }
        let table = KravchukTable::new(d);
        let levels = level_coefficients_with(&table, s_star);
        Ok(LevelSpectrum {
            d,
            s_star,
            levels,
            table,
            binomials: binomial_row(d),
        })
    }

    pub fn eps(&self) -> &BigRational {
        &self.levels[0]
    }

    /// `R_0, …, R_d` for a pair agreeing in `m` coordinates.
    pub fn rk_terms(&self, m: usize) -> Result<Vec<BigRational>> {
        if m > self.d {
            return Err(out_of_range("agreement count", m, "[0, d]"));
        }
        Ok((0..=self.d)
            .map(|k| {
                let c = &self.levels[k];
                c * c * &self.binomials[k] * self.table.get(k, self.d - m)
            })
            .collect())
    }
}

/// `R_0, …, R_d` for a pair sharing `d`, `s*`, agreeing in `m` coordinates.
pub fn rk_terms(d: usize, s_star: usize, m: usize) -> Result<Vec<BigRational>> {
    LevelSpectrum::new(d, s_star)?.rk_terms(m)
}

fn check_pair(dv: &HardDistribution, du: &HardDistribution) -> Result<usize> {
    check_dims(dv.dim(), du.dim())?;
    if dv.ltf.s_star != du.ltf.s_star {
        return Err(out_of_range("s_star", du.ltf.s_star, "equal to the first distribution's"));
    }
    if dv.eta != du.eta {
        return Err(out_of_range("eta", super::binomial::rational_string(&du.eta), "equal to the first distribution's"));
    }
    dv.ltf.v.agreement(&du.ltf.v)
}

pub fn rk_decomposition(dv: &HardDistribution, du: &HardDistribution) -> Result<Vec<BigRational>> {
    let m = check_pair(dv, du)?;
    rk_terms(dv.dim(), dv.ltf.s_star, m)
}

/// `2^{−2d}·C(d−1, s*−1)²`, with binomials outside their range read as zero.
pub fn rk_edge_bound(d: usize, s_star: usize) -> BigRational {
    let c = binomial_or_zero(d as i64 - 1, s_star as i64 - 1);
    BigRational::new(&c * &c, pow2(2 * d))
}

/// Smallest `C` making `lhs ≤ C·ln²(d/ε)·ε²·|v·u|/d + ε²` hold; `None` when no
/// finite `C` does (`v·u = 0` with `lhs > ε²`).
pub fn min_bound_constant(d: usize, eps: &BigRational, lhs: &BigRational, inner: i64) -> Option<f64> {
    let excess = lhs - eps * eps;
    if !excess.is_positive() {
        return Some(0.0);
    }
    let e = to_f64(eps);
    let scale = (d as f64 / e).ln().powi(2) * e * e * inner.unsigned_abs() as f64 / d as f64;
    if scale > 0.0 {
        Some(to_f64(&excess) / scale)
    } else {
        None
    }
}

/// `C·ln²(d/ε)·ε²·|v·u|/d + ε²`; exactly zero when `ε = 0`.
pub fn bound_rhs(d: usize, eps: &BigRational, inner: i64, c: f64) -> f64 {
    let e = to_f64(eps);
    if e == 0.0 {
        return 0.0;
    }
    c * (d as f64 / e).ln().powi(2) * e * e * inner.unsigned_abs() as f64 / d as f64 + e * e
}

/// Whether `|v·u| < d^{1/2+c}`.
pub fn near_orthogonal(d: usize, inner: i64, c: f64) -> bool {
    (inner.unsigned_abs() as f64) < (d as f64).powf(0.5 + c)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrelationReport {
    pub d: usize,
    pub s_star: usize,
    #[serde(serialize_with = "ser_rational")]
    pub eta: BigRational,
    pub v: HypercubePoint,
    pub u: HypercubePoint,
    pub inner_product: i64,
    pub agreement_count: usize,
    #[serde(serialize_with = "ser_rational")]
    pub eps_actual: BigRational,
    #[serde(serialize_with = "ser_rational")]
    pub e_fv: BigRational,
    #[serde(serialize_with = "ser_rational")]
    pub e_fu: BigRational,
    #[serde(serialize_with = "ser_rational")]
    pub e_fvfu: BigRational,
    #[serde(serialize_with = "ser_rational")]
    pub covariance: BigRational,
    #[serde(serialize_with = "ser_rational")]
    pub chi_pair: BigRational,
    #[serde(serialize_with = "ser_rational")]
    pub chi_self: BigRational,
    #[serde(serialize_with = "ser_rationals")]
    pub rk_terms: Vec<BigRational>,
    /// `2(1−2η)·(E[f_v f_u] − E[f_v]E[f_u])`.
    #[serde(serialize_with = "ser_rational")]
    pub pair_bound: BigRational,
    pub pair_bound_holds: bool,
    /// `(1−2η)·(E[f_v] − E[f_v]²)`.
    #[serde(serialize_with = "ser_rational")]
    pub self_bound: BigRational,
    pub self_bound_holds: bool,
    pub bound_constant: f64,
    pub bound_rhs: f64,
    #[serde(rename = "min_C")]
    pub min_c: Option<f64>,
    pub hypothesis_met: bool,
}

impl CorrelationReport {
    pub fn lemma_holds(&self) -> bool {
        self.pair_bound_holds && self.self_bound_holds
    }
}

struct Exact {
    e_fv: BigRational,
    e_fu: BigRational,
    e_fvfu: BigRational,
    chi_pair: BigRational,
    chi_self: BigRational,
}

fn assemble(dv: &HardDistribution, du: &HardDistribution, m: usize, spectrum: &LevelSpectrum, x: Exact, c: f64) -> Result<CorrelationReport> {
    let d = dv.dim();
    let inner = 2 * m as i64 - d as i64;
    let contrast = dv.contrast();
    let covariance = &x.e_fvfu - &x.e_fv * &x.e_fu;
    let pair_bound = &contrast * BigInt::from(2) * &covariance;
    let self_bound = &contrast * (&x.e_fv - &x.e_fv * &x.e_fv);
    let eps = dv.eps_actual.clone();
    Ok(CorrelationReport {
        d,
        s_star: dv.ltf.s_star,
        eta: dv.eta.clone(),
        v: dv.ltf.v.clone(),
        u: du.ltf.v.clone(),
        inner_product: inner,
        agreement_count: m,
        pair_bound_holds: x.chi_pair <= pair_bound,
        self_bound_holds: x.chi_self <= self_bound,
        bound_rhs: bound_rhs(d, &eps, inner, c),
        min_c: min_bound_constant(d, &eps, &x.e_fvfu, inner),
        hypothesis_met: near_orthogonal(d, inner, DEFAULT_FAMILY_C),
        bound_constant: c,
        rk_terms: spectrum.rk_terms(m)?,
        eps_actual: eps,
        e_fv: x.e_fv,
        e_fu: x.e_fu,
        e_fvfu: x.e_fvfu,
        covariance,
        chi_pair: x.chi_pair,
        chi_self: x.chi_self,
        pair_bound,
        self_bound,
    })
}

/// All report fields by direct summation over `{±1}^d × {0, 1}` (`d ≤ 24`).
pub fn correlation_pair(dv: &HardDistribution, du: &HardDistribution) -> Result<CorrelationReport> {
    let spectrum = LevelSpectrum::new(dv.dim(), dv.ltf.s_star)?;
    correlation_pair_with(dv, du, &spectrum, DEFAULT_BOUND_CONSTANT)
}

pub fn correlation_pair_with(
    dv: &HardDistribution,
    du: &HardDistribution,
    spectrum: &LevelSpectrum,
    bound_constant: f64,
) -> Result<CorrelationReport> {
    let m = check_pair(dv, du)?;
    let d = dv.dim();
    check_enumeration(d)?;
    let (vm, um) = (dv.ltf.v.neg_mask().expect("d ≤ 24"), du.ltf.v.neg_mask().expect("d ≤ 24"));
    let s = dv.ltf.s_star;
    // counts[2·f_v + f_u]
    let mut counts = [0u64; 4];
    for x in 0u64..1 << d {
        let fv = d - (x ^ vm).count_ones() as usize >= s;
        let fu = d - (x ^ um).count_ones() as usize >= s;
        counts[2 * usize::from(fv) + usize::from(fu)] += 1;
    }
    let n = BigRational::from_integer(pow2(d));
    let frac = |k: u64| BigRational::from_integer(BigInt::from(k)) / &n;
    let e_fv = frac(counts[2] + counts[3]);
    let e_fu = frac(counts[1] + counts[3]);
    let e_fvfu = frac(counts[3]);

    // Label marginal of D_v, summed from the joint pmf.
    let label_mass = |y: u8| -> BigRational {
        (0..4)
            .map(|c| frac(counts[c]) * dv.label_weight(c >= 2, y))
            .fold(BigRational::zero(), |a, b| a + b)
    };
    let (mut pair, mut selfc) = (BigRational::zero(), BigRational::zero());
    for y in 0..=1u8 {
        let q = label_mass(y);
        if q.is_zero() {
            continue;
        }
        for (c, &k) in counts.iter().enumerate() {
            if k == 0 {
                continue;
            }
            let wv = dv.label_weight(c >= 2, y);
            let wu = du.label_weight(c % 2 == 1, y);
            // Σ over the class of D_v·D_u/D₀ = count·(wv/N)(wu/N)/(q/N).
            pair += frac(k) * &wv * &wu / &q;
        }
        // D₀ only depends on y, so the self term is grouped by f_v alone.
        for fv in [false, true] {
            let kv = counts[2 * usize::from(fv)] + counts[2 * usize::from(fv) + 1];
            let diff = dv.label_weight(fv, y) - &q;
            selfc += frac(kv) * &diff * &diff / &q;
        }
    }
    let exact = Exact {
        e_fv,
        e_fu,
        e_fvfu,
        chi_pair: pair - BigRational::one(),
        chi_self: selfc,
    };
    assemble(dv, du, m, spectrum, exact, bound_constant)
}

/// The same report from the closed forms: `E[f_v f_u] = Σ_k R_k` and the
/// `(1−2η)²/(p(1−p))` scalings. Valid for any `d ≤ 64`.
pub fn correlation_pair_formula(
    dv: &HardDistribution,
    du: &HardDistribution,
    spectrum: &LevelSpectrum,
    bound_constant: f64,
) -> Result<CorrelationReport> {
    let m = check_pair(dv, du)?;
    let eps = dv.eps_actual.clone();
    let e_fvfu = spectrum.rk_terms(m)?.into_iter().fold(BigRational::zero(), |a, b| a + b);
    let p = dv.positive_rate();
    let var = &p * (BigRational::one() - &p);
    let c2 = dv.contrast() * dv.contrast();
    let scaled = |x: BigRational| if var.is_zero() { BigRational::zero() } else { &c2 * x / &var };
    let exact = Exact {
        chi_pair: scaled(&e_fvfu - &eps * &eps),
        chi_self: scaled(&eps * (BigRational::one() - &eps)),
        e_fv: eps.clone(),
        e_fu: du.eps_actual.clone(),
        e_fvfu,
    };
    assemble(dv, du, m, spectrum, exact, bound_constant)
}

/// Monte-Carlo estimate of `E[f_v f_u]` and `χ_{D₀}(D_v, D_u)` for any `d`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ApproxCorrelation {
    pub d: usize,
    pub s_star: usize,
    pub inner_product: i64,
    pub samples: u64,
    pub seed: u64,
    pub eps_actual: f64,
    pub e_fvfu: f64,
    pub e_fvfu_se: f64,
    pub chi_pair: f64,
    pub chi_pair_se: f64,
    pub chi_self: f64,
}

pub fn correlation_pair_approx(dv: &HardDistribution, du: &HardDistribution, samples: u64, seed: u64) -> Result<ApproxCorrelation> {
    let m = check_pair(dv, du)?;
    if samples == 0 {
        return Err(out_of_range("samples", samples, "[1, ∞)"));
    }
    let d = dv.dim();
    let s = dv.ltf.s_star;
    let (v, u) = (dv.ltf.v.coords(), du.ltf.v.coords());
    let mut rng = stream_rng(seed, 0);
    let mut hits = 0u64;
    for _ in 0..samples {
        let (mut av, mut au) = (0usize, 0usize);
        for i in 0..d {
            let xi: i8 = if rng.random::<bool>() { 1 } else { -1 };
            av += usize::from(xi == v[i]);
            au += usize::from(xi == u[i]);
        }
        hits += u64::from(av >= s && au >= s);
    }
    let mean = hits as f64 / samples as f64;
    let se = (mean * (1.0 - mean) / samples as f64).sqrt();
    let eps = to_f64(&dv.eps_actual);
    let p = to_f64(&dv.positive_rate());
    let c2 = to_f64(&dv.contrast()).powi(2);
    let k = if p > 0.0 && p < 1.0 { c2 / (p * (1.0 - p)) } else { 0.0 };
    Ok(ApproxCorrelation {
        d,
        s_star: s,
        inner_product: 2 * m as i64 - d as i64,
        samples,
        seed,
        eps_actual: eps,
        e_fvfu: mean,
        e_fvfu_se: se,
        chi_pair: k * (mean - eps * eps),
        chi_pair_se: k * se,
        chi_self: k * eps * (1.0 - eps),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrelationBoundCheck {
    pub lhs: f64,
    pub eps: f64,
    pub rhs: f64,
    pub ratio_to_eps2: f64,
    #[serde(rename = "min_C")]
    pub min_c: Option<f64>,
    pub hypothesis_met: bool,
    /// `None` when the near-orthogonality hypothesis fails.
    pub holds: Option<bool>,
}

/// `E[f_v f_u] ≤ C·ln²(d/ε)·ε²·|v·u|/d + ε²` with `ε = eps_actual`, evaluated
/// exactly through the level sum. `family_c` sets the hypothesis `|v·u| < d^{1/2+c}`.
pub fn correlation_bound_check(
    dv: &HardDistribution,
    du: &HardDistribution,
    c: f64,
    family_c: f64,
) -> Result<CorrelationBoundCheck> {
    let m = check_pair(dv, du)?;
    let d = dv.dim();
    let spectrum = LevelSpectrum::new(d, dv.ltf.s_star)?;
    let lhs = spectrum.rk_terms(m)?.into_iter().fold(BigRational::zero(), |a, b| a + b);
    Ok(bound_check_from(d, &dv.eps_actual, &lhs, 2 * m as i64 - d as i64, c, family_c))
}

pub(crate) fn bound_check_from(d: usize, eps: &BigRational, lhs: &BigRational, inner: i64, c: f64, family_c: f64) -> CorrelationBoundCheck {
    let hypothesis_met = near_orthogonal(d, inner, family_c);
    let rhs = bound_rhs(d, eps, inner, c);
    let e = to_f64(eps);
    let min_c = min_bound_constant(d, eps, lhs, inner);
    CorrelationBoundCheck {
        lhs: to_f64(lhs),
        eps: e,
        rhs,
        ratio_to_eps2: if e > 0.0 { to_f64(lhs) / (e * e) } else { 0.0 },
        min_c,
        hypothesis_met,
        holds: hypothesis_met.then(|| min_c.is_some_and(|m| m <= c)),
    }
}

/// Reports for all pairs `i < j` of `family`, in lexicographic order.
pub fn correlation_sweep(
    family: &[HypercubePoint],
    s_star: usize,
    eta: &BigRational,
    bound_constant: f64,
    exec: Execution,
) -> Result<Vec<CorrelationReport>> {
    let Some(first) = family.first() else {
        return Ok(Vec::new());
    };
    let d = first.dim();
    check_enumeration(d)?;
    let spectrum = LevelSpectrum::new(d, s_star)?;
    let dists = family
        .iter()
        .map(|v| HardDistribution::new(super::ltf::ThresholdLtf::new(v.clone(), s_star)?, eta.clone()))
        .collect::<Result<Vec<_>>>()?;
    let pairs: Vec<(usize, usize)> = (0..dists.len())
        .flat_map(|i| (i + 1..dists.len()).map(move |j| (i, j)))
        .collect();
    par::map_slice(exec, &pairs, |&(i, j)| correlation_pair_with(&dists[i], &dists[j], &spectrum, bound_constant))
        .into_iter()
        .collect()
}

/// Outcome of the large-degree decay check at one constant `c`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecayCheck {
    pub c: f64,
    pub k_lo: usize,
    pub k_hi: usize,
    pub partial_sum: f64,
    pub bound: f64,
    pub holds: bool,
}

/// `Σ_{k = ⌈c·ln(d/ε)⌉}^{⌊d − c·ln(d/ε)⌋} |R_k| ≤ ε²/d`, compared exactly.
pub fn decay_check(spectrum: &LevelSpectrum, m: usize, c: f64) -> Result<DecayCheck> {
    let d = spectrum.d;
    let eps = spectrum.eps().clone();
    if eps.is_zero() {
        return Err(out_of_range("eps_actual", 0, "(0, 1]"));
    }
    let width = c * (d as f64 / to_f64(&eps)).ln();
    let k_lo = width.ceil().max(0.0) as usize;
    let k_hi_f = (d as f64 - width).floor();
    let terms = spectrum.rk_terms(m)?;
    let mut sum = BigRational::zero();
    let k_hi = if k_hi_f < 0.0 { 0 } else { k_hi_f as usize };
    if k_hi_f >= 0.0 {
        for t in terms.iter().take(k_hi.min(d) + 1).skip(k_lo) {
            sum += t.abs();
        }
    }
    let bound = &eps * &eps / BigRational::from_integer(BigInt::from(d));
    Ok(DecayCheck {
        c,
        k_lo,
        k_hi,
        partial_sum: to_f64(&sum),
        bound: to_f64(&bound),
        holds: sum <= bound,
    })
}

/// Smallest `c` on the grid `step, 2·step, …, ≤ max` passing [`decay_check`].
pub fn search_decay_constant(spectrum: &LevelSpectrum, m: usize, step: f64, max: f64) -> Result<Option<DecayCheck>> {
    let mut i = 1;
    while i as f64 * step <= max + 1e-12 {
        let check = decay_check(spectrum, m, i as f64 * step)?;
        if check.holds {
            return Ok(Some(check));
        }
        i += 1;
    }
    Ok(None)
}

/// Worst ratio `|R_k| / (4ε²k′|v·u|/d)` over `1 ≤ k ≤ k′` and `d−k′ ≤ k ≤ d`, where
/// `k′ = c·ln(d/ε)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SmallDegreeCheck {
    pub c: f64,
    pub k_prime: f64,
    pub inner_product: i64,
    pub max_ratio: f64,
    pub worst_k: usize,
    pub hypothesis_met: bool,
}

pub fn small_degree_check(spectrum: &LevelSpectrum, m: usize, c: f64, family_c: f64) -> Result<SmallDegreeCheck> {
    let d = spectrum.d;
    let inner = 2 * m as i64 - d as i64;
    if inner == 0 {
        return Err(out_of_range("v·u", 0, "nonzero"));
    }
    let eps = to_f64(spectrum.eps());
    if eps == 0.0 {
        return Err(out_of_range("eps_actual", 0, "(0, 1]"));
    }
    let k_prime = c * (d as f64 / eps).ln();
    let scale = 4.0 * eps * eps * k_prime * inner.unsigned_abs() as f64 / d as f64;
    let terms = spectrum.rk_terms(m)?;
    let (mut max_ratio, mut worst_k) = (0.0f64, 0usize);
    for (k, r) in terms.iter().enumerate().skip(1) {
        let kf = k as f64;
        if !(kf <= k_prime || kf >= d as f64 - k_prime) {
            continue;
        }
        let ratio = to_f64(&r.abs()) / scale;
        if ratio > max_ratio {
            max_ratio = ratio;
            worst_k = k;
        }
    }
    Ok(SmallDegreeCheck {
        c,
        k_prime,
        inner_product: inner,
        max_ratio,
        worst_k,
        hypothesis_met: near_orthogonal(d, inner, family_c),
    })
}
