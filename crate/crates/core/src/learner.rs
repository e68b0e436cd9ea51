//! Projected subgradient descent on the empirical leaky-ReLU subgradient field,
//! followed by holdout selection among the iterates.

use serde::Serialize;

use crate::dataset::Dataset;
use crate::error::{out_of_range, Error, Result};
use crate::model::{
    check_dims, check_finite, check_noise_rate, coefficient_sum, dot, norm, BallVector, SignLabel, UnitVector,
    REL_TOL,
};
use crate::par::{self, Execution};

/// `⌈x⌉`, except that values within relative `REL_TOL` of an integer snap to it,
/// so parameter formulas that are integral on paper stay integral.
pub(crate) fn ceil_snapped(x: f64) -> f64 {
    let r = x.round();
    if (x - r).abs() <= REL_TOL * x.abs().max(1.0) {
        r
    } else {
        x.ceil()
    }
}

fn check_open_unit(name: &'static str, v: f64) -> Result<()> {
    if v > 0.0 && v < 1.0 {
        Ok(())
    } else {
        Err(out_of_range(name, v, "(0, 1)"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LearnerParams {
    pub eps: f64,
    pub delta: f64,
    pub eta: f64,
    pub gamma: f64,
    #[serde(rename = "T")]
    pub t: usize,
    pub mu: f64,
    #[serde(skip)]
    pub w0: BallVector,
}

/// `μ = 2/((1−η)√(T+1))`.
pub fn step_size(eta: f64, t: usize) -> f64 {
    2.0 / ((1.0 - eta) * ((t + 1) as f64).sqrt())
}

/// `T = ⌈16(1−η)²/(γ²ε²) − 1⌉`, `μ = 2/((1−η)√(T+1))`, `w0 = 0` in dimension `d`.
pub fn derive_params_in(eps: f64, delta: f64, eta: f64, gamma: f64, d: usize) -> Result<LearnerParams> {
    check_open_unit("eps", eps)?;
    check_open_unit("delta", delta)?;
    check_open_unit("gamma", gamma)?;
    if !(eta > 0.0 && eta < 0.5) {
        return Err(out_of_range("eta", eta, "(0, 1/2)"));
    }
    let raw = 16.0 * (1.0 - eta).powi(2) / (gamma * gamma * eps * eps) - 1.0;
    let t = ceil_snapped(raw).max(0.0) as usize;
    Ok(LearnerParams {
        eps,
        delta,
        eta,
        gamma,
        t,
        mu: step_size(eta, t),
        w0: BallVector::zeros(d),
    })
}

/// [`derive_params_in`] with an empty `w0`; fix the dimension with [`LearnerParams::in_dim`].
pub fn derive_params(eps: f64, delta: f64, eta: f64, gamma: f64) -> Result<LearnerParams> {
    derive_params_in(eps, delta, eta, gamma, 0)
}

impl LearnerParams {
    /// Replaces `T` and recomputes `μ` from it.
    pub fn with_iterations(mut self, t: usize) -> Self {
        self.t = t;
        self.mu = step_size(self.eta, t);
        self
    }

    /// Resets `w0` to the zero vector of `R^d`.
    pub fn in_dim(mut self, d: usize) -> Self {
        self.w0 = BallVector::zeros(d);
        self
    }

    pub fn holdout_size(&self) -> usize {
        holdout_size(self.eps, self.delta, self.t)
    }

    /// `2(1−η)/√(T+1)`, the average-regret bound of the run.
    pub fn regret_bound(&self) -> f64 {
        2.0 * (1.0 - self.eta) / ((self.t + 1) as f64).sqrt()
    }

    /// `E₁ = 2(1−η)/((1−2η)γ√(T+1))`.
    pub fn e1(&self) -> f64 {
        self.regret_bound() / ((1.0 - 2.0 * self.eta) * self.gamma)
    }

    fn validate(&self) -> Result<()> {
        check_noise_rate(self.eta)?;
        if !(self.mu > 0.0 && self.mu.is_finite()) {
            return Err(out_of_range("mu", self.mu, "(0, ∞)"));
        }
        if norm(self.w0.as_slice()) > 1.0 + REL_TOL {
            return Err(out_of_range("w0 norm", norm(self.w0.as_slice()), "[0, 1]"));
        }
        Ok(())
    }
}

/// `N′ = ⌈(2/ε²)(ln(T+1) + ln(2/δ))⌉`: Hoeffding with a union bound over `T+1` iterates.
pub fn holdout_size(eps: f64, delta: f64, t: usize) -> usize {
    ceil_snapped(2.0 / (eps * eps) * (((t + 1) as f64).ln() + (2.0 / delta).ln())) as usize
}

/// `w` if `‖w‖ ≤ 1`, else `w/‖w‖`.
pub fn project_to_ball(mut w: Vec<f64>) -> Result<BallVector> {
    check_finite(&w, "projection input")?;
    let n = norm(&w);
    if n > 1.0 {
        w.iter_mut().for_each(|x| *x /= n);
    }
    Ok(BallVector::from_vec_unchecked(w))
}

/// Per-iterate quantities available when `w*` is known.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IterateDiagnostics {
    /// Fraction of training rows where `sgn(w_t·x) ≠ sgn(w*·x)`.
    pub disagreement: f64,
    /// `‖ĝ_N(w_t)‖`.
    pub subgradient_norm: f64,
    /// `ĝ_N(w_t)·(w_t − w*)`.
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterateTrace {
    pub iterates: Vec<BallVector>,
    pub diagnostics: Option<Vec<IterateDiagnostics>>,
}

impl IterateTrace {
    pub fn len(&self) -> usize {
        self.iterates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.iterates.is_empty()
    }

    /// `(1/(T+1))·Σ_t ĝ_N(w_t)·(w_t − w*)`.
    pub fn average_gap(&self) -> Option<f64> {
        let d = self.diagnostics.as_ref()?;
        Some(d.iter().map(|x| x.gap).sum::<f64>() / d.len() as f64)
    }

    pub fn min_train_disagreement(&self) -> Option<f64> {
        let d = self.diagnostics.as_ref()?;
        d.iter().map(|x| x.disagreement).reduce(f64::min)
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct PsgdOptions<'a> {
    pub exec: Execution,
    /// When set, every iterate (including `w_T`) gets [`IterateDiagnostics`].
    pub w_star: Option<&'a UnitVector>,
}

/// Algorithm: `w_{t+1} = proj_B(w_t − μ·ĝ_N(w_t))` for `t < T`, from `w0`.
pub fn run_psgd(train: &Dataset, params: &LearnerParams) -> Result<IterateTrace> {
    run_psgd_with(train, params, PsgdOptions::default())
}

pub fn run_psgd_with(train: &Dataset, params: &LearnerParams, opts: PsgdOptions) -> Result<IterateTrace> {
    if train.is_empty() {
        return Err(Error::Empty("training set"));
    }
    params.validate()?;
    let d = train.dim();
    check_dims(d, params.w0.dim())?;
    let reference: Option<Vec<SignLabel>> = match opts.w_star {
        Some(w) => {
            check_dims(d, w.dim())?;
            Some(train.rows().map(|(x, _)| SignLabel::of(dot(w.as_slice(), x))).collect())
        }
        None => None,
    };
    let n = train.len() as f64;
    let mut iterates = Vec::with_capacity(params.t + 1);
    let mut diagnostics = reference.as_ref().map(|_| Vec::with_capacity(params.t + 1));
    let mut w = params.w0.as_slice().to_vec();
    for t in 0..=params.t {
        let last = t == params.t;
        if last && diagnostics.is_none() {
            iterates.push(BallVector::from_vec_unchecked(w));
            break;
        }
        let (mut g, disagree) = coefficient_sum(
            &w,
            train.features(),
            train.features(),
            d,
            train.labels(),
            params.eta,
            reference.as_deref(),
            opts.exec,
        );
        g.iter_mut().for_each(|v| *v *= 0.5 / n);
        if let (Some(diag), Some(ws)) = (diagnostics.as_mut(), opts.w_star) {
            let gap: f64 = g.iter().zip(&w).zip(ws.as_slice()).map(|((gi, wi), si)| gi * (wi - si)).sum();
            diag.push(IterateDiagnostics {
                disagreement: disagree as f64 / n,
                subgradient_norm: norm(&g),
                gap,
            });
        }
        if last {
            iterates.push(BallVector::from_vec_unchecked(w));
            break;
        }
        let next: Vec<f64> = w.iter().zip(&g).map(|(wi, gi)| wi - params.mu * gi).collect();
        let next = project_to_ball(next)?.into_inner();
        iterates.push(BallVector::from_vec_unchecked(std::mem::replace(&mut w, next)));
    }
    Ok(IterateTrace { iterates, diagnostics })
}

/// Fraction of rows with `sgn(w·x) ≠ y`.
pub fn evaluate_error(w: &[f64], data: &Dataset) -> Result<f64> {
    if data.is_empty() {
        return Err(Error::Empty("evaluation set"));
    }
    check_dims(data.dim(), w.len())?;
    Ok(count_errors(w, data) as f64 / data.len() as f64)
}

pub(crate) fn count_errors(w: &[f64], data: &Dataset) -> usize {
    data.rows().filter(|(x, y)| SignLabel::of(dot(w, x)) != *y).count()
}

/// Fraction of rows where `w` and `w_ref` disagree in sign.
pub fn disagreement_rate(w: &[f64], w_ref: &[f64], data: &Dataset) -> Result<f64> {
    if data.is_empty() {
        return Err(Error::Empty("evaluation set"));
    }
    check_dims(data.dim(), w.len())?;
    check_dims(data.dim(), w_ref.len())?;
    let k = data
        .rows()
        .filter(|(x, _)| SignLabel::of(dot(w, x)) != SignLabel::of(dot(w_ref, x)))
        .count();
    Ok(k as f64 / data.len() as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SelectedHypothesis {
    pub w: BallVector,
    pub index: usize,
    pub holdout_error: f64,
}

/// The iterate with the fewest holdout mistakes; ties go to the lowest index.
pub fn select_hypothesis(trace: &IterateTrace, holdout: &Dataset) -> Result<SelectedHypothesis> {
    select_among(&trace.iterates, holdout, Execution::Sequential)
}

pub fn select_among(candidates: &[BallVector], holdout: &Dataset, exec: Execution) -> Result<SelectedHypothesis> {
    if candidates.is_empty() {
        return Err(Error::Empty("iterate trace"));
    }
    if holdout.is_empty() {
        return Err(Error::Empty("holdout set"));
    }
    for c in candidates {
        check_dims(holdout.dim(), c.dim())?;
    }
    let mistakes = par::map_slice(exec, candidates, |w| count_errors(w.as_slice(), holdout));
    let (index, &best) = mistakes
        .iter()
        .enumerate()
        .min_by_key(|&(i, m)| (*m, i))
        .expect("nonempty");
    Ok(SelectedHypothesis {
        w: candidates[index].clone(),
        index,
        holdout_error: best as f64 / holdout.len() as f64,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainOutcome {
    pub selected: SelectedHypothesis,
    pub trace: IterateTrace,
}

/// [`run_psgd_with`] followed by [`select_among`] on the holdout split.
pub fn train_and_select(
    train: &Dataset,
    holdout: &Dataset,
    params: &LearnerParams,
    opts: PsgdOptions,
) -> Result<TrainOutcome> {
    let trace = run_psgd_with(train, params, opts)?;
    let selected = select_among(&trace.iterates, holdout, opts.exec)?;
    Ok(TrainOutcome { selected, trace })
}

/// The three terms bounding the smallest test disagreement along a run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DisagreementDecomposition {
    pub e1: f64,
    pub e2: f64,
    pub e3: f64,
    pub min_test_disagreement: f64,
}

impl DisagreementDecomposition {
    /// Evaluates every iterate of `trace` (which must carry diagnostics for `w_star`)
    /// against `test`; `E₂ = 2‖ĝ_N(w*)‖/((1−2η)γ)` uses the training set.
    pub fn compute(
        trace: &IterateTrace,
        train: &Dataset,
        test: &Dataset,
        w_star: &UnitVector,
        params: &LearnerParams,
        exec: Execution,
    ) -> Result<Self> {
        let diag = trace.diagnostics.as_ref().ok_or(Error::Empty("trace diagnostics"))?;
        let g_star = crate::model::empirical_subgradient_with(w_star.as_slice(), train, params.eta, exec)?;
        let e2 = 2.0 * norm(&g_star) / ((1.0 - 2.0 * params.eta) * params.gamma);
        let test_dis = par::map_slice(exec, &trace.iterates, |w| {
            disagreement_rate(w.as_slice(), w_star.as_slice(), test)
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
        let e3 = test_dis.iter().zip(diag).map(|(te, d)| te - d.disagreement).sum::<f64>() / diag.len() as f64;
        Ok(DisagreementDecomposition {
            e1: params.e1(),
            e2,
            e3,
            min_test_disagreement: test_dis.iter().copied().fold(f64::INFINITY, f64::min),
        })
    }
}
