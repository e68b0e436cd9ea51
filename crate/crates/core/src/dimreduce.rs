//! The learner after a random sign projection `x ↦ Ax`, `A ∈ {±1/√m}^{m×d}`.
//!
//! Two equivalent routes run the reduced descent. `Direct` materializes the
//! projected rows and iterates in `R^m`. `Gram` never leaves `R^d`: starting from
//! `w̄₀ = 0`, every reduced iterate has the form `w̄ = Au`, and with `M = AᵀA`
//!
//! - `w̄·(Ax) = (Mu)·x`, so margins use `z = Mu`;
//! - the reduced subgradient is `A·ĝ_N(z)`, so `u ← u − μ·ĝ_N(z)`;
//! - `‖w̄‖² = u·Mu`, and the lifted iterate `Aᵀw̄` is `z` itself.
//!
//! `M` is computed exactly from the packed signs. The Gram route costs `O(d²)`
//! per step instead of `O(md)` and is picked automatically when `m ≥ d`.

use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{out_of_range, Error, Result};
use crate::learner::{ceil_snapped, project_to_ball, select_among, LearnerParams, SelectedHypothesis};
use crate::model::{check_dims, coefficient_sum, dot, BallVector, UnitVector};
use crate::par::{self, Execution};
use crate::rng::stream_rng;

/// Default `C_m` in `m = ⌈C_m·ln(1/β)/γ²⌉`.
pub const JL_CONSTANT: f64 = 64.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JlConfig {
    pub m: usize,
    pub seed: u64,
    pub beta: f64,
    pub gamma: f64,
    pub c_m: f64,
}

impl JlConfig {
    /// `m = ⌈C_m·ln(1/β)/γ²⌉` with `C_m = JL_CONSTANT`.
    pub fn derive(gamma: f64, beta: f64, seed: u64) -> Result<Self> {
        Self::derive_with_constant(gamma, beta, seed, JL_CONSTANT)
    }

    pub fn derive_with_constant(gamma: f64, beta: f64, seed: u64, c_m: f64) -> Result<Self> {
        if !(gamma > 0.0 && gamma < 1.0) {
            return Err(out_of_range("gamma", gamma, "(0, 1)"));
        }
        if !(beta > 0.0 && beta < 1.0) {
            return Err(out_of_range("beta", beta, "(0, 1)"));
        }
        if !(c_m > 0.0 && c_m.is_finite()) {
            return Err(out_of_range("c_m", c_m, "(0, ∞)"));
        }
        let m = ceil_snapped(c_m * (1.0 / beta).ln() / (gamma * gamma)).max(1.0) as usize;
        Ok(JlConfig { m, seed, beta, gamma, c_m })
    }

    /// An explicit reduced dimension; `beta` is recorded but unused.
    pub fn with_dimension(m: usize, seed: u64, beta: f64, gamma: f64) -> Self {
        JlConfig {
            m,
            seed,
            beta,
            gamma,
            c_m: JL_CONSTANT,
        }
    }
}

/// `β = εδ/(20N)`: failure budget of the projection over the sample.
pub fn default_beta(eps: f64, delta: f64, n: usize) -> f64 {
    eps * delta / (20.0 * n as f64)
}

/// `β′ = ε/(2N)`: tolerated fraction of points losing half the margin.
pub fn default_beta_prime(eps: f64, n: usize) -> f64 {
    eps / (2.0 * n as f64)
}

/// Dense `m×d` sign matrix scaled by `1/√m`. Entry `(r, j)` is bit `r·d + j` of the
/// stream of `u64` draws (least significant bit first); a set bit means `+1/√m`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JlMatrix {
    m: usize,
    d: usize,
    seed: u64,
    bits: Vec<u64>,
}

/// Stream of the projection matrix within a seed.
const JL_STREAM: u64 = 3;

pub fn sample_jl_matrix(config: &JlConfig, d: usize) -> Result<JlMatrix> {
    if config.m == 0 || d == 0 {
        return Err(out_of_range("m·d", config.m * d, "[1, ∞)"));
    }
    let mut rng = stream_rng(config.seed, JL_STREAM);
    let words = (config.m * d).div_ceil(64);
    let bits = (0..words).map(|_| rng.next_u64()).collect();
    Ok(JlMatrix {
        m: config.m,
        d,
        seed: config.seed,
        bits,
    })
}

impl JlMatrix {
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn scale(&self) -> f64 {
        1.0 / (self.m as f64).sqrt()
    }

    #[inline]
    pub fn is_positive(&self, r: usize, j: usize) -> bool {
        let i = r * self.d + j;
        self.bits[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn entry(&self, r: usize, j: usize) -> f64 {
        if self.is_positive(r, j) {
            self.scale()
        } else {
            -self.scale()
        }
    }

    /// `Ax`; signs are summed first and scaled once.
    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_dims(self.d, x.len())?;
        let s = self.scale();
        Ok((0..self.m)
            .map(|r| {
                let mut acc = 0.0;
                for (j, xj) in x.iter().enumerate() {
                    if self.is_positive(r, j) {
                        acc += xj;
                    } else {
                        acc -= xj;
                    }
                }
                acc * s
            })
            .collect())
    }

    /// `Aᵀy`.
    pub fn apply_transpose(&self, y: &[f64]) -> Result<Vec<f64>> {
        check_dims(self.m, y.len())?;
        let mut out = vec![0.0; self.d];
        for (r, yr) in y.iter().enumerate() {
            for (j, o) in out.iter_mut().enumerate() {
                if self.is_positive(r, j) {
                    *o += yr;
                } else {
                    *o -= yr;
                }
            }
        }
        let s = self.scale();
        out.iter_mut().for_each(|o| *o *= s);
        Ok(out)
    }

    /// `AᵀA` (row-major `d×d`), exact: `M_jk = (m − 2·#{r : signs differ})/m`.
    pub fn gram(&self, exec: Execution) -> Vec<f64> {
        let words = self.m.div_ceil(64);
        let mut cols = vec![0u64; self.d * words];
        for r in 0..self.m {
            for j in 0..self.d {
                if self.is_positive(r, j) {
                    cols[j * words + r / 64] |= 1 << (r % 64);
                }
            }
        }
        let m = self.m as f64;
        let rows = par::map_range(exec, self.d, |j| {
            let cj = &cols[j * words..(j + 1) * words];
            (0..self.d)
                .map(|k| {
                    let ck = &cols[k * words..(k + 1) * words];
                    let differ: u32 = cj.iter().zip(ck).map(|(a, b)| (a ^ b).count_ones()).sum();
                    (m - 2.0 * differ as f64) / m
                })
                .collect::<Vec<f64>>()
        });
        rows.concat()
    }
}

pub fn jl_apply(a: &JlMatrix, x: &[f64]) -> Result<Vec<f64>> {
    a.apply(x)
}

fn mat_vec(m: &[f64], d: usize, u: &[f64]) -> Vec<f64> {
    m.chunks_exact(d).map(|row| dot(row, u)).collect()
}

/// `T = ⌈(48(1−η)/((1−2η)γε))² − 1⌉` and `μ = 1/((1−η)√(T+1))` for the reduced run.
pub fn derive_reduced_params(eps: f64, delta: f64, eta: f64, gamma: f64) -> Result<LearnerParams> {
    let base = crate::learner::derive_params(eps, delta, eta, gamma)?;
    let raw = (48.0 * (1.0 - eta) / ((1.0 - 2.0 * eta) * gamma * eps)).powi(2) - 1.0;
    Ok(with_reduced_iterations(base, ceil_snapped(raw).max(0.0) as usize))
}

/// Replaces `T` and recomputes the reduced step `μ = 1/((1−η)√(T+1))`.
pub fn with_reduced_iterations(mut params: LearnerParams, t: usize) -> LearnerParams {
    params.t = t;
    params.mu = 1.0 / ((1.0 - params.eta) * ((t + 1) as f64).sqrt());
    params
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JlRoute {
    Direct,
    Gram,
}

impl JlRoute {
    pub fn auto(m: usize, d: usize) -> JlRoute {
        if m >= d {
            JlRoute::Gram
        } else {
            JlRoute::Direct
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReducedOutcome {
    pub selected: SelectedHypothesis,
    /// `proj_B(Aᵀw̄_t)` for `t = 0..=T`; positive rescaling leaves every sign intact.
    pub lifted: Vec<BallVector>,
    pub m: usize,
    pub beta: f64,
    pub jl_seed: u64,
    pub route: JlRoute,
}

/// Sample `A`, run the reduced descent from `w̄₀ = 0`, lift every iterate and
/// select on `holdout` in the original coordinates. `params.w0` is ignored.
pub fn reduced_train(
    train: &Dataset,
    holdout: &Dataset,
    params: &LearnerParams,
    jl: &JlConfig,
    route: Option<JlRoute>,
    exec: Execution,
) -> Result<ReducedOutcome> {
    if train.is_empty() {
        return Err(Error::Empty("training set"));
    }
    let d = train.dim();
    let a = sample_jl_matrix(jl, d)?;
    let route = route.unwrap_or(JlRoute::auto(jl.m, d));
    let lifted = match route {
        JlRoute::Direct => direct_route(train, params, &a, exec)?,
        JlRoute::Gram => gram_route(train, params, &a, exec),
    };
    let lifted = lifted
        .into_iter()
        .map(project_to_ball)
        .collect::<Result<Vec<_>>>()?;
    let selected = select_among(&lifted, holdout, exec)?;
    Ok(ReducedOutcome {
        selected,
        lifted,
        m: jl.m,
        beta: jl.beta,
        jl_seed: jl.seed,
        route,
    })
}

fn direct_route(train: &Dataset, params: &LearnerParams, a: &JlMatrix, exec: Execution) -> Result<Vec<Vec<f64>>> {
    let m = a.m();
    let rows = par::map_range(exec, train.len(), |i| a.apply(train.row(i)))
        .into_iter()
        .collect::<Result<Vec<_>>>()?
        .concat();
    let n = train.len() as f64;
    let mut w = vec![0.0; m];
    let mut reduced = Vec::with_capacity(params.t + 1);
    for t in 0..=params.t {
        reduced.push(w.clone());
        if t == params.t {
            break;
        }
        let (g, _) = coefficient_sum(&w, &rows, &rows, m, train.labels(), params.eta, None, exec);
        let next: Vec<f64> = w.iter().zip(&g).map(|(wi, gi)| wi - params.mu * gi * 0.5 / n).collect();
        w = project_to_ball(next)?.into_inner();
    }
    reduced.iter().map(|w| a.apply_transpose(w)).collect()
}

fn gram_route(train: &Dataset, params: &LearnerParams, a: &JlMatrix, exec: Execution) -> Vec<Vec<f64>> {
    let d = a.d();
    let gram = a.gram(exec);
    let n = train.len() as f64;
    let mut u = vec![0.0; d];
    let mut z = vec![0.0; d];
    let mut lifted = Vec::with_capacity(params.t + 1);
    for t in 0..=params.t {
        lifted.push(z.clone());
        if t == params.t {
            break;
        }
        let (h, _) = coefficient_sum(&z, train.features(), train.features(), d, train.labels(), params.eta, None, exec);
        u.iter_mut().zip(&h).for_each(|(ui, hi)| *ui -= params.mu * hi * 0.5 / n);
        z = mat_vec(&gram, d, &u);
        let sq = dot(&u, &z);
        if sq > 1.0 {
            let s = 1.0 / sq.sqrt();
            u.iter_mut().for_each(|v| *v *= s);
            z.iter_mut().for_each(|v| *v *= s);
        }
    }
    lifted
}

/// Fraction of rows with `|w*·x − (Aw*)·(Ax)| ≥ γ/2`, via `(Aw*)·(Ax) = (AᵀAw*)·x`.
pub fn margin_preservation_fraction(a: &JlMatrix, w_star: &UnitVector, points: &Dataset, gamma: f64) -> Result<f64> {
    if points.is_empty() {
        return Err(Error::Empty("point set"));
    }
    check_dims(a.d(), points.dim())?;
    let q = a.apply_transpose(&a.apply(w_star.as_slice())?)?;
    let bad = points
        .rows()
        .filter(|(x, _)| (dot(w_star.as_slice(), x) - dot(&q, x)).abs() >= gamma / 2.0)
        .count();
    Ok(bad as f64 / points.len() as f64)
}

/// `|‖Ax‖² − 1|`.
pub fn squared_norm_distortion(a: &JlMatrix, x: &UnitVector) -> Result<f64> {
    let y = a.apply(x.as_slice())?;
    Ok((dot(&y, &y) - 1.0).abs())
}
