//! Synthetic margin-halfspace data with random classification noise.
//!
//! The marginal is uniform on the sphere conditioned on `|w*·x| ≥ γ`. When the
//! cap is wide, points come from plain rejection sampling. When its measure
//! drops below [`REJECTION_MIN_ACCEPTANCE`], the sampler draws `t = w*·x` from
//! its exact conditional law (density ∝ `(1−t²)^{(d−3)/2}` on `γ ≤ |t| ≤ 1`)
//! and completes `x` with a uniform direction orthogonal to `w*`. Either way the
//! output has the same distribution.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::dataset::{Dataset, Provenance};
use crate::error::{out_of_range, Error, Result};
use crate::model::{check_noise_rate, dot, norm, MarginHalfspaceInstance, SignLabel, UnitVector};
use crate::rng::{stream_rng, StreamRng};

/// Consecutive rejections after which [`sample_margin_point`] gives up.
pub const REJECTION_BUDGET: u64 = 1_000_000;

/// Below this cap measure the sampler switches to the conditional route.
pub const REJECTION_MIN_ACCEPTANCE: f64 = 1e-2;

/// Stream reserved for drawing `w*`, so it depends only on `(seed, d)`.
const W_STAR_STREAM: u64 = u64::MAX;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WStarMode {
    #[default]
    FirstAxis,
    RandomUnit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulatorConfig {
    pub d: usize,
    pub gamma: f64,
    pub eta: f64,
    pub n: usize,
    pub seed: u64,
    #[serde(default)]
    pub w_star_mode: WStarMode,
    /// Stream index of the example draws; trials sharing a seed use distinct streams.
    #[serde(default)]
    pub stream: u64,
}

impl SimulatorConfig {
    pub fn new(d: usize, gamma: f64, eta: f64, n: usize, seed: u64) -> Self {
        SimulatorConfig {
            d,
            gamma,
            eta,
            n,
            seed,
            w_star_mode: WStarMode::FirstAxis,
            stream: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.d == 0 {
            return Err(out_of_range("d", self.d, "[1, ∞)"));
        }
        if !(self.gamma > 0.0 && self.gamma < 1.0) {
            return Err(out_of_range("gamma", self.gamma, "(0, 1)"));
        }
        check_noise_rate(self.eta)
    }

    /// The ground truth this config generates from.
    pub fn instance(&self) -> Result<MarginHalfspaceInstance> {
        self.validate()?;
        let w_star = match self.w_star_mode {
            WStarMode::FirstAxis => UnitVector::axis(self.d, 0)?,
            WStarMode::RandomUnit => random_unit(self.d, &mut stream_rng(self.seed, W_STAR_STREAM)),
        };
        MarginHalfspaceInstance::new(w_star, self.gamma, self.eta)
    }
}

/// Uniform point on `S^{d−1}`.
pub fn random_unit(d: usize, rng: &mut StreamRng) -> UnitVector {
    loop {
        let g: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
        if let Ok(u) = UnitVector::normalize(g) {
            return u;
        }
    }
}

/// Uniform measure of `{x ∈ S^{d−1} : |w·x| ≥ γ}`.
pub fn cap_measure(d: usize, gamma: f64) -> f64 {
    if d == 1 {
        return 1.0;
    }
    // t² ~ Beta(1/2, (d−1)/2), so P(t² ≥ γ²) = I_{1−γ²}((d−1)/2, 1/2).
    statrs::function::beta::beta_reg((d as f64 - 1.0) / 2.0, 0.5, 1.0 - gamma * gamma)
}

/// One draw by rejection, with the number of candidates it took.
pub fn sample_margin_point_counted(instance: &MarginHalfspaceInstance, rng: &mut StreamRng) -> Result<(UnitVector, u64)> {
    let w = instance.w_star.as_slice();
    for attempt in 1..=REJECTION_BUDGET {
        let x = random_unit(w.len(), rng);
        if dot(w, x.as_slice()).abs() >= instance.gamma {
            return Ok((x, attempt));
        }
    }
    Err(Error::RejectionBudget {
        attempts: REJECTION_BUDGET,
    })
}

/// Uniform point on the sphere conditioned on `|w*·x| ≥ γ`, by rejection.
pub fn sample_margin_point(instance: &MarginHalfspaceInstance, rng: &mut StreamRng) -> Result<UnitVector> {
    sample_margin_point_counted(instance, rng).map(|(x, _)| x)
}

/// `clean` with probability `1−η`, flipped otherwise; one uniform draw.
pub fn apply_rcn(clean: SignLabel, eta: f64, rng: &mut StreamRng) -> SignLabel {
    if rng.random::<f64>() < eta {
        clean.flipped()
    } else {
        clean
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Route {
    Rejection,
    /// `|t|` law on `[γ, 1]`, keyed by dimension.
    Conditional,
}

/// Margin-point sampler that picks the cheaper of the two exact routes.
#[derive(Debug, Clone)]
pub struct MarginSampler {
    instance: MarginHalfspaceInstance,
    route: Route,
    /// Exponent `k = (d−3)/2` and envelope rate for `d ≥ 4`.
    k: f64,
    lambda: f64,
}

impl MarginSampler {
    pub fn new(instance: &MarginHalfspaceInstance) -> Self {
        let d = instance.dim();
        let g = instance.gamma;
        let route = if cap_measure(d, g) >= REJECTION_MIN_ACCEPTANCE {
            Route::Rejection
        } else {
            Route::Conditional
        };
        let k = (d as f64 - 3.0) / 2.0;
        MarginSampler {
            instance: instance.clone(),
            route,
            k,
            lambda: 2.0 * k * g / (1.0 - g * g),
        }
    }

    pub fn uses_rejection(&self) -> bool {
        self.route == Route::Rejection
    }

    pub fn sample(&self, rng: &mut StreamRng) -> Result<UnitVector> {
        match self.route {
            Route::Rejection => sample_margin_point(&self.instance, rng),
            Route::Conditional => Ok(self.sample_conditional(rng)),
        }
    }

    fn sample_abs_t(&self, rng: &mut StreamRng) -> f64 {
        let g = self.instance.gamma;
        match self.instance.dim() {
            2 => (rng.random::<f64>() * g.acos()).cos(),
            3 => g + (1.0 - g) * rng.random::<f64>(),
            _ => loop {
                // ln(1−t²) is concave, so its tangent at γ gives an exponential envelope.
                let u: f64 = rng.random();
                let t = if self.lambda > 0.0 {
                    g - (u * (-self.lambda * (1.0 - g)).exp_m1()).ln_1p() / self.lambda
                } else {
                    g + (1.0 - g) * u
                };
                if t >= 1.0 {
                    continue;
                }
                let log_accept =
                    self.k * ((1.0 - t * t).ln() - (1.0 - g * g).ln()) + self.lambda * (t - g);
                if rng.random::<f64>().ln() < log_accept {
                    break t;
                }
            },
        }
    }

    fn sample_conditional(&self, rng: &mut StreamRng) -> UnitVector {
        let w = self.instance.w_star.as_slice();
        let d = w.len();
        loop {
            let t = self.sample_abs_t(rng);
            let t = if rng.random::<bool>() { t } else { -t };
            let mut u: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
            let along = dot(&u, w);
            u.iter_mut().zip(w).for_each(|(ui, wi)| *ui -= along * wi);
            let nu = norm(&u);
            if nu == 0.0 {
                continue;
            }
            let s = (1.0 - t * t).max(0.0).sqrt() / nu;
            let x: Vec<f64> = u.iter().zip(w).map(|(ui, wi)| t * wi + s * ui).collect();
            let Ok(x) = UnitVector::normalize(x) else { continue };
            if dot(w, x.as_slice()).abs() >= self.instance.gamma {
                return x;
            }
        }
    }
}

/// Endless i.i.d. source of labeled examples for one instance and stream.
#[derive(Debug, Clone)]
pub struct ExampleStream {
    sampler: MarginSampler,
    rng: StreamRng,
}

impl ExampleStream {
    pub fn new(instance: &MarginHalfspaceInstance, seed: u64, stream: u64) -> Self {
        ExampleStream {
            sampler: MarginSampler::new(instance),
            rng: stream_rng(seed, stream),
        }
    }

    pub fn instance(&self) -> &MarginHalfspaceInstance {
        &self.sampler.instance
    }

    pub fn next_example(&mut self) -> Result<(UnitVector, SignLabel)> {
        let x = self.sampler.sample(&mut self.rng)?;
        let inst = &self.sampler.instance;
        let clean = SignLabel::of(dot(inst.w_star.as_slice(), x.as_slice()));
        Ok((x, apply_rcn(clean, inst.eta, &mut self.rng)))
    }

    /// The next `n` examples as a dataset.
    pub fn take(&mut self, n: usize) -> Result<Dataset> {
        let mut ds = Dataset::with_capacity(self.sampler.instance.dim(), n);
        for _ in 0..n {
            let (x, y) = self.next_example()?;
            ds.push_row(x.as_slice(), y);
        }
        Ok(ds)
    }
}

/// `n` examples from the instance described by `config`; a pure function of it.
pub fn generate_dataset(config: &SimulatorConfig) -> Result<(Dataset, MarginHalfspaceInstance)> {
    let instance = config.instance()?;
    let mut ds = ExampleStream::new(&instance, config.seed, config.stream).take(config.n)?;
    ds.provenance = Provenance::Simulated(config.clone());
    Ok((ds, instance))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::write_sphere;

    fn instance(d: usize, gamma: f64, eta: f64) -> MarginHalfspaceInstance {
        MarginHalfspaceInstance::new(UnitVector::axis(d, 0).unwrap(), gamma, eta).unwrap()
    }

    #[test]
    fn one_dimensional_points_are_signs() {
        let inst = instance(1, 0.5, 0.1);
        let mut rng = stream_rng(1, 0);
        for _ in 0..100 {
            let x = sample_margin_point(&inst, &mut rng).unwrap();
            assert!(x.as_slice() == [1.0] || x.as_slice() == [-1.0]);
        }
    }

    #[test]
    fn acceptance_rate_matches_cap_measure() {
        let inst = instance(3, 0.2, 0.1);
        let mut rng = stream_rng(2, 0);
        let mut attempts = 0u64;
        let draws = 10_000;
        for _ in 0..draws {
            let (x, a) = sample_margin_point_counted(&inst, &mut rng).unwrap();
            assert!(x.as_slice()[0].abs() >= 0.2);
            attempts += a;
        }
        // On S², w·x is uniform on [−1, 1], so the cap has measure 0.8.
        let p = cap_measure(3, 0.2);
        assert!((p - 0.8).abs() < 1e-12, "{p}");
        let rate = draws as f64 / attempts as f64;
        let se = (p * (1.0 - p) / attempts as f64).sqrt();
        assert!((rate - p).abs() < 3.0 * se, "rate {rate} vs {p}");
    }

    #[test]
    fn rejection_budget_is_reported() {
        let inst = instance(60, 0.9, 0.1);
        let mut rng = stream_rng(0, 0);
        assert!(matches!(
            sample_margin_point(&inst, &mut rng),
            Err(Error::RejectionBudget { attempts: REJECTION_BUDGET })
        ));
    }

    #[test]
    fn flip_rate_and_independence() {
        let mut rng = stream_rng(3, 0);
        let n = 100_000;
        let flips = (0..n)
            .filter(|_| apply_rcn(SignLabel::Positive, 0.3, &mut rng) == SignLabel::Negative)
            .count();
        assert!((flips as f64 / n as f64 - 0.3).abs() < 0.005);
        assert_eq!(apply_rcn(SignLabel::Negative, 0.0, &mut rng), SignLabel::Negative);

        let mut cfg = SimulatorConfig::new(5, 0.1, 0.3, n, 4);
        cfg.w_star_mode = WStarMode::RandomUnit;
        let (ds, inst) = generate_dataset(&cfg).unwrap();
        let (mut a, mut b): (Vec<f64>, Vec<f64>) = (Vec::new(), Vec::new());
        for (x, y) in ds.rows() {
            let m = dot(inst.w_star.as_slice(), x);
            a.push(m);
            b.push(f64::from(u8::from(SignLabel::of(m) != y)));
        }
        let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
        let (ma, mb) = (mean(&a), mean(&b));
        let cov: f64 = a.iter().zip(&b).map(|(x, y)| (x - ma) * (y - mb)).sum();
        let va: f64 = a.iter().map(|x| (x - ma).powi(2)).sum();
        let vb: f64 = b.iter().map(|y| (y - mb).powi(2)).sum();
        assert!((cov / (va * vb).sqrt()).abs() < 0.01);
    }

    #[test]
    fn dataset_properties() {
        let (empty, _) = generate_dataset(&SimulatorConfig::new(4, 0.2, 0.2, 0, 1)).unwrap();
        assert!(empty.is_empty());

        let cfg = SimulatorConfig::new(6, 0.2, 0.2, 100_000, 9);
        let (ds, inst) = generate_dataset(&cfg).unwrap();
        let mut noisy = 0usize;
        for (x, y) in ds.rows() {
            let m = dot(inst.w_star.as_slice(), x);
            assert!(m.abs() >= 0.2);
            noisy += usize::from(SignLabel::of(m) != y);
        }
        assert!((noisy as f64 / 1e5 - 0.2).abs() < 0.004, "{noisy}");

        let small = SimulatorConfig::new(6, 0.2, 0.2, 50, 9);
        let bytes = |c: &SimulatorConfig| {
            let mut out = Vec::new();
            write_sphere(&generate_dataset(c).unwrap().0, &mut out).unwrap();
            out
        };
        assert_eq!(bytes(&small), bytes(&small));
        let mut other = small.clone();
        other.stream = 1;
        assert_ne!(bytes(&small), bytes(&other));
    }

    #[test]
    fn random_w_star_depends_only_on_seed() {
        let mut cfg = SimulatorConfig::new(8, 0.1, 0.1, 3, 11);
        cfg.w_star_mode = WStarMode::RandomUnit;
        let a = cfg.instance().unwrap();
        cfg.stream = 5;
        assert_eq!(a, cfg.instance().unwrap());
        assert!((norm(a.w_star.as_slice()) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn invalid_configs_are_rejected() {
        assert!(SimulatorConfig::new(0, 0.2, 0.1, 1, 0).validate().is_err());
        assert!(SimulatorConfig::new(3, 1.0, 0.1, 1, 0).validate().is_err());
        assert!(SimulatorConfig::new(3, 0.2, 0.5, 1, 0).validate().is_err());
    }

    /// Compare the conditional route with the exact law of `|t|` through its
    /// mean, `E|t| = ∫_γ^1 t(1−t²)^k dt / ∫_γ^1 (1−t²)^k dt`, by quadrature.
    #[test]
    fn conditional_route_matches_exact_marginal() {
        for &(d, gamma) in &[(2usize, 0.9), (3, 0.5), (4, 0.8), (30, 0.6), (500, 0.25)] {
            let inst = instance(d, gamma, 0.0);
            let mut s = MarginSampler::new(&inst);
            s.route = Route::Conditional;
            let k = (d as f64 - 3.0) / 2.0;
            let steps = 200_000;
            let (mut num, mut den) = (0.0, 0.0);
            for i in 0..steps {
                let t = gamma + (1.0 - gamma) * (i as f64 + 0.5) / steps as f64;
                let w = (1.0 - t * t).powf(k);
                num += t * w;
                den += w;
            }
            let exact = num / den;
            let mut rng = stream_rng(d as u64, 0);
            let n = 20_000;
            let draws: Vec<f64> = (0..n).map(|_| s.sample(&mut rng).unwrap().as_slice()[0]).collect();
            let abs: Vec<f64> = draws.iter().map(|t| t.abs()).collect();
            let mean = abs.iter().sum::<f64>() / n as f64;
            let var = abs.iter().map(|t| (t - mean).powi(2)).sum::<f64>() / n as f64;
            assert!((mean - exact).abs() < 4.0 * (var / n as f64).sqrt() + 1e-9, "d={d}: {mean} vs {exact}");
            assert!(abs.iter().all(|&t| t >= gamma));
            let positive = draws.iter().filter(|&&t| t > 0.0).count() as f64 / n as f64;
            assert!((positive - 0.5).abs() < 0.015);
        }
    }

    #[test]
    fn conditional_points_are_isotropic_off_axis() {
        let inst = instance(50, 0.7, 0.0);
        let s = MarginSampler::new(&inst);
        assert!(!s.uses_rejection());
        let mut rng = stream_rng(5, 0);
        let n = 20_000;
        let mut second = 0.0;
        for _ in 0..n {
            let x = s.sample(&mut rng).unwrap();
            assert!((norm(x.as_slice()) - 1.0).abs() < 1e-12);
            second += x.as_slice()[1].powi(2);
        }
        // The off-axis mass 1 − t² is spread evenly over d − 1 coordinates.
        let expected_t2: f64 = {
            let mut rng = stream_rng(6, 0);
            (0..n).map(|_| s.sample(&mut rng).unwrap().as_slice()[0].powi(2)).sum::<f64>() / n as f64
        };
        let target = (1.0 - expected_t2) / 49.0;
        assert!((second / n as f64 - target).abs() < 0.1 * target);
    }
}
