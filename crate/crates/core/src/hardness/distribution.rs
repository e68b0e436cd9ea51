//! The noisy hard distributions `D_v` on `{±1}^d × {0, 1}`: `x` uniform and
//! `y = f_v(x)` with probability `1−η`, flipped otherwise. `A_v` and `B_v` are
//! the conditionals given `y = 1` and `y = 0`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;

use super::binomial::{pow2, to_f64};
use super::check_enumeration;
use super::ltf::{HypercubePoint, ThresholdLtf};
use crate::dataset::{CubeDataset, Dataset, Provenance};
use crate::error::{out_of_range, Result};
use crate::model::SignLabel;
use crate::rng::stream_rng;

#[derive(Debug, Clone, PartialEq)]
pub struct HardDistribution {
    pub ltf: ThresholdLtf,
    pub eta: BigRational,
    /// `E[f_v]`, exact.
    pub eps_actual: BigRational,
}

/// `η = 1/3`.
pub fn default_eta() -> BigRational {
    BigRational::new(BigInt::one(), BigInt::from(3))
}

impl HardDistribution {
    /// `η ∈ [0, 1/2)`; zero gives noiseless labels.
    pub fn new(ltf: ThresholdLtf, eta: BigRational) -> Result<Self> {
        let half = BigRational::new(BigInt::one(), BigInt::from(2));
        if eta < BigRational::zero() || eta >= half {
            return Err(out_of_range("eta", super::binomial::rational_string(&eta), "[0, 1/2)"));
        }
        let eps_actual = ltf.mass();
        Ok(HardDistribution { ltf, eta, eps_actual })
    }

    pub fn dim(&self) -> usize {
        self.ltf.dim()
    }

    /// `1 − 2η`.
    pub fn contrast(&self) -> BigRational {
        BigRational::one() - &self.eta * BigInt::from(2)
    }

    /// `Pr[y = 1] = η + (1−2η)·E[f_v]`.
    pub fn positive_rate(&self) -> BigRational {
        &self.eta + self.contrast() * &self.eps_actual
    }

    /// `D_v(x, y)` given `f = f_v(x)`, before the uniform factor `2^{−d}`.
    pub(crate) fn label_weight(&self, f: bool, y: u8) -> BigRational {
        let pos = if f { BigRational::one() - &self.eta } else { self.eta.clone() };
        if y == 1 {
            pos
        } else {
            BigRational::one() - pos
        }
    }
}

/// `A_v(x) = (η + (1−2η)f_v(x))/(η + (1−2η)E[f_v])·2^{−d}` for `label = 1`, and
/// `B_v(x) = (1−η − (1−2η)f_v(x))/(1−η − (1−2η)E[f_v])·2^{−d}` for `label = 0`.
pub fn pmf_conditional(dist: &HardDistribution, x: &HypercubePoint, label: u8) -> Result<BigRational> {
    if label > 1 {
        return Err(out_of_range("label", label, "{0, 1}"));
    }
    let f = super::ltf::ltf_eval(&dist.ltf, x)? == 1;
    let c = dist.contrast();
    let fv = if f { BigRational::one() } else { BigRational::zero() };
    let (num, den) = if label == 1 {
        (&dist.eta + &c * fv, &dist.eta + &c * &dist.eps_actual)
    } else {
        let q = BigRational::one() - &dist.eta;
        (&q - &c * fv, &q - &c * &dist.eps_actual)
    };
    if den.is_zero() {
        return Ok(BigRational::zero());
    }
    Ok(num / den / BigRational::from_integer(pow2(dist.dim())))
}

/// The conditional pmf as joint mass over the summed label marginal, by enumeration.
pub fn pmf_conditional_enumerated(dist: &HardDistribution, x: &HypercubePoint, label: u8) -> Result<BigRational> {
    if label > 1 {
        return Err(out_of_range("label", label, "{0, 1}"));
    }
    let d = dist.dim();
    check_enumeration(d)?;
    let v = dist.ltf.v.neg_mask().expect("d ≤ 24");
    let u = BigRational::from_integer(pow2(d));
    let joint = |f: bool| dist.label_weight(f, label) / &u;
    let mut marginal = BigRational::zero();
    let (w1, w0) = (joint(true), joint(false));
    for z in 0u64..1 << d {
        let f = d - (z ^ v).count_ones() as usize >= dist.ltf.s_star;
        marginal += if f { &w1 } else { &w0 };
    }
    if marginal.is_zero() {
        return Ok(BigRational::zero());
    }
    let f = super::ltf::ltf_eval(&dist.ltf, x)? == 1;
    Ok(joint(f) / marginal)
}

const HARD_STREAM: u64 = 5;

/// `n` draws from `D_v` on the cube.
pub fn sample_hard_cube(dist: &HardDistribution, n: usize, seed: u64) -> CubeDataset {
    let d = dist.dim();
    let eta = to_f64(&dist.eta);
    let mut rng = stream_rng(seed, HARD_STREAM);
    let mut out = CubeDataset::new(d);
    let mut x = vec![0i8; d];
    for _ in 0..n {
        x.iter_mut().for_each(|c| *c = if rng.random::<bool>() { 1 } else { -1 });
        let agree = x.iter().zip(dist.ltf.v.coords()).filter(|(a, b)| a == b).count();
        let f = u8::from(agree >= dist.ltf.s_star);
        let y = if rng.random::<f64>() < eta { 1 - f } else { f };
        out.push(&x, y).expect("valid cube row");
    }
    out
}

/// [`sample_hard_cube`] mapped to the sphere: `x ↦ x/√d`, `y ↦ 2y − 1`.
pub fn hard_to_learner_dataset(dist: &HardDistribution, n: usize, seed: u64) -> Dataset {
    let cube = sample_hard_cube(dist, n, seed);
    let d = dist.dim();
    let s = 1.0 / (d as f64).sqrt();
    let mut ds = Dataset::with_capacity(d, n);
    let mut row = vec![0.0; d];
    for (x, y) in cube.rows() {
        row.iter_mut().zip(x).for_each(|(r, c)| *r = f64::from(*c) * s);
        ds.push_row(&row, if y == 1 { SignLabel::Positive } else { SignLabel::Negative });
    }
    ds.provenance = Provenance::HardInstance {
        d,
        s_star: dist.ltf.s_star,
        seed,
    };
    ds
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hardness::binomial::rational;
    use crate::model::norm;

    fn dist(v: Vec<i8>, s: usize, eta: BigRational) -> HardDistribution {
        HardDistribution::new(ThresholdLtf::new(HypercubePoint::new(v).unwrap(), s).unwrap(), eta).unwrap()
    }

    #[test]
    fn pmf_examples() {
        // d = 2, s* = 2: E[f_v] = 1/4.
        let dv = dist(vec![1, -1], 2, default_eta());
        assert_eq!(dv.eps_actual, rational(1, 4));
        let x = HypercubePoint::new(vec![1, -1]).unwrap();
        assert_eq!(pmf_conditional(&dv, &x, 1).unwrap(), rational(8, 5) / rational(4, 1));
        assert_eq!(pmf_conditional(&dv, &x, 0).unwrap(), rational(4, 7) / rational(4, 1));
        assert!(pmf_conditional(&dv, &x, 2).is_err());
    }

    #[test]
    fn pmf_sums_to_one_and_matches_enumeration() {
        for s in 0..=5 {
            let dv = dist(vec![1, -1, -1, 1], s, default_eta());
            for label in 0..=1 {
                let mut total = BigRational::zero();
                for m in 0..16 {
                    let x = HypercubePoint::from_neg_mask(4, m);
                    let p = pmf_conditional(&dv, &x, label).unwrap();
                    assert_eq!(p, pmf_conditional_enumerated(&dv, &x, label).unwrap());
                    total += p;
                }
                assert_eq!(total, BigRational::one(), "s*={s} y={label}");
            }
        }
    }

    #[test]
    fn eta_range() {
        let ltf = ThresholdLtf::new(HypercubePoint::new(vec![1]).unwrap(), 1).unwrap();
        assert!(HardDistribution::new(ltf.clone(), rational(1, 2)).is_err());
        assert!(HardDistribution::new(ltf.clone(), rational(-1, 5)).is_err());
        assert!(HardDistribution::new(ltf, rational(0, 1)).is_ok());
    }

    #[test]
    fn learner_dataset_properties() {
        let v = HypercubePoint::from_neg_mask(9, 0b1_0110_0101);
        let clean = dist(v.coords().to_vec(), 6, rational(0, 1));
        let ds = hard_to_learner_dataset(&clean, 2000, 3);
        for (x, y) in ds.rows() {
            assert!((norm(x) - 1.0).abs() < 1e-12);
            let cube = HypercubePoint::new(x.iter().map(|c| if *c > 0.0 { 1 } else { -1 }).collect()).unwrap();
            let f = super::super::ltf::ltf_eval(&clean.ltf, &cube).unwrap();
            assert_eq!(y == SignLabel::Positive, f == 1);
        }

        let noisy = dist(v.coords().to_vec(), 6, rational(3, 10));
        let n = 100_000;
        let cube = sample_hard_cube(&noisy, n, 4);
        let flips = cube
            .rows()
            .filter(|(x, y)| {
                let p = HypercubePoint::new(x.to_vec()).unwrap();
                super::super::ltf::ltf_eval(&noisy.ltf, &p).unwrap() != *y
            })
            .count();
        let rate = flips as f64 / n as f64;
        assert!((rate - 0.3).abs() < 3.0 * (0.21f64 / n as f64).sqrt(), "{rate}");
    }
}
