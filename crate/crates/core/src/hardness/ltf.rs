//! Hypercube points and agreement-threshold functions `f_v(x) = 1{#{i : x_i = v_i} ≥ s*}`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::binomial::{binomial_row, pow2};
use crate::error::{out_of_range, Error, Result};

/// A point of `{±1}^d`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<i8>", into = "Vec<i8>")]
pub struct HypercubePoint(Vec<i8>);

impl TryFrom<Vec<i8>> for HypercubePoint {
    type Error = Error;

    fn try_from(v: Vec<i8>) -> Result<Self> {
        HypercubePoint::new(v)
    }
}

impl From<HypercubePoint> for Vec<i8> {
    fn from(p: HypercubePoint) -> Self {
        p.0
    }
}

impl HypercubePoint {
    pub fn new(coords: Vec<i8>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::Empty("hypercube point"));
        }
        if let Some(c) = coords.iter().find(|c| c.abs() != 1) {
            return Err(out_of_range("hypercube coordinate", c, "{-1, +1}"));
        }
        Ok(HypercubePoint(coords))
    }

    /// Bit `i` set iff coordinate `i` is −1.
    pub fn from_neg_mask(d: usize, mask: u64) -> Self {
        HypercubePoint((0..d).map(|i| if mask >> i & 1 == 1 { -1 } else { 1 }).collect())
    }

    pub fn neg_mask(&self) -> Option<u64> {
        (self.0.len() <= 64).then(|| {
            self.0
                .iter()
                .enumerate()
                .filter(|(_, c)| **c < 0)
                .fold(0u64, |m, (i, _)| m | 1 << i)
        })
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[i8] {
        &self.0
    }

    pub fn dot(&self, other: &HypercubePoint) -> Result<i64> {
        crate::model::check_dims(self.dim(), other.dim())?;
        Ok(self.0.iter().zip(&other.0).map(|(a, b)| i64::from(a * b)).sum())
    }

    /// `#{i : x_i = y_i}`.
    pub fn agreement(&self, other: &HypercubePoint) -> Result<usize> {
        crate::model::check_dims(self.dim(), other.dim())?;
        Ok(self.0.iter().zip(&other.0).filter(|(a, b)| a == b).count())
    }
}

/// `f_v(x) = 1` iff `x` agrees with `v` in at least `s_star` coordinates,
/// equivalently `v·x ≥ 2·s_star − d`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThresholdLtf {
    pub v: HypercubePoint,
    pub s_star: usize,
}

impl ThresholdLtf {
    pub fn new(v: HypercubePoint, s_star: usize) -> Result<Self> {
        if s_star > v.dim() + 1 {
            return Err(out_of_range("s_star", s_star, "[0, d+1]"));
        }
        Ok(ThresholdLtf { v, s_star })
    }

    pub fn dim(&self) -> usize {
        self.v.dim()
    }

    /// `E[f_v] = 2^{−d}·Σ_{s ≥ s*} C(d, s)`.
    pub fn mass(&self) -> BigRational {
        tail_mass(self.dim(), self.s_star)
    }
}

pub fn ltf_eval(ltf: &ThresholdLtf, x: &HypercubePoint) -> Result<u8> {
    Ok(u8::from(ltf.v.agreement(x)? >= ltf.s_star))
}

/// `2^{−d}·Σ_{s ≥ s*} C(d, s)`; zero for `s* = d+1`.
pub fn tail_mass(d: usize, s_star: usize) -> BigRational {
    let row = binomial_row(d);
    let tail: BigInt = row.iter().skip(s_star).sum();
    BigRational::new(tail, pow2(d))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThresholdChoice {
    pub s_star: usize,
    #[serde(serialize_with = "super::report::ser_rational")]
    pub eps_actual: BigRational,
    /// True when no nonempty tail fits under the target (`s* = d+1`, mass 0).
    pub degenerate: bool,
}

/// Smallest `s*` whose tail mass is at most `target`, compared exactly against
/// the binary value of `target`.
pub fn threshold_for_mass(d: usize, target: f64) -> Result<ThresholdChoice> {
    if !(target > 0.0 && target <= 1.0) {
        return Err(out_of_range("target_mass", target, "(0, 1]"));
    }
    if d == 0 {
        return Err(out_of_range("d", d, "[1, ∞)"));
    }
    let t = BigRational::from_float(target).expect("finite");
    let row = binomial_row(d);
    let denom = pow2(d);
    let mut tail: BigInt = row.iter().sum();
    // Returns by s = d+1 at the latest, where the tail is empty.
    #[allow(clippy::needless_range_loop)]
    for s in 0..=d + 1 {
        let mass = BigRational::new(tail.clone(), denom.clone());
        if mass <= t {
            return Ok(ThresholdChoice {
                s_star: s,
                degenerate: mass.is_zero(),
                eps_actual: mass,
            });
        }
        tail -= &row[s];
    }
    unreachable!("the empty tail has mass 0")
}
