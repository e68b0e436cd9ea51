//! Shared domain types and the pointwise primitives of the learner: the sign
//! convention, the leaky-ReLU subgradient field and the disagreement indicator.

use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{out_of_range, Error, Result};
use crate::par::{self, Execution};

/// Relative tolerance used whenever a float is compared against an exact target.
pub const REL_TOL: f64 = 1e-9;

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub(crate) fn check_dims(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}

pub(crate) fn check_finite(v: &[f64], what: &'static str) -> Result<()> {
    if v.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite(what))
    }
}

/// A binary label in {−1, +1}.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SignLabel {
    Negative,
    Positive,
}

impl SignLabel {
    /// Sign of a finite real with the tie `sgn(0) = +1`.
    #[inline]
    pub fn of(t: f64) -> SignLabel {
        if t >= 0.0 {
            SignLabel::Positive
        } else {
            SignLabel::Negative
        }
    }

    #[inline]
    pub fn value(self) -> f64 {
        match self {
            SignLabel::Positive => 1.0,
            SignLabel::Negative => -1.0,
        }
    }

    pub fn flipped(self) -> SignLabel {
        match self {
            SignLabel::Positive => SignLabel::Negative,
            SignLabel::Negative => SignLabel::Positive,
        }
    }

    pub fn from_int(v: i64) -> Option<SignLabel> {
        match v {
            1 => Some(SignLabel::Positive),
            -1 => Some(SignLabel::Negative),
            _ => None,
        }
    }
}

/// `sgn(t)`: +1 iff `t ≥ 0`.
pub fn sign_fn(t: f64) -> Result<SignLabel> {
    if !t.is_finite() {
        return Err(Error::NonFinite("sign argument"));
    }
    Ok(SignLabel::of(t))
}

/// A vector on the unit sphere.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct UnitVector(Vec<f64>);

impl UnitVector {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::Empty("unit vector"));
        }
        check_finite(&coords, "unit vector")?;
        let n = norm(&coords);
        if (n - 1.0).abs() > REL_TOL {
            return Err(Error::NotUnit { norm: n });
        }
        Ok(UnitVector(coords))
    }

    /// Rescales a nonzero finite vector onto the sphere.
    pub fn normalize(mut coords: Vec<f64>) -> Result<Self> {
        check_finite(&coords, "vector")?;
        let n = norm(&coords);
        if n == 0.0 || !n.is_finite() {
            return Err(Error::NonFinite("normalization of a zero vector"));
        }
        coords.iter_mut().for_each(|c| *c /= n);
        Ok(UnitVector(coords))
    }

    /// Standard basis vector `e_axis` in `R^d`.
    pub fn axis(d: usize, axis: usize) -> Result<Self> {
        if axis >= d {
            return Err(out_of_range("axis", axis, "[0, d)"));
        }
        let mut c = vec![0.0; d];
        c[axis] = 1.0;
        Ok(UnitVector(c))
    }

    pub(crate) fn from_vec_unchecked(coords: Vec<f64>) -> Self {
        UnitVector(coords)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl AsRef<[f64]> for UnitVector {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

/// A vector inside the closed unit ball; the learner's iterates live here.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct BallVector(Vec<f64>);

impl BallVector {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        check_finite(&coords, "ball vector")?;
        let n = norm(&coords);
        if n > 1.0 + REL_TOL {
            return Err(out_of_range("ball vector norm", n, "[0, 1]"));
        }
        Ok(BallVector(coords))
    }

    pub fn zeros(d: usize) -> Self {
        BallVector(vec![0.0; d])
    }

    pub(crate) fn from_vec_unchecked(coords: Vec<f64>) -> Self {
        BallVector(coords)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl AsRef<[f64]> for BallVector {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

impl From<UnitVector> for BallVector {
    fn from(u: UnitVector) -> Self {
        BallVector(u.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledExample {
    pub x: UnitVector,
    pub y: SignLabel,
}

/// Ground truth of a margin-halfspace problem with random classification noise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarginHalfspaceInstance {
    pub w_star: UnitVector,
    pub gamma: f64,
    pub eta: f64,
}

impl MarginHalfspaceInstance {
    pub fn new(w_star: UnitVector, gamma: f64, eta: f64) -> Result<Self> {
        if !(gamma > 0.0 && gamma < 1.0) {
            return Err(out_of_range("gamma", gamma, "(0, 1)"));
        }
        check_noise_rate(eta)?;
        Ok(MarginHalfspaceInstance { w_star, gamma, eta })
    }

    pub fn dim(&self) -> usize {
        self.w_star.dim()
    }
}

/// Noise rates are accepted on `[0, 1/2)`; zero is the noiseless limit.
pub(crate) fn check_noise_rate(eta: f64) -> Result<()> {
    if (0.0..0.5).contains(&eta) {
        Ok(())
    } else {
        Err(out_of_range("eta", eta, "[0, 1/2)"))
    }
}

/// Coefficient `(1−2η)·sgn(w·x) − y` multiplying `x/2` in the subgradient.
#[inline]
pub(crate) fn subgradient_coefficient(margin: f64, y: SignLabel, eta: f64) -> f64 {
    (1.0 - 2.0 * eta) * SignLabel::of(margin).value() - y.value()
}

/// `g_η(w; x, y) = ½[(1−2η)·sgn(w·x) − y]·x`.
pub fn leaky_relu_subgradient(w: &[f64], x: &UnitVector, y: SignLabel, eta: f64) -> Result<Vec<f64>> {
    check_dims(w.len(), x.dim())?;
    check_noise_rate(eta)?;
    let c = 0.5 * subgradient_coefficient(dot(w, x.as_slice()), y, eta);
    Ok(x.as_slice().iter().map(|xi| c * xi).collect())
}

/// 1 iff `w` and `w_ref` put `x` on different sides (with the `sgn(0) = +1` tie).
pub fn disagreement_indicator(w: &[f64], w_ref: &[f64], x: &UnitVector) -> Result<u8> {
    check_dims(w.len(), x.dim())?;
    check_dims(w_ref.len(), x.dim())?;
    let a = SignLabel::of(dot(w, x.as_slice()));
    let b = SignLabel::of(dot(w_ref, x.as_slice()));
    Ok(u8::from(a != b))
}

/// Rows per reduction block: a pure function of `n`, so the summation tree never
/// depends on the thread count.
pub(crate) fn row_block(n: usize) -> usize {
    2048usize.max(n.div_ceil(32))
}

/// One sweep over the sample: returns `Σ_i c_i·accum_i` with
/// `c_i = (1−2η)·sgn(w·margin_i) − y_i`, and the number of rows whose sign under
/// `w` differs from `reference[i]`. Margin and accumulation rows may live in
/// different spaces (the dimension-reduced learner uses this).
#[allow(clippy::too_many_arguments)]
pub(crate) fn coefficient_sum(
    w: &[f64],
    margin_rows: &[f64],
    accum_rows: &[f64],
    accum_dim: usize,
    labels: &[SignLabel],
    eta: f64,
    reference: Option<&[SignLabel]>,
    exec: Execution,
) -> (Vec<f64>, usize) {
    let n = labels.len();
    let dm = w.len();
    let partials = par::map_blocks(exec, n, row_block(n), |range| {
        let mut acc = vec![0.0; accum_dim];
        let mut disagree = 0usize;
        for i in range {
            let m = dot(w, &margin_rows[i * dm..(i + 1) * dm]);
            if let Some(r) = reference {
                disagree += usize::from(SignLabel::of(m) != r[i]);
            }
            let c = subgradient_coefficient(m, labels[i], eta);
            if c != 0.0 {
                let x = &accum_rows[i * accum_dim..(i + 1) * accum_dim];
                acc.iter_mut().zip(x).for_each(|(a, xi)| *a += c * xi);
            }
        }
        (acc, disagree)
    });
    let mut total = vec![0.0; accum_dim];
    let mut disagree = 0usize;
    for (acc, dis) in partials {
        total.iter_mut().zip(&acc).for_each(|(t, a)| *t += a);
        disagree += dis;
    }
    (total, disagree)
}

/// `ĝ_N(w)`: the mean of `g_η(w; x, y)` over the sample.
pub fn empirical_subgradient(w: &[f64], data: &Dataset, eta: f64) -> Result<Vec<f64>> {
    empirical_subgradient_with(w, data, eta, Execution::Sequential)
}

pub fn empirical_subgradient_with(w: &[f64], data: &Dataset, eta: f64, exec: Execution) -> Result<Vec<f64>> {
    if data.is_empty() {
        return Err(Error::Empty("example list"));
    }
    check_dims(data.dim(), w.len())?;
    check_noise_rate(eta)?;
    let (mut g, _) = coefficient_sum(w, data.features(), data.features(), data.dim(), data.labels(), eta, None, exec);
    let scale = 0.5 / data.len() as f64;
    g.iter_mut().for_each(|v| *v *= scale);
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn e(d: usize, i: usize) -> UnitVector {
        UnitVector::axis(d, i).unwrap()
    }

    #[test]
    fn sign_convention() {
        assert_eq!(sign_fn(0.0).unwrap(), SignLabel::Positive);
        assert_eq!(sign_fn(-0.0).unwrap(), SignLabel::Positive);
        assert_eq!(sign_fn(-3.2).unwrap(), SignLabel::Negative);
        assert_eq!(sign_fn(7.0).unwrap(), SignLabel::Positive);
        assert!(sign_fn(f64::NAN).is_err());
        assert!(sign_fn(f64::INFINITY).is_err());
    }

    #[test]
    fn subgradient_examples() {
        let w = [1.0, 0.0];
        let g = leaky_relu_subgradient(&w, &e(2, 0), SignLabel::Positive, 1.0 / 3.0).unwrap();
        assert!((g[0] + 1.0 / 3.0).abs() < 1e-15 && g[1] == 0.0);

        let g = leaky_relu_subgradient(&w, &e(2, 0), SignLabel::Negative, 1.0 / 3.0).unwrap();
        assert!((g[0] - 2.0 / 3.0).abs() < 1e-15);
        assert!((norm(&g) - (1.0 - 1.0 / 3.0)).abs() < 1e-15);

        let g = leaky_relu_subgradient(&[-1.0, 0.0], &e(2, 0), SignLabel::Negative, 0.25).unwrap();
        assert!((g[0] - 0.25).abs() < 1e-15);
    }

    #[test]
    fn subgradient_rejects_bad_input() {
        assert!(matches!(
            leaky_relu_subgradient(&[1.0], &e(2, 0), SignLabel::Positive, 0.1),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(leaky_relu_subgradient(&[1.0, 0.0], &e(2, 0), SignLabel::Positive, 0.5).is_err());
    }

    #[test]
    fn disagreement_examples() {
        let x = UnitVector::normalize(vec![1.0, -1.0]).unwrap();
        assert_eq!(disagreement_indicator(&[1.0, 0.0], &[0.0, 1.0], &x).unwrap(), 1);
        assert_eq!(disagreement_indicator(&[0.3, 0.2], &[0.3, 0.2], &x).unwrap(), 0);
        assert_eq!(disagreement_indicator(&[0.3, 0.2], &[-0.3, -0.2], &x).unwrap(), 1);
        assert!(disagreement_indicator(&[1.0], &[1.0, 0.0], &x).is_err());
    }

    #[test]
    fn unit_and_ball_vectors_validate() {
        assert!(UnitVector::new(vec![0.6, 0.8]).is_ok());
        assert!(matches!(UnitVector::new(vec![1.0, 1.0]), Err(Error::NotUnit { .. })));
        assert!(BallVector::new(vec![0.6, 0.8]).is_ok());
        assert!(BallVector::new(vec![3.0, 4.0]).is_err());
        assert!(UnitVector::normalize(vec![0.0, 0.0]).is_err());
    }

    fn dataset(rows: &[(&[f64], SignLabel)]) -> Dataset {
        let mut ds = Dataset::new(rows[0].0.len());
        for (x, y) in rows {
            ds.push(x, *y).unwrap();
        }
        ds
    }

    #[test]
    fn empirical_subgradient_examples() {
        let x = UnitVector::normalize(vec![0.3, -0.4, 0.5]).unwrap();
        let w = [0.1, 0.2, -0.3];
        let single = dataset(&[(x.as_slice(), SignLabel::Negative)]);
        let g = empirical_subgradient(&w, &single, 0.2).unwrap();
        let g1 = leaky_relu_subgradient(&w, &x, SignLabel::Negative, 0.2).unwrap();
        for (a, b) in g.iter().zip(&g1) {
            assert!((a - b).abs() < 1e-15);
        }

        // At w = 0 both signs tie to +1, so x and −x with equal labels cancel.
        let neg: Vec<f64> = x.as_slice().iter().map(|v| -v).collect();
        let w = [0.0; 3];
        let pair = dataset(&[(x.as_slice(), SignLabel::Negative), (&neg, SignLabel::Negative)]);
        let g = empirical_subgradient(&w, &pair, 0.2).unwrap();
        assert!(norm(&g) < 1e-15, "{g:?}");

        // Noiseless labels at the target with eta = 0.
        let w_star = [0.0, 0.0, 1.0];
        let a = UnitVector::normalize(vec![0.2, 0.1, 0.9]).unwrap();
        let b = UnitVector::normalize(vec![0.5, -0.3, -0.4]).unwrap();
        let clean = dataset(&[(a.as_slice(), SignLabel::Positive), (b.as_slice(), SignLabel::Negative)]);
        assert_eq!(empirical_subgradient(&w_star, &clean, 0.0).unwrap(), vec![0.0; 3]);

        assert!(matches!(empirical_subgradient(&w_star, &Dataset::new(3), 0.1), Err(Error::Empty(_))));
    }

    #[test]
    fn empirical_subgradient_is_permutation_invariant() {
        let xs: Vec<UnitVector> = (0..7)
            .map(|i| UnitVector::normalize(vec![(i as f64).sin(), (i as f64 * 1.7).cos(), 0.3]).unwrap())
            .collect();
        let ys: Vec<SignLabel> = (0..7).map(|i| if i % 3 == 0 { SignLabel::Negative } else { SignLabel::Positive }).collect();
        let fwd: Vec<(&[f64], SignLabel)> = xs.iter().zip(&ys).map(|(x, y)| (x.as_slice(), *y)).collect();
        let mut rev = fwd.clone();
        rev.reverse();
        let w = [0.2, -0.1, 0.05];
        let g1 = empirical_subgradient(&w, &dataset(&fwd), 0.3).unwrap();
        let g2 = empirical_subgradient(&w, &dataset(&rev), 0.3).unwrap();
        for (a, b) in g1.iter().zip(&g2) {
            assert!((a - b).abs() < 1e-14);
        }
        let bound = 1.0 - 0.3 + 1e-12;
        assert!(norm(&g1) <= bound);
    }

    fn tuple() -> impl Strategy<Value = (Vec<f64>, Vec<f64>, Vec<f64>, bool, f64)> {
        (1usize..8).prop_flat_map(|d| {
            (
                prop::collection::vec(-2.0f64..2.0, d),
                prop::collection::vec(-2.0f64..2.0, d),
                prop::collection::vec(-1.0f64..1.0, d),
                any::<bool>(),
                0.0f64..0.4999,
            )
        })
    }

    proptest! {
        #[test]
        fn norm_bound((w, _, x, y, eta) in tuple()) {
            prop_assume!(norm(&x) > 1e-6);
            let x = UnitVector::normalize(x).unwrap();
            let y = if y { SignLabel::Positive } else { SignLabel::Negative };
            let g = leaky_relu_subgradient(&w, &x, y, eta).unwrap();
            prop_assert!(norm(&g) <= 1.0 - eta + 1e-12);
        }

        #[test]
        fn key_identity((w, wb, x, y, eta) in tuple()) {
            prop_assume!(norm(&x) > 1e-6);
            let x = UnitVector::normalize(x).unwrap();
            let y = if y { SignLabel::Positive } else { SignLabel::Negative };
            let g1 = leaky_relu_subgradient(&w, &x, y, eta).unwrap();
            let g2 = leaky_relu_subgradient(&wb, &x, y, eta).unwrap();
            let diff: Vec<f64> = w.iter().zip(&wb).map(|(a, b)| a - b).collect();
            let gdiff: Vec<f64> = g1.iter().zip(&g2).map(|(a, b)| a - b).collect();
            let lhs = dot(&gdiff, &diff);
            let (m1, m2) = (dot(&w, x.as_slice()), dot(&wb, x.as_slice()));
            let dis = f64::from(disagreement_indicator(&w, &wb, &x).unwrap());
            let rhs = (1.0 - 2.0 * eta) * dis * (m1.abs() + m2.abs());
            prop_assert!((lhs - rhs).abs() <= 1e-10, "lhs {lhs} rhs {rhs}");
        }

        #[test]
        fn self_disagreement_is_zero(w in prop::collection::vec(-2.0f64..2.0, 3), x in prop::collection::vec(-1.0f64..1.0, 3)) {
            prop_assume!(norm(&x) > 1e-6);
            let x = UnitVector::normalize(x).unwrap();
            prop_assert_eq!(disagreement_indicator(&w, &w, &x).unwrap(), 0);
        }
    }
}
