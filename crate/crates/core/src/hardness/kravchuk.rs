//! Normalized Kravchuk polynomials `K(n, a, b) = E[(−1)^{|A∩B|}]` over uniform
//! subsets `|A| = a`, `|B| = b` of `[n]`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::binomial::{binomial_row, to_f64};
use crate::error::{out_of_range, Result};

/// Largest `n` accepted by the subset-pair oracle.
pub const SUBSET_ORACLE_MAX_N: usize = 16;

/// `Σ_j (−1)^j C(a,j)·C(n−a, b−j)`, i.e. `C(n, b)·K(n, a, b)`.
fn numerator(rows: &[Vec<BigInt>], n: usize, a: usize, b: usize) -> BigInt {
    let mut acc = BigInt::zero();
    for j in 0..=a.min(b) {
        if b - j > n - a {
            continue;
        }
        let term = &rows[a][j] * &rows[n - a][b - j];
        if j % 2 == 0 {
            acc += term;
        } else {
            acc -= term;
        }
    }
    acc
}

fn pascal(n: usize) -> Vec<Vec<BigInt>> {
    (0..=n).map(binomial_row).collect()
}

fn check_args(n: usize, a: usize, b: usize) -> Result<()> {
    if a > n {
        return Err(out_of_range("a", a, "[0, n]"));
    }
    if b > n {
        return Err(out_of_range("b", b, "[0, n]"));
    }
    Ok(())
}

/// `K(n, a, b) = Σ_j (−1)^j C(a,j)·C(n−a, b−j) / C(n, b)`, exactly.
pub fn kravchuk(n: usize, a: usize, b: usize) -> Result<BigRational> {
    check_args(n, a, b)?;
    let rows = pascal(n);
    Ok(BigRational::new(numerator(&rows, n, a, b), rows[n][b].clone()))
}

/// [`kravchuk`] with the sign flipped whenever `a` and `b` are both odd. Exists
/// only so the verification suite can demonstrate that it catches sign bugs.
#[doc(hidden)]
pub fn kravchuk_sign_fault(n: usize, a: usize, b: usize) -> Result<BigRational> {
    let k = kravchuk(n, a, b)?;
    Ok(if a % 2 == 1 && b % 2 == 1 { -k } else { k })
}

/// The defining average over all subset pairs, by enumeration.
pub fn kravchuk_by_subsets(n: usize, a: usize, b: usize) -> Result<BigRational> {
    check_args(n, a, b)?;
    if n > SUBSET_ORACLE_MAX_N {
        return Err(out_of_range("n", n, "[0, 16] for the subset oracle"));
    }
    let masks = |size: usize| -> Vec<u32> { (0u32..1 << n).filter(|m| m.count_ones() as usize == size).collect() };
    let (sa, sb) = (masks(a), masks(b));
    let mut total: i64 = 0;
    for x in &sa {
        for y in &sb {
            total += if (x & y).count_ones() % 2 == 0 { 1 } else { -1 };
        }
    }
    Ok(BigRational::new(
        BigInt::from(total),
        BigInt::from(sa.len() as u64 * sb.len() as u64),
    ))
}

/// All `K(n, a, b)` for `0 ≤ a, b ≤ n`.
#[derive(Debug, Clone, PartialEq)]
pub struct KravchukTable {
    n: usize,
    values: Vec<BigRational>,
}

impl KravchukTable {
    pub fn new(n: usize) -> Self {
        let rows = pascal(n);
        let mut values = Vec::with_capacity((n + 1) * (n + 1));
        for a in 0..=n {
            for b in 0..=n {
                values.push(BigRational::new(numerator(&rows, n, a, b), rows[n][b].clone()));
            }
        }
        KravchukTable { n, values }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, a: usize, b: usize) -> &BigRational {
        &self.values[a * (self.n + 1) + b]
    }

    /// First `(a, b)` violating symmetry, reflection or `|K| ≤ 1`.
    pub fn invariant_violation(&self) -> Option<(usize, usize, &'static str)> {
        let n = self.n;
        let one = BigRational::one();
        for a in 0..=n {
            for b in 0..=n {
                let k = self.get(a, b);
                if k != self.get(b, a) {
                    return Some((a, b, "symmetry"));
                }
                if k.abs() != self.get(a, n - b).abs() {
                    return Some((a, b, "reflection"));
                }
                if k.abs() > one {
                    return Some((a, b, "magnitude"));
                }
            }
        }
        None
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KravchukBoundCheck {
    pub value: f64,
    pub bound: f64,
    pub holds: bool,
}

/// `|K(d,m,k)|` against `e^k·2^{3k}·((k/d)^{k/2} + (|d/2−m|/d)^k)` for `k ≤ d/2`,
/// with `0⁰ = 1` in both addends.
pub fn kravchuk_bound_check(d: usize, m: usize, k: usize) -> Result<KravchukBoundCheck> {
    if m > d {
        return Err(out_of_range("m", m, "[0, d]"));
    }
    if 2 * k > d {
        return Err(out_of_range("k", k, "[0, d/2]"));
    }
    let value = to_f64(&kravchuk(d, m, k)?.abs());
    let (df, kf) = (d as f64, k as f64);
    let tilt = (df / 2.0 - m as f64).abs() / df;
    let bound = kf.exp() * 2f64.powf(3.0 * kf) * ((kf / df).powf(kf / 2.0) + tilt.powf(kf));
    Ok(KravchukBoundCheck {
        value,
        bound,
        holds: value <= bound,
    })
}
