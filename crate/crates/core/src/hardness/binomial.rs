//! Exact binomial coefficients and rational helpers.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{out_of_range, Result};

/// `C(n, k)` exactly.
pub fn binomial(n: u64, k: u64) -> Result<BigUint> {
    if k > n {
        return Err(out_of_range("k", k, "[0, n]"));
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        // Each prefix product is C(n, i+1)·(i+1)!/(i+1)!, so the division is exact.
        acc = acc * (n - i) / (i + 1);
    }
    Ok(acc)
}

/// `C(n, k)` as a signed integer, zero outside `0 ≤ k ≤ n`.
pub fn binomial_or_zero(n: i64, k: i64) -> BigInt {
    if n < 0 || k < 0 || k > n {
        BigInt::zero()
    } else {
        BigInt::from(binomial(n as u64, k as u64).expect("in range"))
    }
}

/// `ln C(n, k)` for arguments beyond the exact path. Approximate.
pub fn ln_binomial(n: u64, k: u64) -> Result<f64> {
    if k > n {
        return Err(out_of_range("k", k, "[0, n]"));
    }
    Ok(statrs::function::factorial::ln_binomial(n, k))
}

/// Row `C(n, 0), …, C(n, n)`.
pub fn binomial_row(n: usize) -> Vec<BigInt> {
    let mut row = Vec::with_capacity(n + 1);
    let mut c = BigInt::one();
    row.push(c.clone());
    for k in 0..n {
        c = c * (n - k) / (k + 1);
        row.push(c.clone());
    }
    row
}

pub fn rational(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn pow2(e: usize) -> BigInt {
    BigInt::one() << e
}

pub fn to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// `"numerator/denominator"`, always with an explicit denominator.
pub fn rational_string(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn abs(r: &BigRational) -> BigRational {
    r.abs()
}

/// Parses `"p/q"`, an integer, or a decimal literal into an exact rational.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().ok()?;
        let q: BigInt = q.trim().parse().ok()?;
        return (!q.is_zero()).then(|| BigRational::new(p, q));
    }
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    if int.is_empty() && frac.is_empty() {
        return None;
    }
    if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits: BigInt = format!("{int}{frac}").parse().ok()?;
    let r = BigRational::new(digits, BigInt::from(10u32).pow(frac.len() as u32));
    Some(if neg { -r } else { r })
}
