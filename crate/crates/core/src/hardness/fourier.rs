//! Fourier coefficients `f̂(T) = E[f_v(x)·χ_T(x)]` of threshold functions, by the
//! Kravchuk closed form and by enumeration.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use super::binomial::{binomial_row, pow2};
use super::kravchuk::KravchukTable;
use super::ltf::ThresholdLtf;
use super::{check_enumeration, FOURIER_MAX_D};
use crate::error::{out_of_range, Error, Result};

/// `c_k = 2^{−d}·Σ_{s ≥ s*} C(d, s)·K(d, s, k)` for `k = 0..=d`; `f̂(T)` is
/// `χ_T(v)·(−1)^{|T|}·c_{|T|}`.
pub fn level_coefficients(d: usize, s_star: usize) -> Vec<BigRational> {
    let table = KravchukTable::new(d);
    level_coefficients_with(&table, s_star)
}

pub fn level_coefficients_with(table: &KravchukTable, s_star: usize) -> Vec<BigRational> {
    let d = table.n();
    let row = binomial_row(d);
    let scale = BigRational::from_integer(pow2(d));
    (0..=d)
        .map(|k| {
            let mut acc = BigRational::zero();
            for (s, c) in row.iter().enumerate().skip(s_star) {
                acc += table.get(s, k) * c;
            }
            acc / &scale
        })
        .collect()
}

/// Bit mask of a subset of `[d]` given as indices.
pub fn subset_mask(d: usize, subset: &[usize]) -> Result<u64> {
    if d > 64 {
        return Err(out_of_range("d", d, "[1, 64]"));
    }
    let mut mask = 0u64;
    for &i in subset {
        if i >= d {
            return Err(out_of_range("subset index", i, "[0, d)"));
        }
        if mask >> i & 1 == 1 {
            return Err(out_of_range("subset index", i, "distinct indices"));
        }
        mask |= 1 << i;
    }
    Ok(mask)
}

fn character_sign(ltf: &ThresholdLtf, mask: u64) -> Result<bool> {
    let v = ltf.v.neg_mask().ok_or(Error::ExactBudget { d: ltf.dim(), cap: 64 })?;
    // χ_T(v)·(−1)^{|T|} = (−1)^{|T ∩ {i : v_i = +1}|}.
    Ok((mask & !v).count_ones() % 2 == 1)
}

/// `f̂(T)` by the closed form, for `T` given as a bit mask.
pub fn fourier_coefficient_mask(ltf: &ThresholdLtf, levels: &[BigRational], mask: u64) -> Result<BigRational> {
    let c = &levels[mask.count_ones() as usize];
    Ok(if character_sign(ltf, mask)? { -c.clone() } else { c.clone() })
}

/// `f̂(T) = χ_T(v)·(−1)^{|T|}·2^{−d}·Σ_{s ≥ s*} C(d, s)·K(d, s, |T|)`.
pub fn fourier_coefficient(ltf: &ThresholdLtf, subset: &[usize]) -> Result<BigRational> {
    let mask = subset_mask(ltf.dim(), subset)?;
    fourier_coefficient_mask(ltf, &level_coefficients(ltf.dim(), ltf.s_star), mask)
}

/// `E[f_v·χ_T]` by summing over all of `{±1}^d`.
pub fn fourier_coefficient_enumerated(ltf: &ThresholdLtf, subset: &[usize]) -> Result<BigRational> {
    let d = ltf.dim();
    check_enumeration(d)?;
    let t = subset_mask(d, subset)?;
    let v = ltf.v.neg_mask().expect("d ≤ 24");
    let mut acc: i64 = 0;
    for x in 0u64..1 << d {
        if d - ((x ^ v).count_ones() as usize) >= ltf.s_star {
            acc += if (x & t).count_ones() % 2 == 0 { 1 } else { -1 };
        }
    }
    Ok(BigRational::new(BigInt::from(acc), pow2(d)))
}

/// Every `f̂(T)`, indexed by subset mask, by an integer Walsh–Hadamard
/// transform of the truth table.
pub fn walsh_spectrum(ltf: &ThresholdLtf) -> Result<Vec<BigRational>> {
    let d = ltf.dim();
    if d > FOURIER_MAX_D {
        return Err(Error::ExactBudget { d, cap: FOURIER_MAX_D });
    }
    let v = ltf.v.neg_mask().expect("d ≤ 14");
    let mut a: Vec<i64> = (0u64..1 << d)
        .map(|x| i64::from(d - ((x ^ v).count_ones() as usize) >= ltf.s_star))
        .collect();
    let mut h = 1;
    while h < a.len() {
        for block in a.chunks_exact_mut(2 * h) {
            let (lo, hi) = block.split_at_mut(h);
            for (p, q) in lo.iter_mut().zip(hi) {
                let (s, t) = (*p + *q, *p - *q);
                *p = s;
                *q = t;
            }
        }
        h *= 2;
    }
    let denom = pow2(d);
    Ok(a.into_iter().map(|x| BigRational::new(BigInt::from(x), denom.clone())).collect())
}

/// `Σ_T f̂(T)²` over all `2^d` subsets using the closed form.
pub fn parseval_sum(ltf: &ThresholdLtf) -> Result<BigRational> {
    let d = ltf.dim();
    if d > FOURIER_MAX_D {
        return Err(Error::ExactBudget { d, cap: FOURIER_MAX_D });
    }
    let levels = level_coefficients(d, ltf.s_star);
    let mut acc = BigRational::zero();
    for mask in 0u64..1 << d {
        let c = fourier_coefficient_mask(ltf, &levels, mask)?;
        acc += &c * &c;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hardness::binomial::rational;
    use crate::hardness::ltf::HypercubePoint;

    fn ltf(v: Vec<i8>, s: usize) -> ThresholdLtf {
        ThresholdLtf::new(HypercubePoint::new(v).unwrap(), s).unwrap()
    }

    #[test]
    fn examples() {
        let f = ltf(vec![1, 1], 1);
        assert_eq!(fourier_coefficient(&f, &[]).unwrap(), rational(3, 4));
        assert_eq!(fourier_coefficient(&f, &[0]).unwrap(), rational(1, 4));
        assert_eq!(fourier_coefficient_enumerated(&f, &[0]).unwrap(), rational(1, 4));
        let g = ltf(vec![-1, 1], 1);
        assert_eq!(fourier_coefficient(&g, &[0]).unwrap(), rational(-1, 4));
        assert_eq!(fourier_coefficient_enumerated(&g, &[0]).unwrap(), rational(-1, 4));
        assert!(fourier_coefficient(&f, &[2]).is_err());
        assert!(fourier_coefficient(&f, &[0, 0]).is_err());
    }

    #[test]
    fn empty_set_is_mass() {
        for s in 0..=7 {
            let f = ltf(vec![1, -1, -1, 1, 1, -1], s);
            assert_eq!(fourier_coefficient(&f, &[]).unwrap(), f.mass());
        }
    }

    #[test]
    fn spectrum_matches_closed_form() {
        for mask in 0u64..32 {
            let v = HypercubePoint::from_neg_mask(5, mask * 7 % 32);
            for s in 0..=6 {
                let f = ThresholdLtf::new(v.clone(), s).unwrap();
                let levels = level_coefficients(5, s);
                let spec = walsh_spectrum(&f).unwrap();
                for (t, coef) in spec.iter().enumerate() {
                    assert_eq!(coef, &fourier_coefficient_mask(&f, &levels, t as u64).unwrap());
                }
                assert_eq!(parseval_sum(&f).unwrap(), f.mass());
            }
        }
    }
}
