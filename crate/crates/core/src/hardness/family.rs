//! Families of pairwise near-orthogonal hypercube points.

use rand::Rng;

use super::ltf::HypercubePoint;
use crate::error::{out_of_range, Error, Result};
use crate::rng::stream_rng;

/// Consecutive rejections tolerated before giving up.
pub const FAMILY_RETRY_BUDGET: usize = 100_000;

/// Upper bound on the requested family size.
pub const FAMILY_MAX_COUNT: usize = 4096;

/// `count` uniform points of `{±1}^d` with `|v·u| < d^{1/2+c}` for every pair,
/// grown greedily by rejection.
pub fn near_orthogonal_set(d: usize, c: f64, count: usize, seed: u64) -> Result<Vec<HypercubePoint>> {
    if d == 0 || d > 64 {
        return Err(out_of_range("d", d, "[1, 64]"));
    }
    if !(c.is_finite() && c >= 0.0) {
        return Err(out_of_range("c", c, "[0, ∞)"));
    }
    if count > FAMILY_MAX_COUNT {
        return Err(out_of_range("count", count, "[0, 4096]"));
    }
    let limit = (d as f64).powf(0.5 + c);
    let mut rng = stream_rng(seed, 7);
    let full = if d == 64 { u64::MAX } else { (1u64 << d) - 1 };
    let mut masks: Vec<u64> = Vec::with_capacity(count);
    let mut attempts = 0u64;
    let mut rejections = 0usize;
    while masks.len() < count {
        let x = rng.random::<u64>() & full;
        attempts += 1;
        let ok = masks.iter().all(|&m| {
            let inner = d as i64 - 2 * i64::from((x ^ m).count_ones());
            (inner.unsigned_abs() as f64) < limit
        });
        if ok {
            masks.push(x);
            rejections = 0;
        } else {
            rejections += 1;
            if rejections >= FAMILY_RETRY_BUDGET {
                return Err(Error::FamilyBudget {
                    attempts,
                    accepted: masks.len(),
                });
            }
        }
    }
    Ok(masks.into_iter().map(|m| HypercubePoint::from_neg_mask(d, m)).collect())
}
