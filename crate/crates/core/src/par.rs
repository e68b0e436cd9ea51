//! Execution strategy for the data-parallel loops.
//!
//! All helpers return results in input order and use a fixed partition of the
//! work, so `Sequential` and `Parallel` produce bit-identical output. When the
//! `parallel` feature is disabled, `Parallel` runs on the calling thread.

use std::ops::Range;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

impl Execution {
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }
}

/// Ordered map over `0..n`.
pub fn map_range<R, F>(exec: Execution, n: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        use rayon::prelude::*;
        return (0..n).into_par_iter().map(f).collect();
    }
    let _ = exec;
    (0..n).map(f).collect()
}

/// Ordered map over a slice.
pub fn map_slice<T, R, F>(exec: Execution, items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    map_range(exec, items.len(), |i| f(&items[i]))
}

/// Splits `0..n` into consecutive blocks of `block` indices (the last may be shorter).
pub fn blocks(n: usize, block: usize) -> Vec<Range<usize>> {
    let block = block.max(1);
    (0..n.div_ceil(block))
        .map(|b| b * block..((b + 1) * block).min(n))
        .collect()
}

/// Computes one partial result per block and returns them in block order.
/// Callers fold the partials sequentially, which fixes the summation tree.
pub fn map_blocks<R, F>(exec: Execution, n: usize, block: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(Range<usize>) -> R + Sync + Send,
{
    let ranges = blocks(n, block);
    map_range(exec, ranges.len(), |i| f(ranges[i].clone()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn blocks_cover_range_exactly() {
        let b = blocks(10, 4);
        assert_eq!(b, vec![0..4, 4..8, 8..10]);
        assert!(blocks(0, 4).is_empty());
    }

    #[test]
    fn parallel_matches_sequential_bitwise() {
        let xs: Vec<f64> = (0..10_000).map(|i| (i as f64).sin() * 1e-3).collect();
        let sum = |exec| {
            map_blocks(exec, xs.len(), 257, |r| xs[r].iter().sum::<f64>())
                .into_iter()
                .fold(0.0, |a, b| a + b)
        };
        assert_eq!(
            sum(Execution::Sequential).to_bits(),
            sum(Execution::Parallel).to_bits()
        );
    }
}
