//! Running mean and variance with order-fixed parallel reduction.

use rayon::prelude::*;
use std::ops::Range;

/// Paths per reduction chunk. Chunks are merged in index order, so results
/// do not depend on the number of worker threads.
pub const CHUNK: usize = 256;

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Moments {
    n: f64,
    mean: f64,
    m2: f64,
}

impl Moments {
    pub fn push(&mut self, x: f64) {
        self.n += 1.0;
        let d = x - self.mean;
        self.mean += d / self.n;
        self.m2 += d * (x - self.mean);
    }

    /// Chan et al. pairwise combination.
    pub fn merge(&mut self, other: &Moments) {
        if other.n == 0.0 {
            return;
        }
        if self.n == 0.0 {
            *self = *other;
            return;
        }
        let n = self.n + other.n;
        let d = other.mean - self.mean;
        self.mean += d * other.n / n;
        self.m2 += other.m2 + d * d * self.n * other.n / n;
        self.n = n;
    }

    pub fn count(&self) -> usize {
        self.n as usize
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn variance(&self) -> f64 {
        if self.n > 1.0 {
            self.m2 / (self.n - 1.0)
        } else {
            0.0
        }
    }

    /// Standard error of the mean.
    pub fn stderr(&self) -> f64 {
        if self.n > 0.0 {
            (self.variance() / self.n).sqrt()
        } else {
            0.0
        }
    }
}

/// Runs `work` on consecutive index chunks in parallel and folds the
/// results in chunk order with `merge`.
pub fn reduce_chunks<T, W, M>(n: usize, work: W, mut merge: M) -> Option<T>
where
    T: Send,
    W: Fn(Range<usize>) -> T + Sync,
    M: FnMut(&mut T, T),
{
    let ranges: Vec<Range<usize>> = (0..n)
        .step_by(CHUNK)
        .map(|s| s..(s + CHUNK).min(n))
        .collect();
    let mut parts: Vec<T> = ranges.into_par_iter().map(&work).collect();
    if parts.is_empty() {
        return None;
    }
    let mut acc = parts.remove(0);
    for p in parts {
        merge(&mut acc, p);
    }
    Some(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn merge_matches_single_pass() {
        let xs: Vec<f64> = (0..1000).map(|i| ((i * 37) % 101) as f64 * 0.1 - 3.0).collect();
        let mut whole = Moments::default();
        xs.iter().for_each(|&x| whole.push(x));
        let merged = reduce_chunks(
            xs.len(),
            |r| {
                let mut m = Moments::default();
                xs[r].iter().for_each(|&x| m.push(x));
                m
            },
            |a, b| a.merge(&b),
        )
        .unwrap();
        assert_eq!(merged.count(), 1000);
        assert!((merged.mean() - whole.mean()).abs() < 1e-13);
        assert!((merged.variance() - whole.variance()).abs() < 1e-11);
    }
}
