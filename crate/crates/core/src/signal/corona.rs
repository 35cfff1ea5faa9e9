use super::{Grid, Interval};
use crate::scalar::Real;

/// Points of a grid lying in the `k`-th corona of an interval.
#[derive(Debug, Clone, PartialEq)]
pub struct CoronaMask<T> {
    pub interval: Interval<T>,
    pub index: usize,
    pub mask: Vec<bool>,
}

impl<T> CoronaMask<T> {
    pub fn count(&self) -> usize {
        self.mask.iter().filter(|b| **b).count()
    }
}

/// Index `k` with `2^k ≤ 1 + |x − c(I)|/|I| < 2^{k+1}`.
///
/// Compared as `2^k − 1 ≤ r < 2^{k+1} − 1` with `r = |x − c|/|I|`, so that
/// `k = 0` is exactly the open test `r < 1` used for `2I`.
pub fn corona_index<T: Real>(interval: &Interval<T>, x: T) -> usize {
    let r = (x - interval.center()).abs() / interval.length();
    let mut k = 0usize;
    let mut upper = T::one(); // 2^{k+1} − 1
    while !(r < upper) {
        k += 1;
        upper = upper * T::lit(2.0) + T::one();
        if !upper.is_finite() {
            break;
        }
    }
    k
}

/// `C_k(I)` sampled on `grid` (non-periodic distance to the center).
pub fn corona<T: Real>(interval: &Interval<T>, k: usize, grid: &Grid<T>) -> CoronaMask<T> {
    let mask = grid.points().map(|x| corona_index(interval, x) == k).collect();
    CoronaMask { interval: *interval, index: k, mask }
}

/// Masks `C_0(I), …, C_K(I)` on `grid`.
pub fn corona_masks<T: Real>(interval: &Interval<T>, max_k: usize, grid: &Grid<T>) -> Vec<CoronaMask<T>> {
    let idx: Vec<usize> = grid.points().map(|x| corona_index(interval, x)).collect();
    (0..=max_k)
        .map(|k| CoronaMask { interval: *interval, index: k, mask: idx.iter().map(|&i| i == k).collect() })
        .collect()
}
