use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Finite set of truncation radii `0 < r_1 < … < r_m` standing in for a
/// supremum over `r`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruncationLadder<T> {
    radii: Vec<T>,
}

impl<T: Real> TruncationLadder<T> {
    pub fn new(radii: Vec<T>) -> Result<Self> {
        if radii.is_empty() {
            return Err(Error::Parameter("truncation ladder is empty".into()));
        }
        if radii.iter().any(|r| !(*r > T::zero()) || !r.is_finite()) {
            return Err(Error::Parameter("truncation radii must be positive and finite".into()));
        }
        if radii.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::Parameter("truncation radii must be strictly increasing".into()));
        }
        Ok(Self { radii })
    }

    /// `count` radii in geometric progression from `lo` to `hi`.
    pub fn geometric(lo: T, hi: T, count: usize) -> Result<Self> {
        if count == 1 {
            return Self::new(vec![lo]);
        }
        if !(lo > T::zero() && hi > lo) {
            return Err(Error::Parameter(format!("geometric ladder needs 0 < lo < hi, got {lo}, {hi}")));
        }
        let q = (hi / lo).ln() / T::of_usize(count - 1);
        let mut radii: Vec<T> = (0..count).map(|i| lo * (q * T::of_usize(i)).exp()).collect();
        radii[count - 1] = hi;
        Self::new(radii)
    }

    /// `hi·2^{-k}` for `k = 0..count`, increasing.
    pub fn dyadic(hi: T, count: usize) -> Result<Self> {
        let mut radii: Vec<T> = (0..count).map(|k| hi / T::lit(2.0).powi(k as i32)).collect();
        radii.reverse();
        Self::new(radii)
    }

    pub fn radii(&self) -> &[T] {
        &self.radii
    }

    pub fn len(&self) -> usize {
        self.radii.len()
    }

    pub fn is_empty(&self) -> bool {
        self.radii.is_empty()
    }

    pub fn max(&self) -> T {
        self.radii[self.radii.len() - 1]
    }

    /// Union of two ladders.
    pub fn merge(&self, other: &Self) -> Self {
        let mut radii: Vec<T> = self.radii.iter().chain(&other.radii).copied().collect();
        radii.sort_by(|a, b| a.partial_cmp(b).expect("finite radii"));
        radii.dedup();
        Self { radii }
    }

    /// Radii not exceeding `l`.
    pub fn capped(&self, l: T) -> Result<Self> {
        Self::new(self.radii.iter().copied().filter(|r| *r <= l).collect())
    }
}

/// Pairs `(ε, r)` with `0 < ε < r`, all below a cap `L`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairLadder<T> {
    pairs: Vec<(T, T)>,
}

impl<T: Real> PairLadder<T> {
    pub fn new(pairs: Vec<(T, T)>, cap: T) -> Result<Self> {
        if pairs.is_empty() {
            return Err(Error::Parameter("pair ladder is empty".into()));
        }
        for &(e, r) in &pairs {
            if !(e > T::zero() && e < r && r <= cap) || !r.is_finite() {
                return Err(Error::Parameter(format!("malformed truncation pair (ε={e}, r={r}) for cap L={cap}")));
            }
        }
        Ok(Self { pairs })
    }

    /// All pairs `ε < r` drawn from a radius ladder.
    pub fn from_ladder(ladder: &TruncationLadder<T>, cap: T) -> Result<Self> {
        let r = ladder.radii();
        let mut pairs = Vec::new();
        for i in 0..r.len() {
            for j in i + 1..r.len() {
                pairs.push((r[i], r[j]));
            }
        }
        Self::new(pairs, cap)
    }

    pub fn pairs(&self) -> &[(T, T)] {
        &self.pairs
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(TruncationLadder::<f64>::new(vec![]).is_err());
        assert!(TruncationLadder::new(vec![1.0, 1.0]).is_err());
        assert!(TruncationLadder::new(vec![-1.0, 1.0]).is_err());
        assert!(PairLadder::new(vec![(0.5, 0.25)], 1.0).is_err());
        assert!(PairLadder::new(vec![(0.5, 2.0)], 1.0).is_err());
        let d = TruncationLadder::dyadic(1.0, 4).unwrap();
        assert_eq!(d.radii(), &[0.125, 0.25, 0.5, 1.0]);
        let g = TruncationLadder::geometric(0.125, 1.0, 64).unwrap();
        assert_eq!(g.len(), 64);
        assert_eq!(d.merge(&g).max(), 1.0);
    }
}
