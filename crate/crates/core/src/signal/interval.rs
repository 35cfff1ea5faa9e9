use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Bounded interval stored by center and length.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval<T> {
    center: T,
    length: T,
}

impl<T: Real> Interval<T> {
    pub fn new(center: T, length: T) -> Result<Self> {
        if !(length > T::zero()) || !length.is_finite() || !center.is_finite() {
            return Err(Error::Invariant(format!(
                "interval needs finite center and positive length, got center {center}, length {length}"
            )));
        }
        Ok(Self { center, length })
    }

    pub fn from_bounds(lo: T, hi: T) -> Result<Self> {
        Self::new((lo + hi) / T::lit(2.0), hi - lo)
    }

    pub fn center(&self) -> T {
        self.center
    }

    pub fn length(&self) -> T {
        self.length
    }

    pub fn lo(&self) -> T {
        self.center - self.length / T::lit(2.0)
    }

    pub fn hi(&self) -> T {
        self.center + self.length / T::lit(2.0)
    }

    /// `λI`: same center, length scaled by `factor`.
    pub fn dilate(&self, factor: T) -> Result<Self> {
        Self::new(self.center, self.length * factor)
    }

    pub fn translate(&self, by: T) -> Self {
        Self { center: self.center + by, length: self.length }
    }

    /// Open-interval membership `|x − c| < |I|/2`, evaluated as `|x − c|/(|I|/2) < 1`.
    pub fn contains(&self, x: T) -> bool {
        (x - self.center).abs() / (self.length / T::lit(2.0)) < T::one()
    }

    /// Closed containment `other ⊂ self`.
    pub fn contains_interval(&self, other: &Self) -> bool {
        other.lo() >= self.lo() && other.hi() <= self.hi()
    }

    /// Closed intervals intersect.
    pub fn intersects(&self, other: &Self) -> bool {
        other.lo() <= self.hi() && self.lo() <= other.hi()
    }

    /// Interiors intersect.
    pub fn overlaps(&self, other: &Self) -> bool {
        other.lo() < self.hi() && self.lo() < other.hi()
    }

    /// Set distance from `x` to the closed interval.
    pub fn distance_to(&self, x: T) -> T {
        ((x - self.center).abs() - self.length / T::lit(2.0)).max(T::zero())
    }

    /// Set distance between two closed intervals.
    pub fn distance_to_interval(&self, other: &Self) -> T {
        ((other.center - self.center).abs() - (self.length + other.length) / T::lit(2.0)).max(T::zero())
    }

    /// Mask of grid points inside the open interval.
    pub fn mask(&self, grid: &super::Grid<T>) -> Vec<bool> {
        grid.points().map(|x| self.contains(x)).collect()
    }

    /// Smallest interval containing both.
    pub fn hull(&self, other: &Self) -> Self {
        let lo = self.lo().min(other.lo());
        let hi = self.hi().max(other.hi());
        Self { center: (lo + hi) / T::lit(2.0), length: hi - lo }
    }
}
