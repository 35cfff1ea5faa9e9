//! Sampled functions on a uniform periodic grid, discrete Fourier analysis,
//! interval geometry, norms, coronas and the Hardy–Littlewood maximal function.

mod bump;
mod corona;
pub(crate) mod fourier;
mod interval;
pub mod io;
mod maximal;
mod norms;

pub use bump::{bump_bandwidth, make_bump, smooth_bump, BUMP_BANDWIDTH_FACTOR};
pub use corona::{corona, corona_index, corona_masks, CoronaMask};
pub use fourier::{dft_forward, dft_inverse, naive_dft, spectral_derivative, spectral_multiplier};
pub use interval::Interval;
pub use maximal::hardy_littlewood_max;
pub use norms::{lp_norm, lp_norm_flagged, Exponent};

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Uniform grid `x_j = origin + j·spacing`, `j = 0..count`, read as one period
/// of a torus of length `count·spacing`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid<T> {
    origin: T,
    spacing: T,
    count: usize,
}

impl<T: Real> Grid<T> {
    pub fn new(origin: T, spacing: T, count: usize) -> Result<Self> {
        if !(spacing > T::zero()) || !spacing.is_finite() {
            return Err(Error::Parameter(format!("grid spacing must be positive, got {spacing}")));
        }
        if !origin.is_finite() {
            return Err(Error::Parameter("grid origin must be finite".into()));
        }
        if count < 2 || !count.is_power_of_two() {
            return Err(Error::Size(format!("grid count must be a power of two ≥ 2, got {count}")));
        }
        Ok(Self { origin, spacing, count })
    }

    /// Grid of `count` points covering `[-period/2, period/2)`.
    pub fn centered(period: T, count: usize) -> Result<Self> {
        if !(period > T::zero()) {
            return Err(Error::Parameter(format!("period must be positive, got {period}")));
        }
        let spacing = period / T::of_usize(count.max(1));
        Self::new(-period / T::lit(2.0), spacing, count)
    }

    pub fn origin(&self) -> T {
        self.origin
    }

    pub fn spacing(&self) -> T {
        self.spacing
    }

    pub fn len(&self) -> usize {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    pub fn period(&self) -> T {
        self.spacing * T::of_usize(self.count)
    }

    #[inline]
    pub fn x(&self, j: usize) -> T {
        self.origin + self.spacing * T::of_usize(j)
    }

    pub fn points(&self) -> impl Iterator<Item = T> + '_ {
        (0..self.count).map(move |j| self.x(j))
    }

    /// Signed bin index of DFT slot `k`: `k` for `k < n/2`, `k − n` otherwise.
    #[inline]
    pub fn signed_bin(&self, k: usize) -> isize {
        let n = self.count as isize;
        let k = k as isize;
        if k < n / 2 {
            k
        } else {
            k - n
        }
    }

    /// Ordinary frequency (cycles per unit length) of DFT slot `k`.
    #[inline]
    pub fn freq(&self, k: usize) -> T {
        T::from_isize(self.signed_bin(k)).unwrap() / self.period()
    }

    /// Angular frequency `2π·freq(k)`.
    #[inline]
    pub fn angular_freq(&self, k: usize) -> T {
        T::two_pi() * self.freq(k)
    }

    /// Frequency bin width `1/period`.
    pub fn bin_width(&self) -> T {
        T::one() / self.period()
    }

    /// Largest representable ordinary frequency.
    pub fn nyquist(&self) -> T {
        T::lit(0.5) / self.spacing
    }

    /// Slot holding the signed bin `b` (taken modulo `n`).
    #[inline]
    pub fn slot(&self, b: isize) -> usize {
        b.rem_euclid(self.count as isize) as usize
    }

    /// Wraps `x − c` into `[-period/2, period/2)`.
    pub fn periodic_offset(&self, x: T, c: T) -> T {
        let p = self.period();
        let d = x - c;
        d - p * (d / p + T::lit(0.5)).floor()
    }

    pub fn same_as(&self, other: &Self) -> bool {
        self.count == other.count && self.origin == other.origin && self.spacing == other.spacing
    }

    pub fn ensure_same(&self, other: &Self) -> Result<()> {
        if self.same_as(other) {
            Ok(())
        } else {
            Err(Error::Shape(format!(
                "grids differ: (origin {}, h {}, n {}) vs (origin {}, h {}, n {})",
                self.origin, self.spacing, self.count, other.origin, other.spacing, other.count
            )))
        }
    }

    pub fn cast<U: Real>(&self) -> Grid<U> {
        Grid {
            origin: U::lit(self.origin.to_f64_lossy()),
            spacing: U::lit(self.spacing.to_f64_lossy()),
            count: self.count,
        }
    }
}

/// Complex samples of a function on a [`Grid`].
#[derive(Debug, Clone, PartialEq)]
pub struct SampledFunction<T> {
    grid: Grid<T>,
    values: Vec<Complex<T>>,
}

impl<T: Real> SampledFunction<T> {
    pub fn new(grid: Grid<T>, values: Vec<Complex<T>>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Shape(format!(
                "expected {} samples, got {}",
                grid.len(),
                values.len()
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: Grid<T>) -> Self {
        Self { grid, values: vec![Complex::new(T::zero(), T::zero()); grid.len()] }
    }

    pub fn from_fn(grid: Grid<T>, f: impl Fn(T) -> Complex<T>) -> Self {
        let values = grid.points().map(f).collect();
        Self { grid, values }
    }

    pub fn from_real_fn(grid: Grid<T>, f: impl Fn(T) -> T) -> Self {
        Self::from_fn(grid, |x| Complex::new(f(x), T::zero()))
    }

    pub fn constant(grid: Grid<T>, c: Complex<T>) -> Self {
        Self { grid, values: vec![c; grid.len()] }
    }

    pub fn grid(&self) -> &Grid<T> {
        &self.grid
    }

    pub fn values(&self) -> &[Complex<T>] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex<T>] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex<T>> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn map(&self, f: impl Fn(Complex<T>) -> Complex<T>) -> Self {
        Self { grid: self.grid, values: self.values.iter().map(|&v| f(v)).collect() }
    }

    /// Pointwise map with access to the sample position.
    pub fn map_with_x(&self, f: impl Fn(T, Complex<T>) -> Complex<T>) -> Self {
        let values = self.values.iter().enumerate().map(|(j, &v)| f(self.grid.x(j), v)).collect();
        Self { grid: self.grid, values }
    }

    pub fn scale(&self, c: Complex<T>) -> Self {
        self.map(|v| v * c)
    }

    pub fn conj(&self) -> Self {
        self.map(|v| v.conj())
    }

    pub fn abs(&self) -> Self {
        self.map(|v| Complex::new(v.norm(), T::zero()))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a * b)
    }

    pub fn zip_with(
        &self,
        other: &Self,
        f: impl Fn(Complex<T>, Complex<T>) -> Complex<T>,
    ) -> Result<Self> {
        self.grid.ensure_same(&other.grid)?;
        let values = self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect();
        Ok(Self { grid: self.grid, values })
    }

    /// Zeroes every sample outside `mask`.
    pub fn restrict(&self, mask: &[bool]) -> Result<Self> {
        if mask.len() != self.len() {
            return Err(Error::Shape(format!("mask length {} vs {}", mask.len(), self.len())));
        }
        let zero = Complex::new(T::zero(), T::zero());
        let values = self.values.iter().zip(mask).map(|(&v, &m)| if m { v } else { zero }).collect();
        Ok(Self { grid: self.grid, values })
    }

    /// Cyclic shift by `m` samples: `out[j] = self[j − m]`.
    pub fn shift(&self, m: isize) -> Self {
        let n = self.len() as isize;
        let values = (0..n).map(|j| self.values[(j - m).rem_euclid(n) as usize]).collect();
        Self { grid: self.grid, values }
    }

    /// Multiplies by `e^{i·angular·x}`.
    pub fn modulate(&self, angular: T) -> Self {
        self.map_with_x(|x, v| v * Complex::from_polar(T::one(), angular * x))
    }

    pub fn max_abs(&self) -> T {
        self.values.iter().fold(T::zero(), |m, v| m.max(v.norm()))
    }

    pub fn max_abs_diff(&self, other: &Self) -> Result<T> {
        self.grid.ensure_same(&other.grid)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .fold(T::zero(), |m, (a, b)| m.max((*a - *b).norm())))
    }

    /// Discrete inner product `⟨self, other⟩ = Σ self_j · conj(other_j) · h`.
    pub fn inner(&self, other: &Self) -> Result<Complex<T>> {
        self.grid.ensure_same(&other.grid)?;
        let h = self.grid.spacing();
        let s: Complex<T> =
            self.values.iter().zip(&other.values).fold(Complex::new(T::zero(), T::zero()), |acc, (a, b)| {
                acc + *a * b.conj()
            });
        Ok(s * h)
    }

    pub fn real_parts(&self) -> Vec<T> {
        self.values.iter().map(|v| v.re).collect()
    }
}

/// Unitary DFT coefficients of a [`SampledFunction`], slot `k` at frequency
/// [`Grid::freq`]`(k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum<T> {
    grid: Grid<T>,
    values: Vec<Complex<T>>,
}

impl<T: Real> Spectrum<T> {
    pub fn new(grid: Grid<T>, values: Vec<Complex<T>>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Shape(format!(
                "expected {} coefficients, got {}",
                grid.len(),
                values.len()
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn grid(&self) -> &Grid<T> {
        &self.grid
    }

    pub fn values(&self) -> &[Complex<T>] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex<T>] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex<T>> {
        self.values
    }

    /// Discrete ℓ² norm scaled to match the spatial L² Riemann sum.
    pub fn l2_norm(&self) -> T {
        let s: T = self.values.iter().map(|v| v.norm_sqr()).sum();
        (s * self.grid.spacing()).sqrt()
    }

    /// ℓ² mass of the coefficients whose frequency lies outside `[lo, hi]`,
    /// in the same scale as [`Spectrum::l2_norm`].
    pub fn mass_outside(&self, lo: T, hi: T) -> T {
        let s: T = self
            .values
            .iter()
            .enumerate()
            .filter(|(k, _)| {
                let f = self.grid.freq(*k);
                f < lo || f > hi
            })
            .map(|(_, v)| v.norm_sqr())
            .sum();
        (s * self.grid.spacing()).sqrt()
    }
}
