use num_complex::Complex;
use rustfft::FftPlanner;

use super::{SampledFunction, Spectrum};
use crate::error::{Error, Result};
use crate::scalar::Real;

fn check_pow2(n: usize) -> Result<()> {
    if n == 0 || !n.is_power_of_two() {
        Err(Error::Size(format!("transform length must be a power of two, got {n}")))
    } else {
        Ok(())
    }
}

pub(crate) fn fft_in_place<T: Real>(buf: &mut [Complex<T>], inverse: bool) {
    let mut planner = FftPlanner::<T>::new();
    let plan = if inverse {
        planner.plan_fft_inverse(buf.len())
    } else {
        planner.plan_fft_forward(buf.len())
    };
    plan.process(buf);
    let s = T::one() / T::of_usize(buf.len()).sqrt();
    for v in buf.iter_mut() {
        *v = *v * s;
    }
}

/// Unitary forward DFT: `F_k = n^{-1/2} Σ_j f_j e^{-2πi jk/n}`.
pub fn dft_forward<T: Real>(f: &SampledFunction<T>) -> Result<Spectrum<T>> {
    check_pow2(f.len())?;
    let mut buf = f.values().to_vec();
    fft_in_place(&mut buf, false);
    Spectrum::new(*f.grid(), buf)
}

/// Inverse of [`dft_forward`].
pub fn dft_inverse<T: Real>(s: &Spectrum<T>) -> Result<SampledFunction<T>> {
    check_pow2(s.values().len())?;
    let mut buf = s.values().to_vec();
    fft_in_place(&mut buf, true);
    SampledFunction::new(*s.grid(), buf)
}

/// O(n²) exponential-sum DFT with the same normalization as [`dft_forward`].
pub fn naive_dft<T: Real>(values: &[Complex<T>]) -> Vec<Complex<T>> {
    let n = values.len();
    let s = T::one() / T::of_usize(n).sqrt();
    (0..n)
        .map(|k| {
            let mut acc = Complex::new(T::zero(), T::zero());
            for (j, v) in values.iter().enumerate() {
                let phase = -T::two_pi() * T::of_usize((j * k) % n) / T::of_usize(n);
                acc += *v * Complex::from_polar(T::one(), phase);
            }
            acc * s
        })
        .collect()
}

/// Applies the Fourier multiplier `m(ξ)` (ξ in cycles per unit length).
pub fn spectral_multiplier<T: Real>(
    f: &SampledFunction<T>,
    m: impl Fn(T) -> Complex<T>,
) -> Result<SampledFunction<T>> {
    let mut spec = dft_forward(f)?;
    let grid = *spec.grid();
    for (k, v) in spec.values_mut().iter_mut().enumerate() {
        *v = *v * m(grid.freq(k));
    }
    dft_inverse(&spec)
}

/// `order`-th derivative via the multiplier `(2πiξ)^order`. The Nyquist slot
/// is zeroed for odd orders so real input stays real.
pub fn spectral_derivative<T: Real>(f: &SampledFunction<T>, order: u32) -> Result<SampledFunction<T>> {
    if order == 0 {
        return Ok(f.clone());
    }
    let mut spec = dft_forward(f)?;
    let grid = *spec.grid();
    let n = grid.len();
    for (k, v) in spec.values_mut().iter_mut().enumerate() {
        if order % 2 == 1 && k == n / 2 {
            *v = Complex::new(T::zero(), T::zero());
            continue;
        }
        let iw = Complex::new(T::zero(), T::two_pi() * grid.freq(k));
        *v = *v * iw.powu(order);
    }
    dft_inverse(&spec)
}
