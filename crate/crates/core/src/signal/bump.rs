use num_complex::Complex;

use super::{Grid, SampledFunction};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Spectral reach of [`make_bump`] in units of `1/width`: past
/// `BUMP_BANDWIDTH_FACTOR / width` cycles the coefficients are below `1e-8`
/// of the peak.
pub const BUMP_BANDWIDTH_FACTOR: f64 = 111.0;

/// `exp(-1/(1-t²))` on `|t| < 1`, zero outside.
pub fn smooth_bump<T: Real>(t: T) -> T {
    let s = T::one() - t * t;
    if s > T::zero() {
        (-T::one() / s).exp()
    } else {
        T::zero()
    }
}

/// Declared bandwidth (cycles per unit length) of a bump of the given width.
pub fn bump_bandwidth<T: Real>(width: T) -> T {
    T::lit(BUMP_BANDWIDTH_FACTOR) / width
}

/// Smooth bump supported on `(center − width/2, center + width/2)` (read
/// periodically) with discrete `L²` norm 1.
pub fn make_bump<T: Real>(center: T, width: T, grid: &Grid<T>) -> Result<SampledFunction<T>> {
    let h = grid.spacing();
    if !(width >= T::lit(4.0) * h) {
        return Err(Error::Resolution(format!("bump width {width} is below 4h = {}", T::lit(4.0) * h)));
    }
    if width > grid.period() {
        return Err(Error::Parameter(format!("bump width {width} exceeds the period {}", grid.period())));
    }
    let half = width / T::lit(2.0);
    let raw = SampledFunction::from_real_fn(*grid, |x| smooth_bump(grid.periodic_offset(x, center) / half));
    let norm = (raw.values().iter().map(|v| v.norm_sqr()).sum::<T>() * h).sqrt();
    if !(norm > T::zero()) {
        return Err(Error::Resolution("bump has no samples inside its support".into()));
    }
    Ok(raw.scale(Complex::new(T::one() / norm, T::zero())))
}
