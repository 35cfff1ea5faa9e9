use std::fmt;
use std::sync::Arc;

use num_complex::Complex;

use super::Tile;
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::signal::fourier::fft_in_place;
use crate::signal::{spectral_derivative, Grid, Interval, SampledFunction};
use crate::symbol::smooth_step;

type Window<T> = Arc<dyn Fn(T) -> Complex<T> + Send + Sync>;

/// Profile `Φ` given by its Fourier transform `Φ̂` on `[−1/2, 1/2]`.
#[derive(Clone)]
pub struct WavePacketProfile<T> {
    name: String,
    window: Window<T>,
}

impl<T> fmt::Debug for WavePacketProfile<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("WavePacketProfile").field("name", &self.name).finish()
    }
}

/// `ψ(t)` with `Σ_m ψ(t − m/2) = 1`, supported in `[−1/2, 1/2]`.
fn partition_bump<T: Real>(t: T) -> T {
    let half = T::lit(0.5);
    if t.abs() >= half {
        return T::zero();
    }
    let u = T::one() - T::lit(2.0) * t.abs();
    let s = (T::FRAC_PI_2() * smooth_step(u)).sin();
    s * s
}

impl<T: Real> WavePacketProfile<T> {
    /// `Φ̂ = (2ψ)^{1/2}`: real, even, smooth, and `Σ_m |Φ̂(ξ − m/2)|² = 2`.
    pub fn standard() -> Self {
        Self::from_window("standard", |t: T| Complex::new((T::lit(2.0) * partition_bump(t)).sqrt(), T::zero()))
    }

    /// Profile from `Φ̂`; values outside `(−1/2, 1/2)` are ignored.
    pub fn from_window(name: impl Into<String>, window: impl Fn(T) -> Complex<T> + Send + Sync + 'static) -> Self {
        Self { name: name.into(), window: Arc::new(window) }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn window(&self, t: T) -> Complex<T> {
        if t.abs() < T::lit(0.5) {
            (self.window)(t)
        } else {
            Complex::new(T::zero(), T::zero())
        }
    }

    /// Profile of `conj(Φ)`, i.e. `conj(Φ̂(−t))`.
    pub fn conj(&self) -> Self {
        let w = self.window.clone();
        Self { name: format!("conj {}", self.name), window: Arc::new(move |t: T| w(-t).conj()) }
    }

    /// `Φ` sampled on `grid` (the packet of the unit tile at the origin).
    pub fn sample(&self, grid: &Grid<T>) -> Result<SampledFunction<T>> {
        let tile = Tile::new(Interval::new(T::zero(), T::one())?, Interval::new(T::zero(), T::one())?)?;
        wave_packet(&tile, self, grid)
    }
}

/// Unitary DFT of the packet before normalization, as `(slot, value)` pairs,
/// together with its discrete L² norm.
pub(crate) fn packet_spectrum<T: Real>(
    tile: &Tile<T>,
    profile: &WavePacketProfile<T>,
    grid: &Grid<T>,
) -> Result<(Vec<(usize, Complex<T>)>, T)> {
    let h = grid.spacing();
    let len = tile.time.length();
    if len < T::lit(4.0) * h {
        return Err(Error::Resolution(format!("|I| = {len} is below 4h = {}", T::lit(4.0) * h)));
    }
    if len > grid.period() / T::lit(2.0) {
        return Err(Error::Resolution(format!("|I| = {len} exceeds half the period {}", grid.period())));
    }
    let nyq = grid.nyquist();
    let (lo, hi) = (tile.freq.lo(), tile.freq.hi());
    if lo < -nyq || hi > nyq {
        return Err(Error::Resolution(format!("ω = [{lo}, {hi}] leaves the band [−{nyq}, {nyq}]")));
    }
    let n = grid.len();
    let w = tile.freq.center();
    let c = tile.time.center();
    let amp = len.sqrt() * T::of_usize(n).sqrt() / grid.period();
    let mut out = Vec::new();
    let mut norm2 = T::zero();
    let p = grid.period();
    let b0 = (lo * p).ceil().to_isize().unwrap();
    let b1 = (hi * p).floor().to_isize().unwrap();
    for b in b0..=b1 {
        let xi = T::from_isize(b).unwrap() / p;
        let v = profile.window(len * (xi - w));
        if v.norm() == T::zero() {
            continue;
        }
        let phase = T::two_pi() * (xi * grid.origin() - (xi - w) * c);
        let val = v * Complex::from_polar(amp, phase);
        norm2 += val.norm_sqr();
        out.push((grid.slot(b), val));
    }
    Ok((out, (norm2 * h).sqrt()))
}

/// `Φ_P(x) = |I|^{-1/2} Φ((x − c(I))/|I|) e^{2πi x c(ω)}`, built from its
/// spectrum on the torus and normalized in discrete L².
pub fn wave_packet<T: Real>(tile: &Tile<T>, profile: &WavePacketProfile<T>, grid: &Grid<T>) -> Result<SampledFunction<T>> {
    let (spec, norm) = packet_spectrum(tile, profile, grid)?;
    if !(norm > T::zero()) {
        return Err(Error::Resolution("no frequency bin falls inside ω".into()));
    }
    let mut buf = vec![Complex::new(T::zero(), T::zero()); grid.len()];
    for (k, v) in spec {
        buf[k] = v / norm;
    }
    fft_in_place(&mut buf, true);
    SampledFunction::new(*grid, buf)
}

/// `c_M(φ) = sup_x Σ_{k≤M} (1+|x|)^M |φ^{(k)}(x)|` over the grid.
pub fn profile_seminorm<T: Real>(phi: &SampledFunction<T>, m: u32) -> Result<T> {
    let mut acc = vec![T::zero(); phi.len()];
    for k in 0..=m {
        let d = if k == 0 { phi.clone() } else { spectral_derivative(phi, k)? };
        for (a, v) in acc.iter_mut().zip(d.values()) {
            *a += v.norm();
        }
    }
    let g = phi.grid();
    Ok(acc
        .iter()
        .enumerate()
        .map(|(j, a)| (T::one() + g.x(j).abs()).powi(m as i32) * *a)
        .fold(T::zero(), T::max))
}
