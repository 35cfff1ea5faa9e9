use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::symbol::{smooth_step, Symbol};

/// Frequency roll-off applied before the oscillatory sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Window {
    Rectangular,
    Hann,
    /// Flat on `|t| ≤ 1/2`, smooth step down to 0 at `|t| = 1`.
    SmoothTaper,
}

impl Window {
    fn weight<T: Real>(self, t: T) -> T {
        let t = t.abs();
        match self {
            Window::Rectangular => T::one(),
            Window::Hann => {
                let c = (T::PI() * t).cos();
                c * c
            }
            Window::SmoothTaper => T::one() - smooth_step(T::lit(2.0) * t - T::one()),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Window::Rectangular => "rectangular",
            Window::Hann => "hann",
            Window::SmoothTaper => "smooth-taper",
        }
    }
}

/// Sampling box for [`kernel_from_symbol`]: spatial points `x`, symmetric
/// offsets `x − y` and `x − z` in `[-offset_max, offset_max]`, and the
/// frequency square `[-freq_max, freq_max]²`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelBox<T> {
    pub xs: Vec<T>,
    pub offset_max: T,
    pub offset_count: usize,
    pub freq_max: T,
    pub freq_count: usize,
    pub window: Window,
}

/// `K(x, y, z)` sampled at `y = x − u`, `z = x − v`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BilinearKernel<T> {
    pub xs: Vec<T>,
    /// Offsets `u = x − y` (also used for `v = x − z`).
    pub offsets: Vec<T>,
    /// `values[(ix·m + iu)·m + iv]`.
    pub values: Vec<Complex<T>>,
    pub window: Window,
    pub freq_max: T,
    pub freq_count: usize,
    /// Largest `|σ|` on the edge of the frequency box, before windowing.
    pub edge_symbol_max: T,
}

impl<T: Real> BilinearKernel<T> {
    pub fn at(&self, ix: usize, iu: usize, iv: usize) -> Complex<T> {
        let m = self.offsets.len();
        self.values[(ix * m + iu) * m + iv]
    }
}

/// `K(x,y,z) = (2π)^{-2} ∫∫ e^{i[α(x−y)+β(x−z)]} W(α/Ω) W(β/Ω) σ(x,α,β) dα dβ`
/// by the midpoint rule on the frequency square.
pub fn kernel_from_symbol<T: Real>(sigma: &Symbol<T>, bx: &KernelBox<T>) -> Result<BilinearKernel<T>> {
    if bx.freq_count == 0 || bx.offset_count == 0 || bx.xs.is_empty() {
        return Err(Error::Parameter("kernel box needs points on every axis".into()));
    }
    if !(bx.freq_max > T::zero()) || bx.offset_max < T::zero() {
        return Err(Error::Parameter("kernel box needs freq_max > 0 and offset_max ≥ 0".into()));
    }
    let m = bx.freq_count;
    let dw = T::lit(2.0) * bx.freq_max / T::of_usize(m);
    let freqs: Vec<T> = (0..m).map(|a| -bx.freq_max + (T::of_usize(a) + T::lit(0.5)) * dw).collect();
    let win: Vec<T> = freqs.iter().map(|w| bx.window.weight(*w / bx.freq_max)).collect();
    let mu = bx.offset_count;
    let offsets: Vec<T> = if mu == 1 {
        vec![T::zero()]
    } else {
        (0..mu).map(|i| -bx.offset_max + T::lit(2.0) * bx.offset_max * T::of_usize(i) / T::of_usize(mu - 1)).collect()
    };
    let norm = dw * dw / (T::two_pi() * T::two_pi());
    let mut edge = T::zero();
    let mut values = Vec::with_capacity(bx.xs.len() * mu * mu);
    for &x in &bx.xs {
        let mut s = vec![Complex::new(T::zero(), T::zero()); m * m];
        for a in 0..m {
            for b in 0..m {
                let v = sigma.eval_checked(x, freqs[a], freqs[b])?;
                if a == 0 || b == 0 || a == m - 1 || b == m - 1 {
                    edge = edge.max(v.norm());
                }
                s[a * m + b] = v * win[a] * win[b];
            }
        }
        let rows: Vec<Vec<Complex<T>>> = offsets
            .par_iter()
            .map(|&u| {
                let mut row = vec![Complex::new(T::zero(), T::zero()); m];
                for a in 0..m {
                    let e = Complex::from_polar(T::one(), freqs[a] * u);
                    for b in 0..m {
                        row[b] += s[a * m + b] * e;
                    }
                }
                offsets
                    .iter()
                    .map(|&v| {
                        let mut acc = Complex::new(T::zero(), T::zero());
                        for b in 0..m {
                            acc += row[b] * Complex::from_polar(T::one(), freqs[b] * v);
                        }
                        acc * norm
                    })
                    .collect()
            })
            .collect();
        for r in rows {
            values.extend(r);
        }
    }
    Ok(BilinearKernel {
        xs: bx.xs.clone(),
        offsets,
        values,
        window: bx.window,
        freq_max: bx.freq_max,
        freq_count: m,
        edge_symbol_max: edge,
    })
}

/// Power-law fit `|K| ≈ C (1+|u|+|v|)^{-M}` on the envelope of `|K|`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub exponent: f64,
    /// `(ρ, max |K|)` per nonempty shell.
    pub shells: Vec<(f64, f64)>,
}

/// Fits the decay exponent at spatial index `ix` over `ρ = 1+|u|+|v|` in
/// `[rho_min, rho_max]`, using the max of `|K|` over `shells` log-spaced
/// shells. With `direction = Some((d1, d2))` only samples within one offset
/// step of the line `t·(d1, d2)` are used.
pub fn fit_decay<T: Real>(
    k: &BilinearKernel<T>,
    ix: usize,
    direction: Option<(T, T)>,
    rho_min: f64,
    rho_max: f64,
    shells: usize,
) -> Result<DecayFit> {
    if ix >= k.xs.len() || !(rho_min >= 1.0 && rho_max > rho_min) || shells < 2 {
        return Err(Error::Parameter("decay fit needs a valid x index, 1 ≤ rho_min < rho_max, ≥ 2 shells".into()));
    }
    let m = k.offsets.len();
    let step = if m > 1 { (k.offsets[1] - k.offsets[0]).to_f64_lossy() } else { 1.0 };
    let mut env = vec![0.0f64; shells];
    let lr = (rho_max / rho_min).ln();
    for iu in 0..m {
        for iv in 0..m {
            let (u, v) = (k.offsets[iu].to_f64_lossy(), k.offsets[iv].to_f64_lossy());
            if let Some((d1, d2)) = direction {
                let (d1, d2) = (d1.to_f64_lossy(), d2.to_f64_lossy());
                let perp = (u * d2 - v * d1).abs() / d1.hypot(d2);
                if perp > step {
                    continue;
                }
            }
            let rho = 1.0 + u.abs() + v.abs();
            if rho < rho_min || rho >= rho_max {
                continue;
            }
            let s = (((rho / rho_min).ln() / lr) * shells as f64).floor() as usize;
            env[s.min(shells - 1)] = env[s.min(shells - 1)].max(k.at(ix, iu, iv).norm().to_f64_lossy());
        }
    }
    let pts: Vec<(f64, f64)> = env
        .iter()
        .enumerate()
        .filter(|(_, e)| **e > 0.0)
        .map(|(s, e)| (rho_min * (lr * (s as f64 + 0.5) / shells as f64).exp(), *e))
        .collect();
    if pts.len() < 2 {
        return Err(Error::Precondition("decay fit found fewer than two populated shells".into()));
    }
    let n = pts.len() as f64;
    let (sx, sy) = pts.iter().fold((0.0, 0.0), |(a, b), (r, e)| (a + r.ln(), b + e.ln()));
    let (mx, my) = (sx / n, sy / n);
    let (mut num, mut den) = (0.0, 0.0);
    for (r, e) in &pts {
        num += (r.ln() - mx) * (e.ln() - my);
        den += (r.ln() - mx).powi(2);
    }
    Ok(DecayFit { exponent: -num / den, shells: pts })
}
