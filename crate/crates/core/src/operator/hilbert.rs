use num_complex::Complex;
use rayon::prelude::*;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::signal::{dft_forward, SampledFunction};
use crate::symbol::SingularLine;

/// Composite Gauss–Legendre rule on `[ε, R]` for the `dy/y` integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BhtQuadrature<T> {
    /// Nodes per panel.
    pub order: usize,
    /// Largest panel width; defaults to `h / max(|λ1|, |λ2|)`.
    pub max_panel: Option<T>,
    /// Panel width is also capped at this fraction of its left end.
    pub relative_panel: T,
}

impl<T: Real> Default for BhtQuadrature<T> {
    fn default() -> Self {
        Self { order: 8, max_panel: None, relative_panel: T::lit(0.25) }
    }
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub(crate) fn gauss_legendre(m: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(m);
    for i in 0..m {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=m {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            if m == 1 {
                p0 = 1.0;
            }
            dp = m as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out
}

/// `∫_{ε≤|y|≤R} f(x−λ1y) g(x−λ2y) dy/y` at every grid point. Off-grid values
/// come from trigonometric interpolation; each `+y` node is paired with `−y`
/// before summation.
pub fn bht_truncated<T: Real>(
    f: &SampledFunction<T>,
    g: &SampledFunction<T>,
    line: &SingularLine<T>,
    eps: T,
    r: T,
    quad: &BhtQuadrature<T>,
) -> Result<SampledFunction<T>> {
    f.grid().ensure_same(g.grid())?;
    if !(eps > T::zero() && eps < r) || !r.is_finite() {
        return Err(Error::Parameter(format!("truncation needs 0 < ε < R, got ε={eps}, R={r}")));
    }
    if quad.order == 0 || !(quad.relative_panel > T::zero()) {
        return Err(Error::Parameter("quadrature order and relative panel must be positive".into()));
    }
    let grid = *f.grid();
    let n = grid.len();
    let lam = line.l1().abs().max(line.l2().abs());
    let max_panel = quad.max_panel.unwrap_or(grid.spacing() / lam);

    let mut nodes: Vec<(T, T)> = Vec::new();
    let rule = gauss_legendre(quad.order);
    let mut a = eps;
    while a < r {
        let b = (a + max_panel.min(quad.relative_panel * a)).min(r);
        let (mid, half) = ((a + b) / T::lit(2.0), (b - a) / T::lit(2.0));
        for &(t, w) in &rule {
            nodes.push((mid + half * T::lit(t), half * T::lit(w)));
        }
        a = b;
    }

    let ff = dft_forward(f)?;
    let gg = dft_forward(g)?;
    let omega: Vec<T> = (0..n).map(|k| grid.angular_freq(k)).collect();
    let plan = FftPlanner::<T>::new().plan_fft_inverse(n);
    let scale = T::one() / T::of_usize(n).sqrt();
    let shifted = |spec: &[Complex<T>], s: T, buf: &mut Vec<Complex<T>>| {
        buf.clear();
        buf.extend(spec.iter().zip(&omega).map(|(v, w)| *v * Complex::from_polar(scale, -*w * s)));
        plan.process(buf);
    };

    let chunk = 32;
    let partials: Vec<Vec<Complex<T>>> = nodes
        .par_chunks(chunk)
        .map(|ch| {
            let mut acc = vec![Complex::new(T::zero(), T::zero()); n];
            let (mut fp, mut gp, mut fm, mut gm) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
            for &(y, w) in ch {
                shifted(ff.values(), line.l1() * y, &mut fp);
                shifted(gg.values(), line.l2() * y, &mut gp);
                shifted(ff.values(), -line.l1() * y, &mut fm);
                shifted(gg.values(), -line.l2() * y, &mut gm);
                let c = w / y;
                for j in 0..n {
                    acc[j] += (fp[j] * gp[j] - fm[j] * gm[j]) * c;
                }
            }
            acc
        })
        .collect();
    let mut out = vec![Complex::new(T::zero(), T::zero()); n];
    for p in partials {
        for (o, v) in out.iter_mut().zip(p) {
            *o += v;
        }
    }
    SampledFunction::new(grid, out)
}
