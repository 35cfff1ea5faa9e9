//! Evaluation of `T_σ(f, g)(x) = ∫∫ e^{ix(α+β)} σ(x, α, β) f̂(α) ĝ(β) dα dβ` on
//! periodic grids, kernels, the truncated bilinear Hilbert transform, maximal
//! variants and the derivation identity.

mod derivation;
mod hilbert;
mod kernel;
mod ladder;
mod maximal;

pub use derivation::{derivation_identity_check, x_derivative_symbol, DerivationReport};
pub use hilbert::{bht_truncated, BhtQuadrature};
pub use kernel::{fit_decay, kernel_from_symbol, BilinearKernel, DecayFit, KernelBox, Window};
pub use ladder::{PairLadder, TruncationLadder};
pub use maximal::{maximal_avg, maximal_freq, maximal_kernel};

use num_complex::Complex;
use rayon::prelude::*;

use crate::error::Result;
use crate::scalar::Real;
use crate::signal::fourier::fft_in_place;
use crate::signal::{dft_forward, SampledFunction};
use crate::symbol::Symbol;

/// Evaluation route for [`eval_direct`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvalPath {
    /// Fast path when the symbol is `x`-independent, reference otherwise.
    Auto,
    /// `O(n³)` double sum at every grid point.
    Reference,
    /// `O(n²)` diagonal sums plus one inverse FFT; `x`-independent symbols only.
    Fast,
}

/// `T_σ(f, g)` on the common grid of `f` and `g`.
pub fn eval_direct<T: Real>(sigma: &Symbol<T>, f: &SampledFunction<T>, g: &SampledFunction<T>) -> Result<SampledFunction<T>> {
    eval_with(sigma, f, g, EvalPath::Auto)
}

pub fn eval_with<T: Real>(
    sigma: &Symbol<T>,
    f: &SampledFunction<T>,
    g: &SampledFunction<T>,
    path: EvalPath,
) -> Result<SampledFunction<T>> {
    f.grid().ensure_same(g.grid())?;
    let fast = match path {
        EvalPath::Auto => !sigma.is_x_dependent(),
        EvalPath::Reference => false,
        EvalPath::Fast => {
            if sigma.is_x_dependent() {
                return Err(crate::Error::Precondition(format!(
                    "fast path needs an x-independent symbol, {} depends on x",
                    sigma.name()
                )));
            }
            true
        }
    };
    if fast {
        eval_fast(sigma, f, g)
    } else {
        eval_reference(sigma, f, g)
    }
}

fn unit_roots<T: Real>(n: usize) -> Vec<Complex<T>> {
    (0..n).map(|k| Complex::from_polar(T::one(), T::two_pi() * T::of_usize(k) / T::of_usize(n))).collect()
}

/// Reference double sum, one grid point per task.
pub fn eval_reference<T: Real>(
    sigma: &Symbol<T>,
    f: &SampledFunction<T>,
    g: &SampledFunction<T>,
) -> Result<SampledFunction<T>> {
    f.grid().ensure_same(g.grid())?;
    let grid = *f.grid();
    let n = grid.len();
    let ff = dft_forward(f)?;
    let gg = dft_forward(g)?;
    let (fv, gv) = (ff.values(), gg.values());
    let w: Vec<T> = (0..n).map(|k| grid.angular_freq(k)).collect();
    let roots = unit_roots::<T>(n);
    let inv_n = T::one() / T::of_usize(n);
    let out: Result<Vec<Complex<T>>> = (0..n)
        .into_par_iter()
        .map(|j| {
            let x = grid.x(j);
            let mut acc = Complex::new(T::zero(), T::zero());
            for a in 0..n {
                if fv[a] == Complex::new(T::zero(), T::zero()) {
                    continue;
                }
                let mut row = Complex::new(T::zero(), T::zero());
                for b in 0..n {
                    let s = sigma.eval_checked(x, w[a], w[b])?;
                    row += s * gv[b] * roots[((a + b) * j) % n];
                }
                acc += fv[a] * row;
            }
            Ok(acc * inv_n)
        })
        .collect();
    SampledFunction::new(grid, out?)
}

/// Diagonal-sum evaluation for `x`-independent symbols:
/// `H_c = Σ_a σ(ω_a, ω_{c−a}) F_a G_{c−a}`, then an inverse DFT.
pub fn eval_fast<T: Real>(sigma: &Symbol<T>, f: &SampledFunction<T>, g: &SampledFunction<T>) -> Result<SampledFunction<T>> {
    f.grid().ensure_same(g.grid())?;
    let grid = *f.grid();
    let n = grid.len();
    let ff = dft_forward(f)?;
    let gg = dft_forward(g)?;
    let (fv, gv) = (ff.values(), gg.values());
    let w: Vec<T> = (0..n).map(|k| grid.angular_freq(k)).collect();
    let x0 = grid.x(0);
    let table: Result<Vec<Vec<Complex<T>>>> = (0..n)
        .into_par_iter()
        .map(|a| (0..n).map(|b| sigma.eval_checked(x0, w[a], w[b])).collect())
        .collect();
    let table = table?;
    let mut h: Vec<Complex<T>> = (0..n)
        .into_par_iter()
        .map(|c| {
            let mut acc = Complex::new(T::zero(), T::zero());
            for a in 0..n {
                let b = (c + n - a) % n;
                acc += table[a][b] * fv[a] * gv[b];
            }
            acc
        })
        .collect();
    fft_in_place(&mut h, true);
    let s = T::one() / T::of_usize(n).sqrt();
    SampledFunction::new(grid, h.into_iter().map(|v| v * s).collect())
}
