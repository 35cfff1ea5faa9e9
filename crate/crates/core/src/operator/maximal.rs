use std::sync::Arc;

use num_complex::Complex;
use rayon::prelude::*;

use super::{eval_direct, PairLadder, TruncationLadder};
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::signal::SampledFunction;
use crate::symbol::Symbol;

fn real_output<T: Real>(f: &SampledFunction<T>, v: Vec<T>) -> Result<SampledFunction<T>> {
    SampledFunction::new(*f.grid(), v.into_iter().map(|x| Complex::new(x, T::zero())).collect())
}

/// `max_r |T_{σ·(1−φ(r(λ1α+λ2β)))}(f, g)(x)|` over the ladder, using the
/// symbol's singular line.
pub fn maximal_freq<T: Real>(
    sigma: &Symbol<T>,
    phi: impl Fn(T) -> T + Send + Sync + 'static,
    f: &SampledFunction<T>,
    g: &SampledFunction<T>,
    ladder: &TruncationLadder<T>,
) -> Result<SampledFunction<T>> {
    let line = *sigma
        .line()
        .ok_or_else(|| Error::Precondition(format!("symbol {} has no singular line", sigma.name())))?;
    f.grid().ensure_same(g.grid())?;
    let phi = Arc::new(phi);
    let outs: Result<Vec<SampledFunction<T>>> = ladder
        .radii()
        .par_iter()
        .map(|&r| {
            let p = phi.clone();
            let s = sigma.multiply("truncated", move |a, b| T::one() - p(r * line.form(a, b)));
            eval_direct(&s, f, g)
        })
        .collect();
    let mut best = vec![T::zero(); f.len()];
    for o in outs? {
        for (b, v) in best.iter_mut().zip(o.values()) {
            *b = b.max(v.norm());
        }
    }
    real_output(f, best)
}

/// `∫_0^r q` for `q` sampled at `t = m·h`, trapezoidal with a linearly
/// interpolated partial cell at the end.
fn trapezoid_to<T: Real>(r: T, h: T, q: impl Fn(usize) -> T) -> T {
    let u = r / h;
    let k = u.floor().to_usize().unwrap_or(0);
    let theta = u - T::of_usize(k);
    let half = T::lit(0.5);
    let mut s = T::zero();
    for m in 0..k {
        s += (q(m) + q(m + 1)) * half * h;
    }
    if theta > T::zero() {
        let qk = q(k);
        let qr = qk * (T::one() - theta) + q(k + 1) * theta;
        s += (qk + qr) * half * theta * h;
    }
    s
}

/// `max_{r} (1/r) ∫_{|t|≤r} |f(x−t) g(x+t)| dt` over ladder radii `≤ L`.
pub fn maximal_avg<T: Real>(
    f: &SampledFunction<T>,
    g: &SampledFunction<T>,
    l: T,
    ladder: &TruncationLadder<T>,
) -> Result<SampledFunction<T>> {
    f.grid().ensure_same(g.grid())?;
    if ladder.max() > l {
        return Err(Error::Parameter(format!("ladder radius {} exceeds L = {l}", ladder.max())));
    }
    let n = f.len() as isize;
    let h = f.grid().spacing();
    let fa: Vec<T> = f.values().iter().map(|v| v.norm()).collect();
    let ga: Vec<T> = g.values().iter().map(|v| v.norm()).collect();
    let at = |v: &[T], i: isize| v[i.rem_euclid(n) as usize];
    let out: Vec<T> = (0..n)
        .into_par_iter()
        .map(|j| {
            let mut best = T::zero();
            for &r in ladder.radii() {
                let right = trapezoid_to(r, h, |m| at(&fa, j - m as isize) * at(&ga, j + m as isize));
                let left = trapezoid_to(r, h, |m| at(&fa, j + m as isize) * at(&ga, j - m as isize));
                best = best.max((left + right) / r);
            }
            best
        })
        .collect();
    real_output(f, out)
}

/// `max_{(ε,r)} |∫_{ε≤|y|≤r} f(x−y) g(x+y) K(y) dy|` over the pair ladder.
/// The products `f(x∓y)g(x±y)` are interpolated linearly between grid
/// offsets; `K` is evaluated exactly and `±y` are paired before summing.
pub fn maximal_kernel<T: Real>(
    f: &SampledFunction<T>,
    g: &SampledFunction<T>,
    kernel: impl Fn(T) -> T + Sync,
    l: T,
    pairs: &PairLadder<T>,
) -> Result<SampledFunction<T>> {
    f.grid().ensure_same(g.grid())?;
    for &(e, r) in pairs.pairs() {
        if !(e > T::zero() && e < r && r <= l) {
            return Err(Error::Parameter(format!("malformed truncation pair (ε={e}, r={r}) for L={l}")));
        }
    }
    let n = f.len() as isize;
    let h = f.grid().spacing();
    let fv = f.values();
    let gv = g.values();
    let at = |v: &[Complex<T>], i: isize| v[i.rem_euclid(n) as usize];
    let out: Vec<T> = (0..n)
        .into_par_iter()
        .map(|j| {
            // paired integrand at offset y (real), products interpolated from grid offsets
            let prod = |m: isize| (at(fv, j - m) * at(gv, j + m), at(fv, j + m) * at(gv, j - m));
            let paired = |y: T| {
                let u = y / h;
                let k = u.floor().to_isize().unwrap_or(0);
                let th = u - T::from_isize(k).unwrap();
                let (p0, m0) = prod(k);
                let (p1, m1) = prod(k + 1);
                let plus = p0 * (T::one() - th) + p1 * th;
                let minus = m0 * (T::one() - th) + m1 * th;
                plus * kernel(y) + minus * kernel(-y)
            };
            let mut best = T::zero();
            for &(e, r) in pairs.pairs() {
                let mut knots = vec![e];
                let first = (e / h).floor().to_isize().unwrap_or(0) + 1;
                let mut m = first;
                while T::from_isize(m).unwrap() * h < r {
                    knots.push(T::from_isize(m).unwrap() * h);
                    m += 1;
                }
                knots.push(r);
                let mut acc = Complex::new(T::zero(), T::zero());
                let mut prev = paired(knots[0]);
                for w in knots.windows(2) {
                    let cur = paired(w[1]);
                    acc += (prev + cur) * (w[1] - w[0]) * T::lit(0.5);
                    prev = cur;
                }
                best = best.max(acc.norm());
            }
            best
        })
        .collect();
    real_output(f, out)
}
