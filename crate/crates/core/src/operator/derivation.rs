use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::eval_direct;
use crate::error::Result;
use crate::scalar::Real;
use crate::signal::{spectral_derivative, SampledFunction};
use crate::symbol::{Symbol, SymbolClass};

/// Outcome of comparing `D^n T_σ(f, g)` with the Leibniz-type expansion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DerivationReport {
    pub order: u32,
    /// `max |D^n T_σ(f, g)|`.
    pub lhs_max: f64,
    /// Max abs difference between the two sides.
    pub discrepancy: f64,
    /// Number of `(i, j, k)` terms summed.
    pub terms: usize,
}

// eighth-order central stencils, offsets 1..=4
const D1: [f64; 4] = [4.0 / 5.0, -1.0 / 5.0, 4.0 / 105.0, -1.0 / 280.0];
const D2_CENTER: f64 = -205.0 / 72.0;
const D2: [f64; 4] = [8.0 / 5.0, -1.0 / 5.0, 8.0 / 315.0, -1.0 / 560.0];

fn fd_first<T: Real>(s: &Symbol<T>, d: T, use_dx: bool, x: T, a: T, b: T) -> Complex<T> {
    let ev = |x: T| if use_dx { s.eval_dx(x, a, b).expect("x-derivative") } else { s.eval(x, a, b) };
    let mut acc = Complex::new(T::zero(), T::zero());
    for (m, c) in D1.iter().enumerate() {
        let o = d * T::of_usize(m + 1);
        acc += (ev(x + o) - ev(x - o)) * T::lit(*c);
    }
    acc / d
}

fn fd_second<T: Real>(s: &Symbol<T>, d: T, x: T, a: T, b: T) -> Complex<T> {
    let mut acc = s.eval(x, a, b) * T::lit(D2_CENTER);
    for (m, c) in D2.iter().enumerate() {
        let o = d * T::of_usize(m + 1);
        acc += (s.eval(x + o, a, b) + s.eval(x - o, a, b)) * T::lit(*c);
    }
    acc / (d * d)
}

/// `∂_x^k σ`: exact when the symbol is `x`-independent or `k = 1` with a
/// supplied derivative; otherwise eighth-order central differences with step
/// `step` (applied to the supplied derivative when there is one).
pub fn x_derivative_symbol<T: Real>(sigma: &Symbol<T>, k: u32, step: T) -> Result<Symbol<T>> {
    if k == 0 {
        return Ok(sigma.clone());
    }
    let name = format!("d^{k}_x {}", sigma.name());
    if !sigma.is_x_dependent() {
        return Ok(Symbol::x_independent(name, sigma.class(), |_, _| Complex::new(T::zero(), T::zero())));
    }
    let s = sigma.clone();
    let class = SymbolClass::Hormander;
    match (k, sigma.has_x_derivative()) {
        (1, true) => Ok(Symbol::new(name, class, move |x, a, b| s.eval_dx(x, a, b).expect("x-derivative"))),
        (1, false) => Ok(Symbol::new(name, class, move |x, a, b| fd_first(&s, step, false, x, a, b))),
        (2, true) => Ok(Symbol::new(name, class, move |x, a, b| fd_first(&s, step, true, x, a, b))),
        (2, false) => Ok(Symbol::new(name, class, move |x, a, b| fd_second(&s, step, x, a, b))),
        _ => {
            let inner = x_derivative_symbol(sigma, k - 2, step)?;
            Ok(Symbol::new(name, class, move |x, a, b| fd_second(&inner, step, x, a, b)))
        }
    }
}

fn multinomial(n: u32, i: u32, j: u32, k: u32) -> f64 {
    let fact = |m: u32| (1..=m).map(f64::from).product::<f64>();
    fact(n) / (fact(i) * fact(j) * fact(k))
}

/// Compares `D^n T_σ(f, g)` with `Σ_{i+j+k=n} n!/(i!j!k!) T_{∂_x^k σ}(D^i f, D^j g)`.
/// Inputs should be band-limited well inside the grid so that neither side
/// aliases.
pub fn derivation_identity_check<T: Real>(
    sigma: &Symbol<T>,
    f: &SampledFunction<T>,
    g: &SampledFunction<T>,
    order: u32,
    step: T,
) -> Result<DerivationReport> {
    let lhs = spectral_derivative(&eval_direct(sigma, f, g)?, order)?;
    let mut rhs = SampledFunction::zeros(*f.grid());
    let mut terms = 0;
    for k in 0..=order {
        if k > 0 && !sigma.is_x_dependent() {
            continue;
        }
        let dk = x_derivative_symbol(sigma, k, step)?;
        for i in 0..=order - k {
            let j = order - k - i;
            let term = eval_direct(&dk, &spectral_derivative(f, i)?, &spectral_derivative(g, j)?)?;
            rhs = rhs.add(&term.scale(Complex::new(T::lit(multinomial(order, i, j, k)), T::zero())))?;
            terms += 1;
        }
    }
    Ok(DerivationReport {
        order,
        lhs_max: lhs.max_abs().to_f64_lossy(),
        discrepancy: lhs.max_abs_diff(&rhs)?.to_f64_lossy(),
        terms,
    })
}
