//! Bilinear symbols `σ(x, α, β)`, their singular lines, class checks and the
//! cutoff and modulation manipulations used to reduce to model operators.
//!
//! Frequencies passed to a symbol are angular: the operator pairs `σ(x, α, β)`
//! with `e^{ix(α+β)}`.

mod class;
mod cutoff;
mod table;

pub use class::{class_verify, ClassCheck, ClassEntry, ClassReport, SampleBox};
pub use cutoff::{smooth_step, standard_cutoff};
pub use table::{read_tabulated, tabulated_symbol, write_tabulated, Axis};

use std::fmt;
use std::sync::Arc;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::signal::SampledFunction;

/// Nondegenerate line `λ1 α + λ2 β = 0` in the frequency plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SingularLine<T> {
    l1: T,
    l2: T,
}

impl<T: Real> SingularLine<T> {
    pub fn new(l1: T, l2: T) -> Result<Self> {
        if l1 == T::zero() || l2 == T::zero() || l1 == l2 || !l1.is_finite() || !l2.is_finite() {
            return Err(Error::Invariant(format!(
                "singular line needs λ1, λ2 finite, nonzero and distinct; got ({l1}, {l2})"
            )));
        }
        Ok(Self { l1, l2 })
    }

    /// The line `α = β` (`λ = (1, −1)`) of the bilinear Hilbert transform.
    pub fn bht() -> Self {
        Self { l1: T::one(), l2: -T::one() }
    }

    pub fn l1(&self) -> T {
        self.l1
    }

    pub fn l2(&self) -> T {
        self.l2
    }

    /// `λ1 α + λ2 β`.
    pub fn form(&self, alpha: T, beta: T) -> T {
        self.l1 * alpha + self.l2 * beta
    }

    /// `sqrt(λ1² + λ2²)`.
    pub fn norm(&self) -> T {
        self.l1.hypot(self.l2)
    }

    /// Mirror image of `(α, β)` across the line.
    pub fn reflect(&self, alpha: T, beta: T) -> (T, T) {
        let t = T::lit(2.0) * self.form(alpha, beta) / (self.l1 * self.l1 + self.l2 * self.l2);
        (alpha - t * self.l1, beta - t * self.l2)
    }
}

/// Euclidean distance from `(α, β)` to the line.
pub fn dist_to_line<T: Real>(alpha: T, beta: T, line: &SingularLine<T>) -> T {
    line.form(alpha, beta).abs() / line.norm()
}

/// Decay condition a symbol is declared to satisfy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SymbolClass {
    /// `|∂σ| ≲ (1 + |α| + |β|)^{-b-c}`.
    Hormander,
    /// `|∂σ| ≲ (1 + d((α,β), Δ))^{-b-c}`.
    Line,
    /// `|∂σ| ≲ (s + d((α,β), Δ))^{-b-c}` with `s` the symbol's scale.
    LineScaled,
}

pub type SymbolFn<T> = Arc<dyn Fn(T, T, T) -> Complex<T> + Send + Sync>;

/// Black-box evaluator `σ(x, α, β)` with class metadata.
#[derive(Clone)]
pub struct Symbol<T> {
    name: String,
    eval: SymbolFn<T>,
    dx: Option<SymbolFn<T>>,
    line: Option<SingularLine<T>>,
    scale: T,
    x_dependent: bool,
    class: SymbolClass,
}

impl<T: Real> fmt::Debug for Symbol<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Symbol")
            .field("name", &self.name)
            .field("line", &self.line)
            .field("scale", &self.scale)
            .field("x_dependent", &self.x_dependent)
            .field("class", &self.class)
            .field("has_dx", &self.dx.is_some())
            .finish()
    }
}

impl<T: Real> Symbol<T> {
    /// Symbol depending on `(x, α, β)`.
    pub fn new(
        name: impl Into<String>,
        class: SymbolClass,
        f: impl Fn(T, T, T) -> Complex<T> + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            eval: Arc::new(f),
            dx: None,
            line: None,
            scale: T::one(),
            x_dependent: true,
            class,
        }
    }

    /// Symbol of `(α, β)` only.
    pub fn x_independent(
        name: impl Into<String>,
        class: SymbolClass,
        f: impl Fn(T, T) -> Complex<T> + Send + Sync + 'static,
    ) -> Self {
        let mut s = Self::new(name, class, move |_, a, b| f(a, b));
        s.x_dependent = false;
        s.dx = Some(Arc::new(|_, _, _| Complex::new(T::zero(), T::zero())));
        s
    }

    pub fn constant(c: Complex<T>) -> Self {
        Self::x_independent("constant", SymbolClass::Hormander, move |_, _| c)
    }

    pub fn with_line(mut self, line: SingularLine<T>) -> Self {
        self.line = Some(line);
        self
    }

    pub fn with_scale(mut self, scale: T) -> Self {
        self.scale = scale;
        self
    }

    pub fn with_class(mut self, class: SymbolClass) -> Self {
        self.class = class;
        self
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// Attaches an exact `∂_x σ`.
    pub fn with_x_derivative(mut self, d: impl Fn(T, T, T) -> Complex<T> + Send + Sync + 'static) -> Self {
        self.dx = Some(Arc::new(d));
        self
    }

    #[inline]
    pub fn eval(&self, x: T, alpha: T, beta: T) -> Complex<T> {
        (self.eval)(x, alpha, beta)
    }

    /// Evaluates and rejects non-finite values.
    pub fn eval_checked(&self, x: T, alpha: T, beta: T) -> Result<Complex<T>> {
        let v = self.eval(x, alpha, beta);
        if v.re.is_finite() && v.im.is_finite() {
            Ok(v)
        } else {
            Err(Error::Evaluation {
                point: format!("(x={x}, α={alpha}, β={beta})"),
                message: format!("symbol {} returned {v}", self.name),
            })
        }
    }

    /// Exact `∂_x σ` when one was supplied.
    pub fn eval_dx(&self, x: T, alpha: T, beta: T) -> Option<Complex<T>> {
        self.dx.as_ref().map(|d| d(x, alpha, beta))
    }

    pub fn has_x_derivative(&self) -> bool {
        self.dx.is_some()
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn line(&self) -> Option<&SingularLine<T>> {
        self.line.as_ref()
    }

    pub fn scale(&self) -> T {
        self.scale
    }

    pub fn is_x_dependent(&self) -> bool {
        self.x_dependent
    }

    pub fn class(&self) -> SymbolClass {
        self.class
    }

    /// Pointwise product with an `x`-independent factor `m(α, β)`.
    pub fn multiply(&self, name: impl Into<String>, m: impl Fn(T, T) -> T + Send + Sync + 'static) -> Self {
        let m = Arc::new(m);
        let e = self.eval.clone();
        let m1 = m.clone();
        let mut out = Self {
            name: name.into(),
            eval: Arc::new(move |x, a, b| e(x, a, b) * m1(a, b)),
            dx: None,
            line: self.line,
            scale: self.scale,
            x_dependent: self.x_dependent,
            class: self.class,
        };
        if let Some(d) = self.dx.clone() {
            out.dx = Some(Arc::new(move |x, a, b| d(x, a, b) * m(a, b)));
        }
        out
    }

    /// `e^{i·k·x} σ(x, α, β)`.
    pub fn times_exp_ix(&self, k: T) -> Self {
        let e = self.eval.clone();
        let ev: SymbolFn<T> = Arc::new(move |x, a, b| e(x, a, b) * Complex::from_polar(T::one(), k * x));
        let dx: Option<SymbolFn<T>> = self.dx.clone().map(|d| {
            let e = self.eval.clone();
            Arc::new(move |x: T, a: T, b: T| {
                let ph = Complex::from_polar(T::one(), k * x);
                (d(x, a, b) + e(x, a, b) * Complex::new(T::zero(), k)) * ph
            }) as SymbolFn<T>
        });
        Self {
            name: format!("exp(i{k}x)·{}", self.name),
            eval: ev,
            dx,
            line: self.line,
            scale: self.scale,
            x_dependent: true,
            class: self.class,
        }
    }

    /// Samples `(α_a, β_b) ↦ σ(x, α_a, β_b)` at fixed `x`.
    pub fn table(&self, x: T, alphas: &[T], betas: &[T]) -> Vec<Complex<T>> {
        let mut out = Vec::with_capacity(alphas.len() * betas.len());
        for &a in alphas {
            for &b in betas {
                out.push(self.eval(x, a, b));
            }
        }
        out
    }
}

/// `σ0 = σ·Φ(λ1α+λ2β)` and `σ∞ = σ·(1 − Φ(λ1α+λ2β))`.
pub fn split_low_high<T: Real>(
    sigma: &Symbol<T>,
    line: &SingularLine<T>,
    cutoff: impl Fn(T) -> T + Send + Sync + 'static,
) -> (Symbol<T>, Symbol<T>) {
    let cutoff = Arc::new(cutoff);
    let (l0, c0) = (*line, cutoff.clone());
    let low = sigma.multiply(format!("{}^0", sigma.name), move |a, b| c0(l0.form(a, b)));
    let l1 = *line;
    let high = sigma.multiply(format!("{}^inf", sigma.name), move |a, b| T::one() - cutoff(l1.form(a, b)));
    (low, high)
}

/// `τ(x, α, β) = σ(x, α + s, β − s)`; see [`modulate_inputs`] for the matching inputs.
pub fn modulate_symbol<T: Real>(sigma: &Symbol<T>, shift: T) -> Symbol<T> {
    let e = sigma.eval.clone();
    let dx = sigma.dx.clone().map(|d| Arc::new(move |x, a, b| d(x, a + shift, b - shift)) as SymbolFn<T>);
    Symbol {
        name: format!("{}[shift {shift}]", sigma.name),
        eval: Arc::new(move |x, a, b| e(x, a + shift, b - shift)),
        dx,
        line: sigma.line,
        scale: sigma.scale,
        x_dependent: sigma.x_dependent,
        class: sigma.class,
    }
}

/// Inputs pairing with [`modulate_symbol`]: `(e^{−isx} f, e^{isx} g)`, so that
/// `T_τ(e^{−isx}f, e^{isx}g) = T_σ(f, g)`.
pub fn modulate_inputs<T: Real>(
    f: &SampledFunction<T>,
    g: &SampledFunction<T>,
    shift: T,
) -> (SampledFunction<T>, SampledFunction<T>) {
    (f.modulate(-shift), g.modulate(shift))
}

/// `iπ·sign(λ1α + λ2β)` with `sign(0) = 0`.
pub fn bht_sign_symbol<T: Real>(line: &SingularLine<T>) -> Symbol<T> {
    let l = *line;
    Symbol::x_independent("bht_sign", SymbolClass::Line, move |a, b| {
        let s = l.form(a, b);
        let v = if s > T::zero() {
            T::PI()
        } else if s < T::zero() {
            -T::PI()
        } else {
            T::zero()
        };
        Complex::new(T::zero(), v)
    })
    .with_line(*line)
}

/// Multiplies by a smooth factor equal to 0 where `d((α,β),Δ) ≤ 1/(2L)` and
/// to 1 where `d ≥ 1/L`. The result carries scale `1/L`.
pub fn truncate_near_line<T: Real>(sigma: &Symbol<T>, line: &SingularLine<T>, l: T) -> Result<Symbol<T>> {
    if !(l > T::zero()) || !l.is_finite() {
        return Err(Error::Parameter(format!("truncation scale must be positive, got {l}")));
    }
    let ln = *line;
    let out = sigma
        .multiply(format!("{}|trunc {l}", sigma.name), move |a, b| {
            smooth_step(T::lit(2.0) * l * dist_to_line(a, b, &ln) - T::one())
        })
        .with_line(*line)
        .with_scale(T::one() / l)
        .with_class(SymbolClass::LineScaled);
    Ok(out)
}
