//! Polynomial-type weight classes `P_θ(l)`, weighted Lebesgue norms and the
//! Bessel potential `J_m = (Id − Δ)^{m/2}`.

mod class;

pub use class::{weight_class_check, weight_equiv_check, ClassScan, PairScan, WeightClassReport, WeightEquivReport};

use std::fmt;
use std::sync::Arc;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::signal::{lp_norm, spectral_multiplier, Exponent, SampledFunction};

/// Named weights, as written in configuration files.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum WeightSpec {
    Const { value: f64 },
    /// `(1 + |x|)^{sign·alpha}`.
    Poly { alpha: f64, sign: i8 },
    /// `e^{rate·|x|}`.
    Exp { rate: f64 },
}

/// Nonnegative weight with a declared class `P_θ(l)`.
#[derive(Clone)]
pub struct Weight<T> {
    name: String,
    eval: Arc<dyn Fn(T) -> T + Send + Sync>,
    pub theta: T,
    pub scale: T,
}

impl<T> fmt::Debug for Weight<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Weight").field("name", &self.name).finish()
    }
}

impl<T: Real> Weight<T> {
    pub fn new(name: impl Into<String>, theta: T, scale: T, eval: impl Fn(T) -> T + Send + Sync + 'static) -> Result<Self> {
        if !(theta >= T::zero()) || !(scale > T::zero()) {
            return Err(Error::Parameter(format!("need θ ≥ 0 and l > 0, got θ = {theta}, l = {scale}")));
        }
        Ok(Self { name: name.into(), eval: Arc::new(eval), theta, scale })
    }

    pub fn constant(c: T) -> Self {
        Self::new(format!("const {c}"), T::zero(), T::one(), move |_| c).expect("valid")
    }

    /// Weight from a spec, declared in `P_θ(1)`.
    pub fn from_spec(spec: &WeightSpec, theta: T) -> Result<Self> {
        match *spec {
            WeightSpec::Const { value } => {
                let c = T::lit(value);
                Self::new(format!("const {value}"), theta, T::one(), move |_| c)
            }
            WeightSpec::Poly { alpha, sign } => {
                if sign != 1 && sign != -1 {
                    return Err(Error::Parameter(format!("sign must be ±1, got {sign}")));
                }
                let e = T::lit(alpha * sign as f64);
                Self::new(format!("(1+|x|)^{}", alpha * sign as f64), theta, T::one(), move |x: T| (T::one() + x.abs()).powf(e))
            }
            WeightSpec::Exp { rate } => {
                let r = T::lit(rate);
                Self::new(format!("exp({rate}|x|)"), theta, T::one(), move |x: T| (r * x.abs()).exp())
            }
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn eval(&self, x: T) -> T {
        (self.eval)(x)
    }
}

/// `(Σ |f|^p ω h)^{1/p}` over `region`; for `p = ∞` the sup of `|f|` where `ω > 0`.
pub fn weighted_lp_norm<T: Real>(f: &SampledFunction<T>, p: Exponent<T>, w: &Weight<T>, region: Option<&[bool]>) -> Result<T> {
    let g = f.grid();
    let mut weights = Vec::with_capacity(f.len());
    for j in 0..f.len() {
        let x = g.x(j);
        let v = w.eval(x);
        if !(v >= T::zero()) {
            return Err(Error::Invariant(format!("weight {} is {v} at x = {x}", w.name)));
        }
        weights.push(v);
    }
    match p.validate()? {
        Exponent::Infinity => {
            let mask: Vec<bool> = (0..f.len()).map(|j| weights[j] > T::zero() && region.map_or(true, |r| r[j])).collect();
            lp_norm(f, Exponent::Infinity, Some(&mask))
        }
        Exponent::Finite(pp) => {
            if let Some(r) = region {
                if r.len() != f.len() {
                    return Err(Error::Shape(format!("region length {} vs {}", r.len(), f.len())));
                }
            }
            let sum = f
                .values()
                .iter()
                .zip(&weights)
                .enumerate()
                .filter(|(j, _)| region.map_or(true, |r| r[*j]))
                .fold(T::zero(), |acc, (_, (v, w))| acc + v.norm().powf(pp) * *w);
            Ok((sum * g.spacing()).powf(T::one() / pp))
        }
    }
}

/// Multiplier `(1 + 4π²ξ²)^{m/2}` (ξ in cycles).
pub fn bessel_multiplier<T: Real>(xi: T, m: T) -> T {
    let w = T::two_pi() * xi;
    (T::one() + w * w).powf(m / T::lit(2.0))
}

/// `J_m f = (Id − Δ)^{m/2} f`, computed spectrally.
pub fn sobolev_jm<T: Real>(f: &SampledFunction<T>, m: T) -> Result<SampledFunction<T>> {
    spectral_multiplier(f, |xi| Complex::new(bessel_multiplier(xi, m), T::zero()))
}

/// `‖J_m f‖_{L^p(ω)}`.
pub fn sobolev_norm<T: Real>(f: &SampledFunction<T>, m: T, p: Exponent<T>, w: &Weight<T>) -> Result<T> {
    weighted_lp_norm(&sobolev_jm(f, m)?, p, w, None)
}
