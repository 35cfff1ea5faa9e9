use serde::{Deserialize, Serialize};

use super::SampledFunction;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Lebesgue exponent in `(0, ∞]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Exponent<T> {
    Finite(T),
    Infinity,
}

impl<T: Real> Exponent<T> {
    pub fn validate(self) -> Result<Self> {
        match self {
            Exponent::Finite(p) if !(p > T::zero()) || !p.is_finite() => {
                Err(Error::Parameter(format!("exponent must lie in (0, ∞], got {p}")))
            }
            e => Ok(e),
        }
    }

    /// `1/p`, zero for `p = ∞`.
    pub fn reciprocal(self) -> T {
        match self {
            Exponent::Finite(p) => T::one() / p,
            Exponent::Infinity => T::zero(),
        }
    }
}

/// Riemann-sum `L^p` norm over `region` (all points when `None`).
/// Returns the norm and whether the region was empty.
pub fn lp_norm_flagged<T: Real>(
    f: &SampledFunction<T>,
    p: Exponent<T>,
    region: Option<&[bool]>,
) -> Result<(T, bool)> {
    let p = p.validate()?;
    if let Some(m) = region {
        if m.len() != f.len() {
            return Err(Error::Shape(format!("mask length {} does not match grid length {}", m.len(), f.len())));
        }
    }
    let inside = |j: usize| region.map_or(true, |m| m[j]);
    let vals = f.values().iter().enumerate().filter(|(j, _)| inside(*j)).map(|(_, v)| v.norm());
    let mut any = false;
    let norm = match p {
        Exponent::Infinity => vals.fold(T::zero(), |acc, v| {
            any = true;
            acc.max(v)
        }),
        Exponent::Finite(p) => {
            let s: T = vals
                .map(|v| {
                    any = true;
                    v.powf(p)
                })
                .sum();
            (s * f.grid().spacing()).powf(T::one() / p)
        }
    };
    if any {
        Ok((norm, false))
    } else {
        Ok((T::zero(), true))
    }
}

/// Riemann-sum `L^p` norm over `region`; an empty region gives 0.
pub fn lp_norm<T: Real>(f: &SampledFunction<T>, p: Exponent<T>, region: Option<&[bool]>) -> Result<T> {
    lp_norm_flagged(f, p, region).map(|(v, _)| v)
}
