use serde::{Deserialize, Serialize};

use super::{dist_to_line, Symbol, SymbolClass};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Sampling region for [`class_verify`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleBox<T> {
    pub x: (T, T),
    pub alpha: (T, T),
    pub beta: (T, T),
    /// Points per frequency axis.
    pub samples: usize,
    /// Points along `x` (ignored for `x`-independent symbols).
    pub x_samples: usize,
}

impl<T: Real> SampleBox<T> {
    /// `[-r, r]²` in frequency, `x = 0`.
    pub fn square(r: T, samples: usize) -> Self {
        Self { x: (T::zero(), T::zero()), alpha: (-r, r), beta: (-r, r), samples, x_samples: 1 }
    }
}

/// Finite-difference settings for [`class_verify`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassCheck<T> {
    /// Highest order per variable.
    pub max_order: usize,
    pub step: T,
    /// A constant above this fails the check.
    pub ceiling: T,
    /// Points closer than this to the singular line are skipped; defaults to
    /// `2·step·max_order`.
    pub exclusion: Option<T>,
}

impl<T: Real> Default for ClassCheck<T> {
    fn default() -> Self {
        Self { max_order: 2, step: T::lit(0.05), ceiling: T::lit(1e3), exclusion: None }
    }
}

/// Empirical constant for one derivative `∂_x^a ∂_α^b ∂_β^c`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassEntry {
    pub order: [usize; 3],
    /// Weighted by the declared class.
    pub constant: f64,
    /// Weighted by the homogeneous variant (`d^{b+c}` or `(|α|+|β|)^{b+c}`).
    pub homogeneous: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassReport {
    pub class: SymbolClass,
    pub entries: Vec<ClassEntry>,
    pub pass: bool,
    pub homogeneous_pass: bool,
    pub samples_used: usize,
    pub samples_skipped: usize,
}

impl ClassReport {
    pub fn entry(&self, a: usize, b: usize, c: usize) -> Option<&ClassEntry> {
        self.entries.iter().find(|e| e.order == [a, b, c])
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn linspace<T: Real>((lo, hi): (T, T), n: usize) -> Vec<T> {
    if n <= 1 {
        return vec![(lo + hi) / T::lit(2.0)];
    }
    (0..n).map(|i| lo + (hi - lo) * T::of_usize(i) / T::of_usize(n - 1)).collect()
}

/// Estimates the constants in the declared decay condition by central finite
/// differences over `bx`. Every `(a, b, c)` with each order `≤ max_order` is
/// reported under both the declared and the homogeneous weighting.
pub fn class_verify<T: Real>(sigma: &Symbol<T>, bx: &SampleBox<T>, check: &ClassCheck<T>) -> Result<ClassReport> {
    if !(check.step > T::zero()) {
        return Err(Error::Parameter(format!("finite-difference step must be positive, got {}", check.step)));
    }
    if bx.samples == 0 {
        return Err(Error::Parameter("sample box needs at least one point per axis".into()));
    }
    let class = sigma.class();
    let line = sigma.line().copied();
    if class != SymbolClass::Hormander && line.is_none() {
        return Err(Error::Precondition(format!("symbol {} declares a line class but has no line", sigma.name())));
    }
    let h = check.step;
    let m = check.max_order;
    let exclusion = check.exclusion.unwrap_or(T::lit(2.0) * h * T::of_usize(m.max(1)));
    let xs = if sigma.is_x_dependent() { linspace(bx.x, bx.x_samples.max(1)) } else { vec![bx.x.0] };
    let alphas = linspace(bx.alpha, bx.samples);
    let betas = linspace(bx.beta, bx.samples);

    let mut orders = Vec::new();
    for a in 0..=m {
        for b in 0..=m {
            for c in 0..=m {
                orders.push([a, b, c]);
            }
        }
    }
    let mut sup = vec![(0.0f64, 0.0f64); orders.len()];
    let (mut used, mut skipped) = (0usize, 0usize);
    for &x in &xs {
        for &al in &alphas {
            for &be in &betas {
                let d = line.map(|l| dist_to_line(al, be, &l));
                if let Some(d) = d {
                    if d < exclusion {
                        skipped += 1;
                        continue;
                    }
                }
                used += 1;
                let (w_inh, w_hom) = match class {
                    SymbolClass::Hormander => (T::one() + al.abs() + be.abs(), al.abs() + be.abs()),
                    SymbolClass::Line | SymbolClass::LineScaled => {
                        let d = d.expect("line present");
                        (sigma.scale() + d, d)
                    }
                };
                for (slot, &[a, b, c]) in sup.iter_mut().zip(&orders) {
                    if a > 0 && !sigma.is_x_dependent() {
                        continue;
                    }
                    let deriv = mixed_difference(sigma, x, al, be, [a, b, c], h)?;
                    let p = (b + c) as i32;
                    let v_inh = deriv * w_inh.powi(p).to_f64_lossy();
                    let v_hom = deriv * w_hom.powi(p).to_f64_lossy();
                    slot.0 = slot.0.max(v_inh);
                    slot.1 = slot.1.max(v_hom);
                }
            }
        }
    }
    let ceiling = check.ceiling.to_f64_lossy();
    let entries: Vec<ClassEntry> = orders
        .iter()
        .zip(&sup)
        .map(|(&order, &(constant, homogeneous))| ClassEntry { order, constant, homogeneous })
        .collect();
    let ok = |v: f64| v.is_finite() && v <= ceiling;
    let pass = used > 0 && entries.iter().all(|e| ok(e.constant));
    let homogeneous_pass = used > 0 && entries.iter().all(|e| ok(e.homogeneous));
    Ok(ClassReport { class, entries, pass, homogeneous_pass, samples_used: used, samples_skipped: skipped })
}

/// `|Δ_h^{a,b,c} σ| / h^{a+b+c}` with centered stencils.
fn mixed_difference<T: Real>(sigma: &Symbol<T>, x: T, al: T, be: T, [a, b, c]: [usize; 3], h: T) -> Result<f64> {
    let half = |n: usize, i: usize| (T::of_usize(n) / T::lit(2.0) - T::of_usize(i)) * h;
    let mut acc = num_complex::Complex::new(0.0f64, 0.0);
    for i in 0..=a {
        for j in 0..=b {
            for k in 0..=c {
                let sign = if (i + j + k) % 2 == 0 { 1.0 } else { -1.0 };
                let w = sign * binomial(a, i) * binomial(b, j) * binomial(c, k);
                let v = sigma.eval_checked(x + half(a, i), al + half(b, j), be + half(c, k))?;
                acc += num_complex::Complex::new(v.re.to_f64_lossy(), v.im.to_f64_lossy()) * w;
            }
        }
    }
    Ok(acc.norm() / h.to_f64_lossy().powi((a + b + c) as i32))
}
