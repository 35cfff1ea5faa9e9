//! Tabulated symbols on a regular `(x, α, β)` lattice.
//!
//! Binary layout (little-endian): three axis headers `origin: f64,
//! spacing: f64, count: u64` in the order x, α, β, then `count_x·count_α·count_β`
//! pairs of `f64` (re, im) with β varying fastest.

use std::io::{Read, Write};
use std::sync::Arc;

use num_complex::Complex;

use super::{Symbol, SymbolClass};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Regular sampling axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis<T> {
    pub origin: T,
    pub spacing: T,
    pub count: usize,
}

impl<T: Real> Axis<T> {
    /// Cell index and fractional offset, clamped to the axis.
    fn locate(&self, v: T) -> (usize, T) {
        if self.count == 1 {
            return (0, T::zero());
        }
        let t = ((v - self.origin) / self.spacing).max(T::zero()).min(T::of_usize(self.count - 1));
        let i = t.floor().to_usize().unwrap_or(0).min(self.count - 2);
        (i, t - T::of_usize(i))
    }
}

/// Trilinear interpolant of tabulated values; arguments beyond an axis are
/// clamped to its ends.
pub fn tabulated_symbol<T: Real>(
    name: impl Into<String>,
    axes: [Axis<T>; 3],
    values: Vec<Complex<T>>,
    class: SymbolClass,
) -> Result<Symbol<T>> {
    for a in &axes {
        if a.count == 0 || !(a.spacing > T::zero()) {
            return Err(Error::Parameter("table axes need count ≥ 1 and positive spacing".into()));
        }
    }
    let total = axes[0].count * axes[1].count * axes[2].count;
    if values.len() != total {
        return Err(Error::Shape(format!("table has {} values, axes need {total}", values.len())));
    }
    if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(Error::Format("table contains non-finite values".into()));
    }
    let x_dependent = axes[0].count > 1;
    let values = Arc::new(values);
    let [ax, aa, ab] = axes;
    let f = move |x: T, al: T, be: T| {
        let (i, u) = ax.locate(x);
        let (j, v) = aa.locate(al);
        let (k, w) = ab.locate(be);
        let at = |i: usize, j: usize, k: usize| {
            let i = i.min(ax.count - 1);
            let j = j.min(aa.count - 1);
            let k = k.min(ab.count - 1);
            values[(i * aa.count + j) * ab.count + k]
        };
        let mut acc = Complex::new(T::zero(), T::zero());
        for (di, fu) in [(0, T::one() - u), (1, u)] {
            for (dj, fv) in [(0, T::one() - v), (1, v)] {
                for (dk, fw) in [(0, T::one() - w), (1, w)] {
                    let c = fu * fv * fw;
                    if c != T::zero() {
                        acc += at(i + di, j + dj, k + dk) * c;
                    }
                }
            }
        }
        acc
    };
    let mut s = Symbol::new(name, class, f);
    if !x_dependent {
        s = Symbol::x_independent(s.name().to_string(), class, {
            let s = s.clone();
            move |a, b| s.eval(T::zero(), a, b)
        });
    }
    Ok(s)
}

pub fn write_tabulated<W: Write>(axes: [Axis<f64>; 3], values: &[Complex<f64>], mut w: W) -> Result<()> {
    for a in &axes {
        w.write_all(&a.origin.to_le_bytes())?;
        w.write_all(&a.spacing.to_le_bytes())?;
        w.write_all(&(a.count as u64).to_le_bytes())?;
    }
    for v in values {
        w.write_all(&v.re.to_le_bytes())?;
        w.write_all(&v.im.to_le_bytes())?;
    }
    Ok(())
}

/// Reads a table written by [`write_tabulated`].
pub fn read_tabulated<R: Read>(mut r: R) -> Result<([Axis<f64>; 3], Vec<Complex<f64>>)> {
    let mut b = [0u8; 8];
    let mut next = |r: &mut R| -> Result<[u8; 8]> {
        r.read_exact(&mut b).map_err(|e| Error::Format(format!("truncated symbol table: {e}")))?;
        Ok(b)
    };
    let mut axes = [Axis { origin: 0.0, spacing: 1.0, count: 1 }; 3];
    for a in &mut axes {
        a.origin = f64::from_le_bytes(next(&mut r)?);
        a.spacing = f64::from_le_bytes(next(&mut r)?);
        a.count = u64::from_le_bytes(next(&mut r)?) as usize;
    }
    let total = axes.iter().map(|a| a.count).product::<usize>();
    if total > 1 << 28 {
        return Err(Error::Format(format!("symbol table too large: {total} entries")));
    }
    let mut values = Vec::with_capacity(total);
    for _ in 0..total {
        let re = f64::from_le_bytes(next(&mut r)?);
        let im = f64::from_le_bytes(next(&mut r)?);
        values.push(Complex::new(re, im));
    }
    Ok((axes, values))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interpolates_linear_data_exactly() {
        let axes = [
            Axis { origin: 0.0, spacing: 1.0, count: 1 },
            Axis { origin: -2.0, spacing: 0.5, count: 9 },
            Axis { origin: -2.0, spacing: 0.5, count: 9 },
        ];
        let mut vals = Vec::new();
        for j in 0..9 {
            for k in 0..9 {
                let (a, b) = (-2.0 + 0.5 * j as f64, -2.0 + 0.5 * k as f64);
                vals.push(Complex::new(a - 2.0 * b, 1.0));
            }
        }
        let mut buf = Vec::new();
        write_tabulated(axes, &vals, &mut buf).unwrap();
        let (ax2, v2) = read_tabulated(&buf[..]).unwrap();
        let s = tabulated_symbol("t", ax2, v2, SymbolClass::Hormander).unwrap();
        assert!(!s.is_x_dependent());
        let v = s.eval(3.0, 0.3, -1.1);
        assert!((v.re - (0.3 + 2.2)).abs() < 1e-12 && (v.im - 1.0).abs() < 1e-12);
        assert!(tabulated_symbol("t", axes, vals[..5].to_vec(), SymbolClass::Hormander).is_err());
    }
}
