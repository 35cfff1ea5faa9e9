use num_complex::Complex;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::signal::fourier::fft_in_place;
use crate::signal::{dft_forward, lp_norm, Exponent, Grid, Interval, SampledFunction};

/// Exponent triple `(p, q, r)`; `f64::INFINITY` marks `∞` and serializes as `"inf"`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Triple {
    #[serde(with = "num_serde")]
    pub p: f64,
    #[serde(with = "num_serde")]
    pub q: f64,
    #[serde(with = "num_serde")]
    pub r: f64,
}

/// `f64` as a JSON number when finite, otherwise `"inf"`, `"-inf"` or `"nan"`.
pub(crate) mod num_serde {
    use super::*;

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else if v.is_nan() {
            s.serialize_str("nan")
        } else if *v > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => Ok(v),
            Raw::Str(s) => match s.as_str() {
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                "nan" => Ok(f64::NAN),
                _ => Err(serde::de::Error::custom(format!("bad number {s}"))),
            },
        }
    }
}

/// Row-major cells through [`num_serde`].
pub(crate) mod rows_serde {
    use super::*;
    use serde::ser::SerializeSeq;

    #[derive(Serialize, Deserialize)]
    struct Cell(#[serde(with = "super::num_serde")] f64);

    pub fn serialize<S: Serializer>(rows: &[Vec<f64>], s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(rows.len()))?;
        for r in rows {
            let cells: Vec<Cell> = r.iter().map(|v| Cell(*v)).collect();
            seq.serialize_element(&cells)?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Vec<f64>>, D::Error> {
        let raw: Vec<Vec<Cell>> = Vec::deserialize(d)?;
        Ok(raw.into_iter().map(|r| r.into_iter().map(|c| c.0).collect()).collect())
    }
}

impl Triple {
    /// `(p, q)` with `1/r = 1/p + 1/q`.
    pub fn holder(p: f64, q: f64) -> Self {
        Self { p, q, r: 1.0 / (1.0 / p + 1.0 / q) }
    }

    /// Checks `1 < p, q ≤ ∞` and `0 < 1/r = 1/p + 1/q < 3/2`.
    pub fn validate(&self) -> Result<()> {
        let ok = self.p > 1.0 && self.q > 1.0 && self.r > 0.0;
        let s = 1.0 / self.p + 1.0 / self.q;
        if !ok || !(s > 0.0 && s < 1.5) || (1.0 / self.r - s).abs() > 1e-12 {
            return Err(Error::Parameter(format!(
                "exponents (p, q, r) = ({}, {}, {}) need 1 < p, q ≤ ∞ and 0 < 1/r = 1/p + 1/q < 3/2",
                self.p, self.q, self.r
            )));
        }
        Ok(())
    }

    pub fn label(&self) -> String {
        let f = |v: f64| if v.is_infinite() { "inf".to_string() } else { format!("{v}") };
        format!("({},{},{})", f(self.p), f(self.q), f(self.r))
    }
}

pub(crate) fn exponent<T: Real>(v: f64) -> Exponent<T> {
    if v.is_infinite() {
        Exponent::Infinity
    } else {
        Exponent::Finite(T::lit(v))
    }
}

/// Trigonometric interpolation onto a grid `factor` times finer (power of two).
/// The Nyquist coefficient is split evenly between `±n/2`.
pub fn upsample<T: Real>(f: &SampledFunction<T>, factor: usize) -> Result<SampledFunction<T>> {
    if factor <= 1 {
        return Ok(f.clone());
    }
    if !factor.is_power_of_two() {
        return Err(Error::Parameter(format!("upsampling factor {factor} is not a power of two")));
    }
    let g = *f.grid();
    let n = g.len();
    let m = n * factor;
    let spec = dft_forward(f)?;
    let v = spec.values();
    let zero = Complex::new(T::zero(), T::zero());
    let mut big = vec![zero; m];
    let half = n / 2;
    for k in 0..half {
        big[k] = v[k];
    }
    for k in half + 1..n {
        big[m - n + k] = v[k];
    }
    let nyq = v[half] * T::lit(0.5);
    big[half] = nyq;
    big[m - half] = nyq;
    fft_in_place(&mut big, true);
    let s = T::of_usize(factor).sqrt();
    let fine = Grid::new(g.origin(), g.spacing() / T::of_usize(factor), m)?;
    SampledFunction::new(fine, big.into_iter().map(|z| z * s).collect())
}

/// Smallest power-of-two factor putting at least `min_points` samples inside `interval`.
pub(crate) fn refinement_for<T: Real>(grid: &Grid<T>, interval: &Interval<T>, min_points: usize) -> usize {
    let mut factor = 1usize;
    while factor < 1 << 12 {
        let h = grid.spacing() / T::of_usize(factor);
        let count = (interval.length() / h).to_f64_lossy().floor() as usize;
        if count >= min_points {
            break;
        }
        factor *= 2;
    }
    factor
}

/// `L^r` norm over `interval`, on a trigonometric refinement when the grid is coarse.
pub(crate) fn local_norm<T: Real>(f: &SampledFunction<T>, r: f64, interval: &Interval<T>, factor: usize) -> Result<T> {
    let fine = upsample(f, factor)?;
    let mask = interval.mask(fine.grid());
    lp_norm(&fine, exponent(r), Some(&mask))
}

pub(crate) fn to_f64<T: Real>(v: T) -> f64 {
    v.to_f64_lossy()
}
