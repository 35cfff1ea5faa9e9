use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::Weight;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Box and resolution for [`weight_class_check`]. The default box, up to
/// `radius + 2^max_k·l`, keeps `e^{|x|}` finite in `f64`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassScan {
    /// Left endpoints of `I` range over `[−radius, radius − l]`.
    pub radius: f64,
    pub step: f64,
    pub max_k: u32,
    /// Sampling points per length `l` for sup and inf.
    pub resolution: usize,
    pub ceiling: f64,
}

impl Default for ClassScan {
    fn default() -> Self {
        Self { radius: 256.0, step: 0.5, max_k: 8, resolution: 8, ceiling: 1e3 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightClassReport {
    pub weight: String,
    pub theta: f64,
    pub l: f64,
    pub scan: ClassScan,
    /// Max of `2^{-kθ} sup_I ω / inf_{2^k I} ω` (the empirical constant).
    pub constant: f64,
    /// Max ratio for each `k = 0..=max_k`.
    pub per_k: Vec<f64>,
    /// Center of `I` and `k` attaining the maximum.
    pub witness: (f64, u32),
    pub pass: bool,
}

/// Range extrema in O(1) after O(n log n) setup.
struct SparseTable {
    min: Vec<Vec<f64>>,
    max: Vec<Vec<f64>>,
}

impl SparseTable {
    fn new(v: &[f64]) -> Self {
        let mut min = vec![v.to_vec()];
        let mut max = vec![v.to_vec()];
        let mut w = 1;
        while 2 * w <= v.len() {
            let (pm, px) = (min.last().unwrap(), max.last().unwrap());
            let nm = (0..=v.len() - 2 * w).map(|i| pm[i].min(pm[i + w])).collect();
            let nx = (0..=v.len() - 2 * w).map(|i| px[i].max(px[i + w])).collect();
            min.push(nm);
            max.push(nx);
            w *= 2;
        }
        Self { min, max }
    }

    /// Extrema over indices `lo..=hi`.
    fn query(&self, lo: usize, hi: usize) -> (f64, f64) {
        let len = hi - lo + 1;
        let k = usize::BITS as usize - 1 - len.leading_zeros() as usize;
        let w = 1 << k;
        (self.min[k][lo].min(self.min[k][hi + 1 - w]), self.max[k][lo].max(self.max[k][hi + 1 - w]))
    }
}

/// Scans `2^{-kθ} sup_{x∈I} ω(x) ≤ C inf_{2^k I} ω` over intervals `|I| = l`
/// in the box and `k = 0..=max_k`, on a sampling of spacing `l/resolution`.
pub fn weight_class_check<T: Real>(w: &Weight<T>, theta: f64, l: f64, scan: &ClassScan) -> Result<WeightClassReport> {
    if !(l > 0.0) || !(theta >= 0.0) || !(scan.step > 0.0) || scan.resolution == 0 || scan.radius < l {
        return Err(Error::Parameter("need l > 0, θ ≥ 0, step > 0, resolution ≥ 1 and radius ≥ l".into()));
    }
    let delta = l / scan.resolution as f64;
    let reach = scan.radius + 2f64.powi(scan.max_k as i32) * l;
    let n = (2.0 * reach / delta).ceil() as usize + 1;
    let x = |i: usize| -reach + i as f64 * delta;
    let mut vals = Vec::with_capacity(n);
    for i in 0..n {
        let v = w.eval(T::lit(x(i))).to_f64_lossy();
        if !(v >= 0.0) {
            return Err(Error::Invariant(format!("weight {} is {v} at x = {}", w.name(), x(i))));
        }
        vals.push(v);
    }
    let table = SparseTable::new(&vals);
    let index = |y: f64| (((y + reach) / delta).round().max(0.0) as usize).min(n - 1);
    let starts: Vec<f64> = {
        let count = ((2.0 * scan.radius - l) / scan.step).floor() as usize + 1;
        (0..count).map(|i| -scan.radius + i as f64 * scan.step).collect()
    };
    let per: Vec<(f64, f64)> = (0..=scan.max_k)
        .into_par_iter()
        .map(|k| {
            let big = 2f64.powi(k as i32) * l;
            let damp = 2f64.powf(-(k as f64) * theta);
            starts
                .iter()
                .map(|&a| {
                    let c = a + l / 2.0;
                    let (_, sup) = table.query(index(a), index(a + l));
                    let (inf, _) = table.query(index(c - big / 2.0), index(c + big / 2.0));
                    let r = if sup == 0.0 { 0.0 } else if inf == 0.0 { f64::INFINITY } else { damp * sup / inf };
                    let r = if r.is_nan() { f64::INFINITY } else { r };
                    (r, c)
                })
                .fold((0.0f64, f64::NAN), |m, v| if v.0 > m.0 || (v.0 == m.0 && m.1.is_nan()) { v } else { m })
        })
        .collect();
    let (mut constant, mut witness) = (0.0, (f64::NAN, 0));
    for (k, &(r, c)) in per.iter().enumerate() {
        if r > constant || witness.0.is_nan() {
            constant = r;
            witness = (c, k as u32);
        }
    }
    Ok(WeightClassReport {
        weight: w.name().to_string(),
        theta,
        l,
        scan: *scan,
        constant,
        per_k: per.iter().map(|p| p.0).collect(),
        witness,
        pass: constant.is_finite() && constant <= scan.ceiling,
    })
}

/// Sample points for [`weight_equiv_check`]: `points` equispaced in `[−radius, radius]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairScan {
    pub radius: f64,
    pub points: usize,
    pub ceiling: f64,
}

impl Default for PairScan {
    fn default() -> Self {
        Self { radius: 256.0, points: 257, ceiling: 1e3 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightEquivReport {
    pub weight: String,
    pub max_ratio: f64,
    pub witness: (f64, f64),
    /// Pairs skipped because `ω(y) = 0`.
    pub zero_guard: usize,
    pub pass: bool,
}

/// Max of `ω(x) / ((1 + |x − y|/l)^θ ω(y))` over all sampled pairs.
pub fn weight_equiv_check<T: Real>(w: &Weight<T>, theta: f64, l: f64, scan: &PairScan) -> Result<WeightEquivReport> {
    if !(l > 0.0) || scan.points < 1 {
        return Err(Error::Parameter("need l > 0 and at least one point".into()));
    }
    let pts: Vec<f64> = if scan.points == 1 {
        vec![0.0]
    } else {
        (0..scan.points).map(|i| -scan.radius + 2.0 * scan.radius * i as f64 / (scan.points - 1) as f64).collect()
    };
    let vals: Vec<f64> = pts.iter().map(|&x| w.eval(T::lit(x)).to_f64_lossy()).collect();
    if let Some((i, v)) = vals.iter().enumerate().find(|(_, v)| !(**v >= 0.0)) {
        return Err(Error::Invariant(format!("weight {} is {v} at x = {}", w.name(), pts[i])));
    }
    let mut best = (0.0f64, (f64::NAN, f64::NAN));
    let mut zero_guard = 0;
    for (i, &x) in pts.iter().enumerate() {
        for (j, &y) in pts.iter().enumerate() {
            if vals[j] == 0.0 {
                zero_guard += 1;
                continue;
            }
            let r = vals[i] / ((1.0 + (x - y).abs() / l).powf(theta) * vals[j]);
            if r > best.0 || best.1 .0.is_nan() {
                best = (r, (x, y));
            }
        }
    }
    Ok(WeightEquivReport {
        weight: w.name().to_string(),
        max_ratio: best.0,
        witness: best.1,
        zero_guard,
        pass: best.0.is_finite() && best.0 <= scan.ceiling,
    })
}
