use std::sync::Arc;

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::common::to_f64;
use super::report::{ExperimentReport, ReportBuilder, Table, Verdict};
use crate::error::{Error, Result};
use crate::operator::eval_direct;
use crate::scalar::Real;
use crate::signal::{hardy_littlewood_max, smooth_bump, Grid, Interval, SampledFunction};
use crate::symbol::Symbol;
use crate::tilemodel::{trilinear_form, ModelSum};

type FormFn<T> = dyn Fn(&SampledFunction<T>, &SampledFunction<T>, &SampledFunction<T>) -> Result<Complex<T>> + Send + Sync;

/// A trilinear form on sampled functions.
#[derive(Clone)]
pub struct TrilinearForm<T> {
    name: String,
    eval: Arc<FormFn<T>>,
}

impl<T> std::fmt::Debug for TrilinearForm<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TrilinearForm").field("name", &self.name).finish()
    }
}

impl<T: Real> TrilinearForm<T> {
    pub fn new(
        name: impl Into<String>,
        eval: impl Fn(&SampledFunction<T>, &SampledFunction<T>, &SampledFunction<T>) -> Result<Complex<T>> + Send + Sync + 'static,
    ) -> Self {
        Self { name: name.into(), eval: Arc::new(eval) }
    }

    /// `⟨T_σ(f1, f2), f3·1_I⟩`, or over the whole grid when `interval` is `None`.
    pub fn operator(sigma: Symbol<T>, interval: Option<Interval<T>>) -> Self {
        let name = format!("<T[{}](f1,f2), f3>", sigma.name());
        Self::new(name, move |f1, f2, f3| {
            let t = eval_direct(&sigma, f1, f2)?;
            match interval {
                Some(i) => t.inner(&f3.restrict(&i.mask(f3.grid()))?),
                None => t.inner(f3),
            }
        })
    }

    /// Model-sum form [`trilinear_form`] on `interval`.
    pub fn model(m: ModelSum<T>, interval: Interval<T>) -> Self {
        Self::new("model sum form", move |f1, f2, f3| trilinear_form(&m, f1, f2, f3, &interval))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn eval(&self, f1: &SampledFunction<T>, f2: &SampledFunction<T>, f3: &SampledFunction<T>) -> Result<Complex<T>> {
        (self.eval)(f1, f2, f3)
    }
}

/// Exceptional set `U = ∪_i {M(1_{E_i}) > η |E_i|/|E_α|}` with the smallest
/// `η` for which `|U| ≤ |E_α|/2`, and `E′_α = E_α \ U`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExceptionalSet {
    pub alpha: usize,
    pub eta: f64,
    pub u_mask: Vec<bool>,
    pub u_measure: f64,
    pub e_alpha_measure: f64,
    pub e_prime: Vec<bool>,
}

/// Builds [`ExceptionalSet`]; fails with an invariant error if the
/// certificate `|U| ≤ |E_α|/2` does not hold.
pub fn exceptional_set<T: Real>(grid: &Grid<T>, sets: [&[bool]; 3], alpha: usize) -> Result<ExceptionalSet> {
    let n = grid.len();
    if alpha > 2 || sets.iter().any(|s| s.len() != n) {
        return Err(Error::Parameter("need three masks on the grid and α ∈ {0, 1, 2}".into()));
    }
    let h = to_f64(grid.spacing());
    let counts: Vec<usize> = sets.iter().map(|s| s.iter().filter(|b| **b).count()).collect();
    if counts[alpha] == 0 {
        return Err(Error::Parameter("E_α is empty".into()));
    }
    // Each point enters U once η drops below t(x) = max_i M(1_{E_i})(x) |E_α|/|E_i|.
    let mut t = vec![0.0f64; n];
    for (s, &c) in sets.iter().zip(&counts) {
        if c == 0 {
            continue;
        }
        let ind = SampledFunction::new(
            *grid,
            s.iter().map(|&b| Complex::new(if b { T::one() } else { T::zero() }, T::zero())).collect(),
        )?;
        let m = hardy_littlewood_max(&ind);
        let scale = counts[alpha] as f64 / c as f64;
        for (tx, v) in t.iter_mut().zip(m.values()) {
            *tx = tx.max(to_f64(v.re) * scale);
        }
    }
    let allowed = counts[alpha] / 2;
    let mut sorted = t.clone();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let eta = if allowed < n { sorted[allowed] } else { 0.0 };
    let u_mask: Vec<bool> = t.iter().map(|&v| v > eta).collect();
    let u_count = u_mask.iter().filter(|b| **b).count();
    if 2 * u_count > counts[alpha] {
        return Err(Error::Invariant(format!("|U| = {} exceeds |E_α|/2 = {}", u_count as f64 * h, counts[alpha] as f64 * h / 2.0)));
    }
    let e_prime = sets[alpha].iter().zip(&u_mask).map(|(&e, &u)| e && !u).collect();
    Ok(ExceptionalSet {
        alpha,
        eta,
        u_mask,
        u_measure: u_count as f64 * h,
        e_alpha_measure: counts[alpha] as f64 * h,
        e_prime,
    })
}

/// Random set triples and input families for [`restricted_type_harness`].
///
/// Each `E_i` is a union of `intervals_per_set` intervals with centers uniform
/// in `[−span/2, span/2]` and lengths uniform in `[length_min, length_max]`.
/// Inputs in `F(E′)` come in two families: random `{−1, 0, 1}` patterns (the
/// first sample is `1_{E′}`), and the same patterns mollified by a smooth
/// kernel of width `mollifier_width` then restricted to `E′`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RestrictedConfig {
    /// Reciprocal exponents `1/p_i`.
    pub inv_p: [f64; 3],
    pub configurations: usize,
    pub intervals_per_set: usize,
    pub length_min: f64,
    pub length_max: f64,
    pub span: f64,
    pub period: f64,
    pub n: usize,
    pub samples: usize,
    pub mollifier_width: f64,
    pub seed: u64,
    pub growth_limit: f64,
}

impl Default for RestrictedConfig {
    fn default() -> Self {
        Self {
            inv_p: [0.6, 0.6, -0.2],
            configurations: 100,
            intervals_per_set: 3,
            length_min: 1.0,
            length_max: 4.0,
            span: 16.0,
            period: 32.0,
            n: 128,
            samples: 6,
            mollifier_width: 1.0,
            seed: 3,
            growth_limit: 2.0,
        }
    }
}

impl RestrictedConfig {
    /// Index `α` of the negative exponent after validating `Σ 1/p_i = 1`,
    /// `−1/2 < 1/p_α < 0` and `1/2 < 1/p_β < 1` for `β ≠ α`.
    pub fn alpha(&self) -> Result<usize> {
        let s: f64 = self.inv_p.iter().sum();
        let neg: Vec<usize> = (0..3).filter(|&i| self.inv_p[i] < 0.0).collect();
        let bad = |msg: &str| Error::Parameter(format!("exponents 1/p = {:?}: {msg}", self.inv_p));
        if (s - 1.0).abs() > 1e-12 {
            return Err(bad("Σ 1/p_i must be 1"));
        }
        if neg.len() != 1 {
            return Err(bad("need exactly one negative index"));
        }
        let a = neg[0];
        if !(self.inv_p[a] > -0.5) {
            return Err(bad("need −1/2 < 1/p_α < 0"));
        }
        if (0..3).any(|b| b != a && !(self.inv_p[b] > 0.5 && self.inv_p[b] < 1.0)) {
            return Err(bad("need 1/2 < 1/p_β < 1 for β ≠ α"));
        }
        Ok(a)
    }

    fn validate(&self) -> Result<usize> {
        let a = self.alpha()?;
        let h = self.period / self.n as f64;
        if self.configurations == 0 || self.samples == 0 || self.intervals_per_set == 0 || !self.n.is_power_of_two() {
            return Err(Error::Parameter("need configurations, samples, intervals ≥ 1 and n a power of two".into()));
        }
        if !(self.length_min >= 4.0 * h && self.length_max >= self.length_min)
            || self.span + self.length_max > self.period
            || !(self.mollifier_width >= 2.0 * h)
        {
            return Err(Error::Parameter(format!(
                "set lengths must be ≥ 4h = {}, fit in the period with the span, and the mollifier must be ≥ 2h",
                4.0 * h
            )));
        }
        Ok(a)
    }

    /// Interval lists of the three sets of configuration `index`.
    pub fn sets(&self, index: usize) -> Result<[Vec<Interval<f64>>; 3]> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(index as u64);
        let mut one = || -> Result<Vec<Interval<f64>>> {
            (0..self.intervals_per_set)
                .map(|_| {
                    let c = rng.gen_range(-self.span / 2.0..=self.span / 2.0);
                    let l = rng.gen_range(self.length_min..=self.length_max);
                    Interval::new(c, l)
                })
                .collect()
        };
        Ok([one()?, one()?, one()?])
    }
}

fn set_mask<T: Real>(grid: &Grid<T>, parts: &[Interval<f64>]) -> Vec<bool> {
    grid.points().map(|x| parts.iter().any(|i| i.contains(to_f64(x)))).collect()
}

fn mollify<T: Real>(pattern: &[f64], grid: &Grid<T>, width: f64) -> Vec<f64> {
    let n = pattern.len();
    let h = to_f64(grid.spacing());
    let reach = (width / (2.0 * h)).floor() as isize;
    let kernel: Vec<f64> = (-reach..=reach).map(|j| smooth_bump(j as f64 * h / (width / 2.0))).collect();
    let total: f64 = kernel.iter().sum();
    (0..n)
        .map(|i| {
            kernel
                .iter()
                .enumerate()
                .map(|(k, w)| w * pattern[(i as isize + k as isize - reach).rem_euclid(n as isize) as usize])
                .sum::<f64>()
                / total
        })
        .collect()
}

struct Measured {
    eta: f64,
    u_over_e: f64,
    sign: f64,
    smooth: f64,
}

fn measure_one<T: Real>(form: &TrilinearForm<T>, cfg: &RestrictedConfig, alpha: usize, grid: &Grid<T>, index: usize) -> Result<Measured> {
    let parts = cfg.sets(index)?;
    let masks: Vec<Vec<bool>> = parts.iter().map(|p| set_mask(grid, p)).collect();
    let ex = exceptional_set(grid, [&masks[0], &masks[1], &masks[2]], alpha)?;
    let h = to_f64(grid.spacing());
    let measures: Vec<f64> = masks.iter().map(|m| m.iter().filter(|b| **b).count() as f64 * h).collect();
    let denom: f64 = (0..3).map(|b| measures[b].powf(cfg.inv_p[b])).product();
    let support: Vec<&[bool]> = (0..3).map(|b| if b == alpha { &ex.e_prime[..] } else { &masks[b][..] }).collect();

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x5eed_0000_0000);
    rng.set_stream(((index as u64) << 20) | grid.len() as u64);
    let to_fn = |vals: Vec<f64>, mask: &[bool]| {
        SampledFunction::new(
            *grid,
            vals.iter().zip(mask).map(|(&v, &m)| Complex::new(if m { T::lit(v) } else { T::zero() }, T::zero())).collect(),
        )
    };
    let (mut sign, mut smooth) = (0.0f64, 0.0f64);
    for s in 0..cfg.samples {
        let mut sharp = Vec::with_capacity(3);
        let mut soft = Vec::with_capacity(3);
        for mask in &support {
            let pattern: Vec<f64> = if s == 0 {
                vec![1.0; grid.len()]
            } else {
                (0..grid.len()).map(|_| rng.gen_range(-1i32..=1) as f64).collect()
            };
            let restricted: Vec<f64> = pattern.iter().zip(mask.iter()).map(|(&v, &m)| if m { v } else { 0.0 }).collect();
            soft.push(to_fn(mollify(&restricted, grid, cfg.mollifier_width), mask)?);
            sharp.push(to_fn(restricted, mask)?);
        }
        sign = sign.max(to_f64(form.eval(&sharp[0], &sharp[1], &sharp[2])?.norm()) / denom);
        smooth = smooth.max(to_f64(form.eval(&soft[0], &soft[1], &soft[2])?.norm()) / denom);
    }
    Ok(Measured { eta: ex.eta, u_over_e: ex.u_measure / ex.e_alpha_measure, sign, smooth })
}

/// Empirical restricted-type constant of `form` over random set triples, at
/// `n` and `2n`. Every configuration certifies `|U| ≤ |E_α|/2` before measuring.
pub fn restricted_type_harness<T: Real>(form: &TrilinearForm<T>, cfg: &RestrictedConfig) -> Result<ExperimentReport> {
    let alpha = cfg.validate()?;
    let grids = [Grid::centered(T::lit(cfg.period), cfg.n)?, Grid::centered(T::lit(cfg.period), 2 * cfg.n)?];
    let mut table = Table::new("configurations", &["config", "n", "eta", "u_over_e_alpha", "constant_sign", "constant_smooth"]);
    let mut totals = [[0.0f64; 2]; 2];
    let mut max_u = 0.0f64;
    for (gi, grid) in grids.iter().enumerate() {
        let rows: Vec<Measured> =
            (0..cfg.configurations).into_par_iter().map(|i| measure_one(form, cfg, alpha, grid, i)).collect::<Result<_>>()?;
        for (i, m) in rows.iter().enumerate() {
            table.push(vec![i as f64, grid.len() as f64, m.eta, m.u_over_e, m.sign, m.smooth]);
            totals[gi][0] = totals[gi][0].max(m.sign);
            totals[gi][1] = totals[gi][1].max(m.smooth);
            max_u = max_u.max(m.u_over_e);
        }
    }
    let mut b = ReportBuilder::new("restricted_type", json!({"form": form.name(), "restricted": cfg, "alpha": alpha}), cfg.seed);
    b.verdict(Verdict::new("exceptional_set", max_u <= 0.5, max_u, 0.5, "max |U|/|E_α| over all configurations and grids"));
    for (k, family) in ["sign", "smooth"].iter().enumerate() {
        let (c1, c2) = (totals[0][k], totals[1][k]);
        let factor = (c2 / c1).max(c1 / c2);
        b.verdict(Verdict::new(
            format!("stability {family}"),
            c1.is_finite() && c2.is_finite() && factor < cfg.growth_limit,
            factor,
            cfg.growth_limit,
            format!("constant {c1:.6e} at n = {}, {c2:.6e} at n = {}", cfg.n, 2 * cfg.n),
        ));
    }
    b.table(table);
    Ok(b.finish())
}
