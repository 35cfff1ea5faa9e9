use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::common::{local_norm, refinement_for, to_f64, Triple};
use super::report::{ExperimentReport, ReportBuilder, Table, Verdict};
use super::sweep::SweepConfig;
use crate::error::{Error, Result};
use crate::operator::eval_direct;
use crate::scalar::Real;
use crate::signal::{corona_index, corona_masks, hardy_littlewood_max, Grid, Interval, SampledFunction};
use crate::symbol::Symbol;

/// Both sides of the local estimate for one input pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocalSides {
    /// `((1/|I|) ∫_I |T(f,g)|^r)^{1/r}`.
    pub lhs: f64,
    /// Product of the two corona sums `Σ_k 2^{-kδ} ((1/|2^{k+1}I|) ∫_{C_k(I)} |·|^p)^{1/p}`.
    pub corona: f64,
    /// The same product keeping only `k = 0`.
    pub corona_k0: f64,
    /// `inf_I M(|f|^p)^{1/p} · inf_I M(|g|^q)^{1/q}`.
    pub maximal: f64,
}

/// `(Σ_k 2^{-kδ} a_k, a_0)` with `a_k` the normalized corona averages of `|f|^p`.
fn corona_sum<T: Real>(f: &SampledFunction<T>, p: f64, interval: &Interval<T>, delta: f64) -> (f64, f64) {
    let grid = f.grid();
    let kmax = grid.points().map(|x| corona_index(interval, x)).max().unwrap_or(0);
    let h = to_f64(grid.spacing());
    let len = to_f64(interval.length());
    let mut total = 0.0;
    let mut first = 0.0;
    for c in corona_masks(interval, kmax, grid) {
        let vals = f.values().iter().zip(&c.mask).filter(|(_, m)| **m).map(|(v, _)| to_f64(v.norm()));
        let a = if p.is_infinite() {
            vals.fold(0.0, f64::max)
        } else {
            let big = 2f64.powi(c.index as i32 + 1) * len;
            (vals.map(|v| v.powf(p)).sum::<f64>() * h / big).powf(1.0 / p)
        };
        if c.index == 0 {
            first = a;
        }
        total += 2f64.powf(-(c.index as f64) * delta) * a;
    }
    (total, first)
}

/// `inf_{x∈I} M(|f|^p)(x)^{1/p}` over grid points of `I` (the nearest point
/// when `I` holds none); `sup |f|` for `p = ∞`.
fn maximal_inf<T: Real>(f: &SampledFunction<T>, p: f64, interval: &Interval<T>) -> f64 {
    if p.is_infinite() {
        return to_f64(f.max_abs());
    }
    let powered = f.map(|v| Complex::new(v.norm().powf(T::lit(p)), T::zero()));
    let m = hardy_littlewood_max(&powered);
    let grid = f.grid();
    let mask = interval.mask(grid);
    let inside: Vec<f64> = m.values().iter().zip(&mask).filter(|(_, k)| **k).map(|(v, _)| to_f64(v.re)).collect();
    let inf = if inside.is_empty() {
        let c = interval.center();
        let j = (0..grid.len())
            .min_by(|&a, &b| (grid.x(a) - c).abs().partial_cmp(&(grid.x(b) - c).abs()).unwrap_or(std::cmp::Ordering::Equal))
            .unwrap_or(0);
        to_f64(m.values()[j].re)
    } else {
        inside.into_iter().fold(f64::INFINITY, f64::min)
    };
    inf.powf(1.0 / p)
}

/// Left side and majorants of the local estimate at `I` for one pair.
pub fn local_estimate<T: Real>(
    sigma: &Symbol<T>,
    f: &SampledFunction<T>,
    g: &SampledFunction<T>,
    interval: &Interval<T>,
    triple: Triple,
    delta: f64,
    min_points: usize,
) -> Result<LocalSides> {
    triple.validate()?;
    let t = eval_direct(sigma, f, g)?;
    let factor = refinement_for(f.grid(), interval, min_points);
    let len = to_f64(interval.length());
    let lhs = to_f64(local_norm(&t, triple.r, interval, factor)?) / len.powf(1.0 / triple.r);
    let (sf, f0) = corona_sum(f, triple.p, interval, delta);
    let (sg, g0) = corona_sum(g, triple.q, interval, delta);
    Ok(LocalSides {
        lhs,
        corona: sf * sg,
        corona_k0: f0 * g0,
        maximal: maximal_inf(f, triple.p, interval) * maximal_inf(g, triple.q, interval),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalConfig {
    pub interval_center: f64,
    pub interval_length: f64,
    pub triple: Triple,
    pub delta: f64,
    /// Ensemble, period, base grid size and seed; its triples are ignored.
    pub ensemble: SweepConfig,
    pub min_points: usize,
    /// Accepted relative change of each empirical constant from `n` to `2n`.
    pub tolerance: f64,
}

impl Default for LocalConfig {
    fn default() -> Self {
        Self {
            interval_center: 0.0,
            interval_length: 1.0,
            triple: Triple::holder(2.0, 2.0),
            delta: 1.0,
            ensemble: SweepConfig { members: 20, ..SweepConfig::default() },
            min_points: 32,
            tolerance: 0.3,
        }
    }
}

/// Empirical constants `max lhs/corona` and `max lhs/maximal` over the
/// ensemble at `n` and `2n`.
pub fn local_estimate_check<T: Real>(sigma: &Symbol<T>, cfg: &LocalConfig) -> Result<ExperimentReport> {
    cfg.triple.validate()?;
    let e = &cfg.ensemble;
    if e.members == 0 || !e.n.is_power_of_two() {
        return Err(Error::Parameter("need at least one member and n a power of two".into()));
    }
    let interval = Interval::new(T::lit(cfg.interval_center), T::lit(cfg.interval_length))?;
    let mut table = Table::new("members", &["member", "n", "lhs", "corona", "corona_k0", "maximal"]);
    let mut consts = [[0.0f64; 2]; 2];
    for (gi, n) in [e.n, 2 * e.n].into_iter().enumerate() {
        let grid = Grid::centered(T::lit(e.period), n)?;
        let rows: Vec<LocalSides> = (0..e.members)
            .into_par_iter()
            .map(|i| {
                let (f, g) = e.member(i, &grid)?;
                local_estimate(sigma, &f, &g, &interval, cfg.triple, cfg.delta, cfg.min_points)
            })
            .collect::<Result<_>>()?;
        for (i, s) in rows.iter().enumerate() {
            table.push(vec![i as f64, n as f64, s.lhs, s.corona, s.corona_k0, s.maximal]);
            consts[gi][0] = consts[gi][0].max(s.lhs / s.corona);
            consts[gi][1] = consts[gi][1].max(s.lhs / s.maximal);
        }
    }
    let mut b = ReportBuilder::new("local_estimate", json!({"symbol": sigma.name(), "local": cfg}), e.seed);
    for (k, name) in ["corona", "maximal"].iter().enumerate() {
        let (c1, c2) = (consts[0][k], consts[1][k]);
        let change = (c2 / c1 - 1.0).abs();
        b.verdict(Verdict::new(
            format!("stability {name}"),
            c1.is_finite() && c2.is_finite() && change <= cfg.tolerance,
            change,
            cfg.tolerance,
            format!("empirical constant {c1:.6e} at n = {}, {c2:.6e} at n = {}", e.n, 2 * e.n),
        ));
    }
    b.table(table);
    Ok(b.finish())
}
