use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::common::{exponent, to_f64, Triple};
use super::report::{ExperimentReport, ReportBuilder, Table, Verdict};
use crate::error::{Error, Result};
use crate::operator::eval_direct;
use crate::scalar::Real;
use crate::signal::{make_bump, Exponent, Grid, SampledFunction};
use crate::symbol::Symbol;
use crate::weights::{weight_class_check, weighted_lp_norm, ClassScan, Weight};

/// Ensemble and grids for [`holder_sweep`] and [`weighted_continuity`].
///
/// Each member is a pair of superpositions of `bumps` smooth bumps with
/// centers uniform in `[−period/4, period/4]`, widths uniform in
/// `[width_min, width_max]` and complex Gaussian amplitudes. Members are
/// sampled on grids of `n` and `2n` points over the same period.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub triples: Vec<Triple>,
    pub members: usize,
    pub bumps: usize,
    pub width_min: f64,
    pub width_max: f64,
    pub period: f64,
    pub n: usize,
    pub seed: u64,
    /// Largest accepted `bound(2n) / bound(n)`.
    pub growth_limit: f64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            triples: vec![Triple::holder(2.0, 2.0), Triple::holder(4.0, 4.0), Triple::holder(2.0, f64::INFINITY)],
            members: 50,
            bumps: 3,
            width_min: 2.0,
            width_max: 8.0,
            period: 32.0,
            n: 128,
            seed: 1,
            growth_limit: 2.0,
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct BumpSpec {
    center: f64,
    width: f64,
    amp: (f64, f64),
}

fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    // Box–Muller on two uniforms in (0, 1].
    let u: f64 = 1.0 - rng.gen::<f64>();
    let v: f64 = rng.gen();
    (-2.0 * u.ln()).sqrt() * (std::f64::consts::TAU * v).cos()
}

fn draw_member(cfg: &SweepConfig, index: usize) -> [Vec<BumpSpec>; 2] {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(index as u64);
    let mut side = || {
        (0..cfg.bumps)
            .map(|_| BumpSpec {
                center: rng.gen_range(-cfg.period / 4.0..=cfg.period / 4.0),
                width: rng.gen_range(cfg.width_min..=cfg.width_max),
                amp: (gaussian(&mut rng), gaussian(&mut rng)),
            })
            .collect::<Vec<_>>()
    };
    let f = side();
    let g = side();
    [f, g]
}

fn synthesize<T: Real>(spec: &[BumpSpec], grid: &Grid<T>) -> Result<SampledFunction<T>> {
    let mut out = SampledFunction::zeros(*grid);
    for b in spec {
        let bump = make_bump(T::lit(b.center), T::lit(b.width), grid)?;
        out = out.add(&bump.scale(Complex::new(T::lit(b.amp.0), T::lit(b.amp.1))))?;
    }
    Ok(out)
}

impl SweepConfig {
    fn validate(&self) -> Result<()> {
        for t in &self.triples {
            t.validate()?;
        }
        let h = self.period / self.n as f64;
        if self.members == 0 || self.bumps == 0 || self.triples.is_empty() {
            return Err(Error::Parameter("need at least one member, bump and triple".into()));
        }
        if !(self.width_min >= 4.0 * h && self.width_max >= self.width_min && self.width_max <= self.period / 2.0) {
            return Err(Error::Parameter(format!(
                "bump widths [{}, {}] must lie in [4h, period/2] = [{}, {}]",
                self.width_min,
                self.width_max,
                4.0 * h,
                self.period / 2.0
            )));
        }
        if !self.n.is_power_of_two() {
            return Err(Error::Parameter(format!("n = {} is not a power of two", self.n)));
        }
        Ok(())
    }

    /// Sample functions `(f, g)` of member `index` on `grid`.
    pub fn member<T: Real>(&self, index: usize, grid: &Grid<T>) -> Result<(SampledFunction<T>, SampledFunction<T>)> {
        let [f, g] = draw_member(self, index);
        Ok((synthesize(&f, grid)?, synthesize(&g, grid)?))
    }
}

/// Ratios `‖T(f,g)‖_r / (‖f‖_p ‖g‖_q)` per member and triple, in member order.
fn ratios<T: Real>(
    sigma: &Symbol<T>,
    cfg: &SweepConfig,
    grid: &Grid<T>,
    norm: &(dyn Fn(&SampledFunction<T>, Exponent<T>) -> Result<T> + Sync),
) -> Result<Vec<Vec<f64>>> {
    (0..cfg.members)
        .into_par_iter()
        .map(|i| {
            let (f, g) = cfg.member(i, grid)?;
            let t = eval_direct(sigma, &f, &g)?;
            cfg.triples
                .iter()
                .map(|tr| {
                    let num = norm(&t, exponent(tr.r))?;
                    let den = norm(&f, exponent(tr.p))? * norm(&g, exponent(tr.q))?;
                    Ok(to_f64(num) / to_f64(den))
                })
                .collect()
        })
        .collect()
}

fn sweep_core<T: Real>(
    id: &str,
    sigma: &Symbol<T>,
    cfg: &SweepConfig,
    extra: serde_json::Value,
    norm: &(dyn Fn(&SampledFunction<T>, Exponent<T>) -> Result<T> + Sync),
) -> Result<ExperimentReport> {
    cfg.validate()?;
    let coarse = Grid::centered(T::lit(cfg.period), cfg.n)?;
    let fine = Grid::centered(T::lit(cfg.period), 2 * cfg.n)?;
    let rc = ratios(sigma, cfg, &coarse, norm)?;
    let rf = ratios(sigma, cfg, &fine, norm)?;

    let inv = |v: f64| 1.0 / v;
    let mut bounds = Table::new("bounds", &["inv_p", "inv_q", "inv_r", "bound_n", "bound_2n", "argmax_n", "argmax_2n", "growth"]);
    let mut members = Table::new("members", &["triple", "member", "ratio_n", "ratio_2n"]);
    let mut b = ReportBuilder::new(id, json!({"symbol": sigma.name(), "sweep": cfg, "extra": extra}), cfg.seed);
    for (j, tr) in cfg.triples.iter().enumerate() {
        let arg = |rs: &[Vec<f64>]| {
            rs.iter().enumerate().fold((f64::NEG_INFINITY, 0usize), |m, (i, r)| if r[j] > m.0 { (r[j], i) } else { m })
        };
        let (bn, an) = arg(&rc);
        let (b2, a2) = arg(&rf);
        let growth = b2 / bn;
        bounds.push(vec![inv(tr.p), inv(tr.q), inv(tr.r), bn, b2, an as f64, a2 as f64, growth]);
        for i in 0..cfg.members {
            members.push(vec![j as f64, i as f64, rc[i][j], rf[i][j]]);
        }
        b.verdict(Verdict::new(
            format!("growth {}", tr.label()),
            growth.is_finite() && growth < cfg.growth_limit,
            growth,
            cfg.growth_limit,
            format!("empirical bound {bn:.6e} at n = {}, {b2:.6e} at n = {}", cfg.n, 2 * cfg.n),
        ));
    }
    b.table(bounds);
    b.table(members);
    Ok(b.finish())
}

/// Empirical `L^p × L^q → L^r` bounds over the ensemble at `n` and `2n`.
pub fn holder_sweep<T: Real>(sigma: &Symbol<T>, cfg: &SweepConfig) -> Result<ExperimentReport> {
    let one = Weight::constant(T::one());
    sweep_core("holder_sweep", sigma, cfg, json!(null), &|f, p| weighted_lp_norm(f, p, &one, None))
}

/// As [`holder_sweep`] with `L^p(ω)` norms, after `ω` passes
/// [`weight_class_check`] for `(θ, l)` on `scan`.
pub fn weighted_continuity<T: Real>(
    sigma: &Symbol<T>,
    w: &Weight<T>,
    theta: f64,
    l: f64,
    scan: &ClassScan,
    cfg: &SweepConfig,
) -> Result<ExperimentReport> {
    let check = weight_class_check(w, theta, l, scan)?;
    if !check.pass {
        return Err(Error::Precondition(format!(
            "weight {} fails the class check for θ = {theta}, l = {l}: C = {} at I centered {} with k = {}",
            w.name(),
            check.constant,
            check.witness.0,
            check.witness.1
        )));
    }
    let extra = json!({"weight": w.name(), "theta": theta, "l": l, "class_constant": check.constant, "scan": scan});
    sweep_core("weighted_continuity", sigma, cfg, extra, &|f, p| weighted_lp_norm(f, p, w, None))
}
