use serde::{Deserialize, Serialize};
use serde_json::json;

use super::common::{local_norm, to_f64};
use super::report::{ExperimentReport, ReportBuilder, Table, Verdict};
use crate::error::{Error, Result};
use crate::operator::eval_direct;
use crate::scalar::Real;
use crate::signal::{Interval, SampledFunction};
use crate::symbol::Symbol;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimsupConfig {
    pub center: f64,
    /// Interval lengths in units of `L`, increasing.
    pub ladder: Vec<f64>,
    pub r: f64,
    pub ceiling: f64,
}

impl Default for LimsupConfig {
    fn default() -> Self {
        Self { center: 0.0, ladder: (0..=5).map(|k| 2f64.powi(k)).collect(), r: 2.0, ceiling: 4.0 }
    }
}

/// Length of the smallest interval holding every nonzero sample of `f` and `g`.
fn support_length<T: Real>(f: &SampledFunction<T>, g: &SampledFunction<T>) -> f64 {
    let grid = f.grid();
    let xs: Vec<f64> = f
        .values()
        .iter()
        .zip(g.values())
        .enumerate()
        .filter(|(_, (a, b))| a.norm() > T::zero() || b.norm() > T::zero())
        .map(|(j, _)| to_f64(grid.x(j)))
        .collect();
    match (xs.first(), xs.last()) {
        (Some(a), Some(b)) => b - a + to_f64(grid.spacing()),
        _ => 0.0,
    }
}

/// `((1/|I|) ∫_I |T(f,g)|^r)^{1/r}` over intervals of length `L·ladder_j`
/// centered at `center`, against `‖f‖_∞ ‖g‖_∞`.
pub fn limsup_bound<T: Real>(
    sigma: &Symbol<T>,
    l: f64,
    f: &SampledFunction<T>,
    g: &SampledFunction<T>,
    cfg: &LimsupConfig,
) -> Result<ExperimentReport> {
    let period = to_f64(f.grid().period());
    if !(l > 0.0) || cfg.ladder.is_empty() || !(cfg.r >= 1.0) || !cfg.r.is_finite() {
        return Err(Error::Parameter("need L > 0, a nonempty ladder and 1 ≤ r < ∞".into()));
    }
    if cfg.ladder.windows(2).any(|w| !(w[1] > w[0])) || cfg.ladder.iter().any(|&m| !(m > 0.0) || m * l > period) {
        return Err(Error::Parameter(format!("ladder must increase and stay within the period {period} in units of L = {l}")));
    }
    let t = eval_direct(sigma, f, g)?;
    let sup = to_f64(f.max_abs()) * to_f64(g.max_abs());
    let support = support_length(f, g);
    let mut table = Table::new("measurements", &["length", "measurement", "over_sup", "times_length_pow"]);
    let mut values = Vec::new();
    for &m in &cfg.ladder {
        let len = m * l;
        let i = Interval::new(T::lit(cfg.center), T::lit(len))?;
        let v = to_f64(local_norm(&t, cfg.r, &i, 1)?) / len.powf(1.0 / cfg.r);
        table.push(vec![len, v, if sup > 0.0 { v / sup } else { 0.0 }, v * len.powf(1.0 / cfg.r)]);
        values.push((len, v));
    }
    let last = values.last().map(|p| p.1).unwrap_or(0.0);
    let tail: Vec<f64> = values.iter().filter(|(len, _)| *len >= 4.0 * support).map(|p| p.1).collect();
    let monotone = tail.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12));
    let mut b = ReportBuilder::new(
        "limsup_bound",
        json!({"symbol": sigma.name(), "L": l, "limsup": cfg, "support_length": support, "sup_product": sup}),
        0,
    );
    b.verdict(Verdict::new(
        "below_ceiling",
        last <= cfg.ceiling * sup,
        if sup > 0.0 { last / sup } else { 0.0 },
        cfg.ceiling,
        "last measurement over ‖f‖_∞‖g‖_∞",
    ));
    b.verdict(Verdict::new(
        "non_increasing_tail",
        monotone,
        tail.len() as f64,
        0.0,
        format!("{} lengths at or beyond 4× the support length {support}", tail.len()),
    ));
    b.table(table);
    Ok(b.finish())
}
