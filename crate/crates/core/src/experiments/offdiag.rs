use serde::{Deserialize, Serialize};
use serde_json::json;

use super::common::{exponent, local_norm, refinement_for, to_f64, Triple};
use super::report::{ExperimentReport, Fit, ReportBuilder, Table, Verdict};
use crate::error::{Error, Result};
use crate::operator::eval_direct;
use crate::scalar::Real;
use crate::signal::{lp_norm, make_bump, Grid, Interval};
use crate::symbol::Symbol;

/// Placement of `I`, `E`, `F` for [`offdiag_decay`].
///
/// Offsets are signed gaps `d(I, E)/|I|`; a positive offset puts the set to
/// the right of `I`. `E` and `F` are the supports of smooth bumps of width
/// `max(|I|, 4h)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OffDiagConfig {
    pub interval_center: f64,
    pub interval_length: f64,
    pub e_offsets: Vec<f64>,
    pub f_offsets: Vec<f64>,
    pub exponents: Triple,
    pub delta_min: f64,
    /// Samples required inside `I` before the local norm is taken; coarser
    /// grids are refined by trigonometric interpolation.
    pub min_points: usize,
    /// Ratios at or below this are read as exact zeros; when every ratio is,
    /// both verdicts pass without a fit.
    #[serde(default = "default_zero_floor")]
    pub zero_floor: f64,
}

fn default_zero_floor() -> f64 {
    1e-12
}

impl Default for OffDiagConfig {
    fn default() -> Self {
        let k: Vec<f64> = (0..=6).map(|k| 2f64.powi(k)).collect();
        Self {
            interval_center: 0.0,
            interval_length: 1.0,
            f_offsets: k.iter().map(|d| -d).collect(),
            e_offsets: k,
            exponents: Triple::holder(2.0, 2.0),
            delta_min: 2.0,
            min_points: 32,
            zero_floor: default_zero_floor(),
        }
    }
}

/// Measures `‖T(f,g)‖_{L^r(I)} / (‖f‖_{L^p(E)} ‖g‖_{L^q(F)})` for bumps on
/// `E`, `F` at the configured gaps.
///
/// Fit `delta` regresses `ln ratio` on `ln(1 + d/|I|)` with `d` the mean of the
/// two gaps; `delta_per_factor` fits `ratio ≈ C [(1 + d_E/|I|)(1 + d_F/|I|)]^{-δ}`.
/// The verdict uses `delta`.
pub fn offdiag_decay<T: Real>(sigma: &Symbol<T>, grid: &Grid<T>, cfg: &OffDiagConfig) -> Result<ExperimentReport> {
    cfg.exponents.validate()?;
    if cfg.e_offsets.len() != cfg.f_offsets.len() || cfg.e_offsets.is_empty() {
        return Err(Error::Parameter("need equally many, and at least one, E and F offsets".into()));
    }
    let len = cfg.interval_length;
    let interval = Interval::new(T::lit(cfg.interval_center), T::lit(len))?;
    let h = to_f64(grid.spacing());
    let width = len.max(4.0 * h);
    let half_period = to_f64(grid.period()) / 2.0;
    let place = |offset: f64| -> Result<f64> {
        let reach = len / 2.0 + offset.abs() + width;
        if reach >= half_period {
            return Err(Error::Parameter(format!(
                "offset {offset}·|I| reaches {reach} from the center of I, past half the period {half_period}"
            )));
        }
        Ok(cfg.interval_center + offset.signum() * (len / 2.0 + offset.abs() * len + width / 2.0))
    };
    let factor = refinement_for(grid, &interval, cfg.min_points);
    let Triple { p, q, r } = cfg.exponents;

    let mut table = Table::new("ratios", &["e_offset", "f_offset", "lhs", "norm_f", "norm_g", "ratio"]);
    let (mut xs, mut xj, mut ys) = (Vec::new(), Vec::new(), Vec::new());
    for (&de, &df) in cfg.e_offsets.iter().zip(&cfg.f_offsets) {
        let f = make_bump(T::lit(place(de)?), T::lit(width), grid)?;
        let g = make_bump(T::lit(place(df)?), T::lit(width), grid)?;
        let t = eval_direct(sigma, &f, &g)?;
        let lhs = to_f64(local_norm(&t, r, &interval, factor)?);
        let nf = to_f64(lp_norm(&f, exponent(p), None)?);
        let ng = to_f64(lp_norm(&g, exponent(q), None)?);
        let ratio = lhs / (nf * ng);
        table.push(vec![de, df, lhs, nf, ng, ratio]);
        xs.push((1.0 + (de.abs() + df.abs()) / 2.0).ln());
        xj.push(((1.0 + de.abs()) * (1.0 + df.abs())).ln());
        ys.push(ratio.ln());
    }
    let ratios = table.column("ratio").unwrap_or_default();
    let fit = Fit::linear("delta", &xs, &ys);
    let per_factor = Fit::linear("delta_per_factor", &xj, &ys);
    let vanishing = ratios.iter().all(|r| r.abs() <= cfg.zero_floor);
    let first_bad = if vanishing { None } else { ratios.windows(2).position(|w| !(w[1] < w[0])) };
    let decreasing = first_bad.is_none();

    let mut b = ReportBuilder::new(
        "offdiag_decay",
        json!({
            "symbol": sigma.name(),
            "grid": {"n": grid.len(), "period": to_f64(grid.period()), "origin": to_f64(grid.origin())},
            "offdiag": cfg,
            "bump_width": width,
            "refinement": factor,
        }),
        0,
    );
    b.verdict(Verdict::new(
        "strictly_decreasing",
        decreasing,
        first_bad.map_or(-1.0, |i| i as f64 + 1.0),
        0.0,
        match first_bad {
            None if vanishing => format!("every ratio is below {:e}", cfg.zero_floor),
            None => "ratio decreases at every step".to_string(),
            Some(i) => format!("ratio does not decrease from row {i} to row {}", i + 1),
        },
    ));
    b.verdict(if vanishing {
        Verdict::new("delta_hat", true, f64::INFINITY, cfg.delta_min, "ratios vanish; no fit")
    } else {
        Verdict::new("delta_hat", fit.exponent >= cfg.delta_min, fit.exponent, cfg.delta_min, "fitted δ̂ against the minimum")
    });
    b.fit(fit);
    b.fit(per_factor);
    b.table(table);
    Ok(b.finish())
}
