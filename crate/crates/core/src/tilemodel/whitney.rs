use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::packet::packet_spectrum;
use super::{Collection, ModelSum, ModelTerm, Tile, TriTile, WavePacketProfile};
use crate::error::{Error, Result};
use crate::operator::eval_direct;
use crate::scalar::Real;
use crate::signal::{lp_norm, make_bump, Exponent, Grid, Interval, SampledFunction};
use crate::symbol::{smooth_step, Symbol, SymbolClass};

/// Parameters of [`whitney_decompose`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WhitneyConfig<T> {
    /// Number of strips `|t| ∈ [τ_j, τ_{j+2}]`, `τ_j = τ_0·2^{j/2}`.
    pub depth: usize,
    /// Translations are kept for `|u|_∞ ≤ u_max`.
    pub u_max: i32,
    /// Damping exponent `N` in `(1+|u|²)^{-N}`.
    pub damping: T,
    /// Input windows stay inside `band·nyquist`.
    pub band: T,
    /// Ratio between the distance to the line and the window width.
    pub cube_ratio: T,
    pub area_bound: T,
    pub probes: usize,
    pub seed: u64,
}

impl<T: Real> Default for WhitneyConfig<T> {
    fn default() -> Self {
        Self {
            depth: 5,
            u_max: 2,
            damping: T::lit(8.0),
            band: T::lit(0.45),
            cube_ratio: T::lit(4.5),
            area_bound: T::lit(16.0),
            probes: 4,
            seed: 7,
        }
    }
}

/// One strip of the construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StripInfo {
    pub tau: f64,
    pub width: f64,
    pub time_length: f64,
    pub positions: usize,
    pub couplings: usize,
    pub tri_tiles: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WhitneyReport {
    pub l: f64,
    pub depth: usize,
    pub strips: Vec<StripInfo>,
    pub tri_tiles: usize,
    pub terms: usize,
    /// Couplings whose sub-frequencies would overlap, left out of the model.
    pub dropped: usize,
    pub dropped_weight: f64,
    /// `min 2π|ω_s|` over emitted tri-tiles (chart units, angular).
    pub min_freq_length: f64,
    pub remarque_ok: bool,
    pub max_time_over_l: f64,
    /// `‖T_σ(f,g) − T_S(f,g)‖₁ / (‖f‖₂‖g‖₂)` per probe.
    pub probe_discrepancy: Vec<f64>,
    /// Same discrepancies relative to `‖T_σ(f,g)‖₁`.
    pub probe_relative: Vec<f64>,
    pub discrepancy: f64,
}

#[derive(Clone)]
pub struct WhitneyModel<T> {
    pub model: ModelSum<T>,
    /// `σ·Σ_j χ_j`: the part of the symbol the strips cover.
    pub covered: Symbol<T>,
    pub report: WhitneyReport,
}

impl<T: Real> std::fmt::Debug for WhitneyModel<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("WhitneyModel").field("terms", &self.model.terms.len()).field("report", &self.report).finish()
    }
}

/// Smooth ramp in `log t`: 0 below `a`, 1 above `b`.
fn ramp<T: Real>(t: T, a: T, b: T) -> T {
    if t <= a {
        T::zero()
    } else if t >= b {
        T::one()
    } else {
        smooth_step((t.ln() - a.ln()) / (b.ln() - a.ln()))
    }
}

/// Partition of unity over strips in `|t|`; strip 0 absorbs everything below `τ_1`.
fn strip_weight<T: Real>(j: usize, t: T, tau: &[T]) -> T {
    let up = if j == 0 { T::one() } else { ramp(t, tau[j], tau[j + 1]) };
    up - ramp(t, tau[j + 1], tau[j + 2])
}

struct Window<T> {
    m: i64,
    center: T,
    /// `(slot, cycles, value)` of the unnormalized base packet.
    spec: Vec<(usize, T, Complex<T>)>,
    norm: T,
}

fn windows<T: Real>(grid: &Grid<T>, w: T, time: Interval<T>, limit: T, profile: &WavePacketProfile<T>) -> Result<Vec<Window<T>>> {
    let half = w / T::lit(2.0);
    let mmax = ((limit - half) / half).floor().to_i64().unwrap_or(0);
    let p = grid.period();
    (-mmax..=mmax)
        .map(|m| {
            let center = T::from_i64(m).unwrap() * half;
            let tile = Tile::new(time, Interval::new(center, w)?)?;
            let (spec, norm) = packet_spectrum(&tile, profile, grid)?;
            let spec = spec
                .into_iter()
                .map(|(k, v)| (k, T::from_isize(grid.signed_bin(k)).unwrap() / p, v))
                .collect();
            Ok(Window { m, center, spec, norm })
        })
        .collect()
}

/// Residue representatives closest to zero, kept when `|u| ≤ u_max`.
fn offsets(k: usize, u_max: i32) -> Vec<i32> {
    let mut v: Vec<i32> = (0..k as i32)
        .map(|r| if 2 * r <= k as i32 { r } else { r - k as i32 })
        .filter(|u| u.abs() <= u_max)
        .collect();
    v.sort_unstable();
    v
}

struct Candidate<T> {
    tile: TriTile<T>,
    /// `(u1, u2, weight)` where weight multiplies normalized packets.
    weights: Vec<(i32, i32, Complex<T>)>,
    parity: i64,
    len: T,
    positions: usize,
}

/// Discretizes a line-truncated, `x`-independent symbol into a model sum.
///
/// Each strip `χ_j σ` is expanded exactly in a frame of wave packets of
/// frequency width `w_j ≈ τ_j/cube_ratio` on both inputs and the output;
/// the part of `σ` beyond the last strip, the translations beyond `u_max`
/// and input frequencies outside the band make up the remainder.
pub fn whitney_decompose<T: Real>(sigma: &Symbol<T>, grid: &Grid<T>, cfg: &WhitneyConfig<T>) -> Result<WhitneyModel<T>> {
    if sigma.is_x_dependent() {
        return Err(Error::Precondition("symbol depends on x".into()));
    }
    let line = match (sigma.class(), sigma.line()) {
        (SymbolClass::LineScaled, Some(l)) => *l,
        _ => return Err(Error::Precondition("symbol is not truncated near a singular line".into())),
    };
    let (l1, l2) = (line.l1(), line.l2());
    if !(l1 * l2 < T::zero()) {
        return Err(Error::Precondition("the chart needs λ1·λ2 < 0".into()));
    }
    if cfg.depth == 0 || cfg.u_max < 0 || !(cfg.band > T::zero() && cfg.band <= T::one()) {
        return Err(Error::Parameter("depth ≥ 1, u_max ≥ 0 and band in (0, 1] are required".into()));
    }
    let l = T::one() / sigma.scale();
    let chart = [l2, -l1, l2 - l1];
    let nrm = (l1 * l1 + l2 * l2).sqrt();
    // |t| below this is where the truncation vanishes (t in cycles)
    let t_min = nrm / (T::lit(4.0) * T::PI() * l * (l1 * l2).abs());
    let root2 = T::lit(2.0).sqrt();
    let tau: Vec<T> = (0..cfg.depth + 2).map(|j| t_min * root2.powi(j as i32)).collect();

    let p = grid.period();
    let h = grid.spacing();
    let n = grid.len();
    let nyq = grid.nyquist();
    let profile = WavePacketProfile::standard();
    let eight = T::lit(8.0);
    let norm_c = h / T::of_usize(n).sqrt();

    let mut strips = Vec::new();
    let mut candidates: Vec<Candidate<T>> = Vec::new();
    for j in 0..cfg.depth {
        let w = (tau[j] / cfg.cube_ratio * p).floor() / p;
        if w < T::lit(2.0) / p {
            return Err(Error::Resolution(format!(
                "strip {j}: window width {w} is below two bins; enlarge the period or decrease L"
            )));
        }
        let len = T::one() / w;
        let positions = (p * w).round().to_usize().unwrap();
        let base = Interval::new(grid.origin() + len / T::lit(2.0), len)?;
        let ins = windows(grid, w, base, cfg.band * nyq, &profile)?;
        let outs = windows(grid, w, base, nyq, &profile)?;
        let us = offsets(positions, cfg.u_max);
        let chart_t = |a: T, b: T| a / l2 + b / l1;
        let half = w / T::lit(2.0);

        let pairs: Vec<(usize, usize)> = (0..ins.len())
            .flat_map(|a| (0..ins.len()).map(move |b| (a, b)))
            .filter(|&(a, b)| {
                let (ca, cb) = (ins[a].center, ins[b].center);
                let ts = [
                    chart_t(ca - half, cb - half),
                    chart_t(ca - half, cb + half),
                    chart_t(ca + half, cb - half),
                    chart_t(ca + half, cb + half),
                ];
                let lo = ts.iter().fold(T::infinity(), |m, v| m.min(*v));
                let hi = ts.iter().fold(T::neg_infinity(), |m, v| m.max(*v));
                let dmin = if lo <= T::zero() && hi >= T::zero() { T::zero() } else { lo.abs().min(hi.abs()) };
                let dmax = lo.abs().max(hi.abs());
                dmax > tau[0] && dmin < tau[j + 2]
            })
            .collect();

        let found: Vec<Vec<Candidate<T>>> = pairs
            .par_iter()
            .map(|&(ia, ib)| {
                let (wa, wb) = (&ins[ia], &ins[ib]);
                let mut s = Vec::new();
                let mut any = false;
                for &(ka, xa, fa) in &wa.spec {
                    for &(kb, xb, gb) in &wb.spec {
                        let t = chart_t(xa, xb).abs();
                        let chi = strip_weight(j, t, &tau);
                        let v = if chi > T::zero() {
                            sigma.eval(T::zero(), T::two_pi() * xa, T::two_pi() * xb) * chi * fa * gb
                        } else {
                            Complex::new(T::zero(), T::zero())
                        };
                        any |= v.norm() > T::zero();
                        s.push((ka, kb, xa - wa.center, xb - wb.center, v));
                    }
                }
                let mut out = Vec::new();
                if !any {
                    return out;
                }
                let glo = wa.center + wb.center - w;
                let ghi = wa.center + wb.center + w;
                for wc in outs.iter().filter(|o| o.center - half < ghi && o.center + half > glo) {
                    let mut dense = vec![Complex::new(T::zero(), T::zero()); n];
                    for &(k, _, v) in &wc.spec {
                        dense[k] = v;
                    }
                    let mut weights = Vec::new();
                    for &u1 in &us {
                        for &u2 in &us {
                            let mut c = Complex::new(T::zero(), T::zero());
                            for &(ka, kb, da, db, v) in &s {
                                let hc = dense[(ka + kb) % n];
                                if hc.norm() == T::zero() {
                                    continue;
                                }
                                let ph = -T::two_pi() * len * (da * T::from_i32(u1).unwrap() + db * T::from_i32(u2).unwrap());
                                c += v * hc.conj() * Complex::from_polar(T::one(), ph);
                            }
                            let weight = c * norm_c * wa.norm * wb.norm * wc.norm / eight;
                            weights.push((u1, u2, weight));
                        }
                    }
                    if weights.iter().all(|x| x.2.norm() == T::zero()) {
                        continue;
                    }
                    let sub = |c: T, s: T| Interval::new(c / s, w / s.abs());
                    let subs = [
                        sub(wa.center, chart[0]).expect("positive width"),
                        sub(wb.center, chart[1]).expect("positive width"),
                        sub(wc.center, chart[2]).expect("positive width"),
                    ];
                    let hull = subs[0].hull(&subs[1]).hull(&subs[2]);
                    let tile = TriTile { time: base, freq: hull, subs, scales: chart };
                    out.push(Candidate { tile, weights, parity: wc.m - wa.m - wb.m, len, positions });
                }
                out
            })
            .collect();
        let mut couplings = 0;
        for f in found {
            couplings += f.len();
            candidates.extend(f);
        }
        strips.push(StripInfo {
            tau: tau[j].to_f64_lossy(),
            width: w.to_f64_lossy(),
            time_length: len.to_f64_lossy(),
            positions,
            couplings,
            tri_tiles: 0,
        });
        let _ = j;
    }

    // drop negligible couplings relative to the largest one
    let wmax = candidates
        .iter()
        .flat_map(|c| c.weights.iter().map(|x| x.2.norm()))
        .fold(T::zero(), T::max);
    let cutoff = wmax * T::lit(1e-13);
    let mut tiles = Vec::new();
    let mut terms = Vec::new();
    let mut dropped = 0usize;
    let mut dropped_weight = T::zero();
    let mut strip_of_len: Vec<(T, usize)> = Vec::new();
    for c in candidates {
        if c.weights.iter().all(|x| x.2.norm() <= cutoff) {
            continue;
        }
        if TriTile::with_chart(c.tile.time, c.tile.freq, c.tile.subs, c.tile.scales).is_err() {
            dropped += 1;
            dropped_weight += c.weights.iter().map(|x| x.2.norm()).fold(T::zero(), |a, b| a + b);
            continue;
        }
        for k in 0..c.positions {
            let tile = c.tile.translated(T::of_usize(k));
            let idx = tiles.len();
            tiles.push(tile);
            let sign = if (c.parity * k as i64).rem_euclid(2) == 1 { -T::one() } else { T::one() };
            for &(u1, u2, wgt) in &c.weights {
                if wgt.norm() <= cutoff {
                    continue;
                }
                let u2sq = T::from_i32(u1 * u1 + u2 * u2).unwrap();
                let eps = wgt * sign * c.len.sqrt() * (T::one() + u2sq).powf(cfg.damping);
                terms.push(ModelTerm { tile: idx, u: [u1, u2, 0], eps });
            }
        }
        match strip_of_len.iter_mut().find(|(l, _)| *l == c.len) {
            Some(e) => e.1 += c.positions,
            None => strip_of_len.push((c.len, c.positions)),
        }
    }
    for s in &mut strips {
        s.tri_tiles = strip_of_len
            .iter()
            .filter(|(l, _)| l.to_f64_lossy() == s.time_length)
            .map(|(_, k)| *k)
            .sum();
    }

    let collection = Collection::new(tiles).with_bounds(cfg.area_bound, T::lit(4.0))?;
    let mut model = ModelSum::with_terms(collection, terms)?.with_damping(cfg.damping);
    model.normalize();

    let min_freq = model
        .collection
        .tiles
        .iter()
        .map(|t| T::two_pi() * t.freq.length())
        .fold(T::infinity(), T::min);
    let max_time = model.collection.tiles.iter().map(|t| t.time.length()).fold(T::zero(), T::max);
    let remarque_ok = model.collection.is_empty() || min_freq >= T::one() / (T::lit(2.0) * l);

    let (probe_discrepancy, probe_relative) = probe(sigma, &model, grid, cfg)?;
    let discrepancy = probe_discrepancy.iter().copied().fold(0.0, f64::max);
    let report = WhitneyReport {
        l: l.to_f64_lossy(),
        depth: cfg.depth,
        strips,
        tri_tiles: model.collection.len(),
        terms: model.terms.len(),
        dropped,
        dropped_weight: dropped_weight.to_f64_lossy(),
        min_freq_length: if model.collection.is_empty() { f64::INFINITY } else { min_freq.to_f64_lossy() },
        remarque_ok,
        max_time_over_l: (max_time / l).to_f64_lossy(),
        probe_discrepancy,
        probe_relative,
        discrepancy,
    };
    let (tc, lc1, lc2) = (tau.clone(), l1, l2);
    let depth = cfg.depth;
    let covered = sigma.multiply(format!("{}|strips {depth}", sigma.name()), move |a, b| {
        let t = ((a / lc2 + b / lc1) / T::two_pi()).abs();
        (0..depth).map(|j| strip_weight(j, t, &tc)).fold(T::zero(), |x, y| x + y)
    });
    Ok(WhitneyModel { model, covered, report })
}

/// Pairs of modulated bumps sharing a center, with frequencies inside
/// `0.6·band·nyquist`.
pub fn probe_pairs<T: Real>(grid: &Grid<T>, cfg: &WhitneyConfig<T>) -> Result<Vec<(SampledFunction<T>, SampledFunction<T>)>> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let p = grid.period();
    let width = p / T::lit(4.0);
    let fmax = (cfg.band * grid.nyquist() * T::lit(0.6)).to_f64_lossy();
    (0..cfg.probes)
        .map(|_| {
            let c = T::lit(rng.gen_range(-0.25..0.25)) * p;
            let xa = T::lit(rng.gen_range(-fmax..fmax));
            let xb = T::lit(rng.gen_range(-fmax..fmax));
            let bump = make_bump(c, width, grid)?;
            Ok((bump.modulate(T::two_pi() * xa), bump.modulate(T::two_pi() * xb)))
        })
        .collect()
}

fn probe<T: Real>(sigma: &Symbol<T>, model: &ModelSum<T>, grid: &Grid<T>, cfg: &WhitneyConfig<T>) -> Result<(Vec<f64>, Vec<f64>)> {
    let two = Exponent::Finite(T::lit(2.0));
    let one = Exponent::Finite(T::one());
    let mut abs = Vec::new();
    let mut rel = Vec::new();
    for (f, g) in probe_pairs(grid, cfg)? {
        let exact = eval_direct(sigma, &f, &g)?;
        let approx = super::model_sum_eval(model, &f, &g)?;
        let diff = lp_norm(&exact.sub(&approx)?, one, None)?;
        let denom = lp_norm(&f, two, None)? * lp_norm(&g, two, None)?;
        let size = lp_norm(&exact, one, None)?;
        abs.push((diff / denom).to_f64_lossy());
        rel.push(if size > T::zero() { (diff / size).to_f64_lossy() } else { diff.to_f64_lossy() });
    }
    Ok((abs, rel))
}
