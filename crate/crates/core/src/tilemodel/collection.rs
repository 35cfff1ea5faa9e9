use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::TriTile;
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::signal::Interval;

/// Finite list of tri-tiles with the bounds it is validated against.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Collection<T> {
    pub tiles: Vec<TriTile<T>>,
    pub area_bound: T,
    pub overlap_bound: T,
}

impl<T: Real> Collection<T> {
    pub fn new(tiles: Vec<TriTile<T>>) -> Self {
        Self { tiles, area_bound: T::lit(4.0), overlap_bound: T::lit(4.0) }
    }

    pub fn empty() -> Self {
        Self::new(Vec::new())
    }

    pub fn with_bounds(mut self, area_bound: T, overlap_bound: T) -> Result<Self> {
        if !(area_bound > T::zero()) || !(overlap_bound > T::zero()) {
            return Err(Error::Parameter("collection bounds must be positive".into()));
        }
        self.area_bound = area_bound;
        self.overlap_bound = overlap_bound;
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.tiles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tiles.is_empty()
    }

    /// Time intervals `{I_s}` (with repetitions).
    pub fn time_family(&self) -> Vec<Interval<T>> {
        self.tiles.iter().map(|t| t.time).collect()
    }

    /// Frequency family `J = {ω_s} ∪ {ω_{s_i}}` (with repetitions).
    pub fn freq_family(&self) -> Vec<Interval<T>> {
        self.tiles.iter().flat_map(|t| [t.freq, t.subs[0], t.subs[1], t.subs[2]]).collect()
    }
}

/// Outcome of [`collection_validate`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub pass: bool,
    pub tiles: usize,
    pub area_ok: bool,
    pub max_area: f64,
    pub disjoint_ok: bool,
    pub time_overlap: f64,
    pub freq_overlap: f64,
    pub overlap_ok: bool,
    pub nesting_ok: bool,
    pub duplicates: usize,
    pub witnesses: Vec<String>,
}

type Key = (u64, u64);

fn key<T: Real>(i: &Interval<T>) -> Key {
    (i.center().to_f64_lossy().to_bits(), i.length().to_f64_lossy().to_bits())
}

fn tri_key<T: Real>(t: &TriTile<T>) -> [Key; 5] {
    [key(&t.time), key(&t.freq), key(&t.subs[0]), key(&t.subs[1]), key(&t.subs[2])]
}

/// Max pointwise sum of weights of open intervals, with a witness point.
fn max_coverage(items: &[(f64, f64, usize)]) -> (usize, f64) {
    let mut events: Vec<(f64, i64)> = Vec::with_capacity(2 * items.len());
    for &(lo, hi, w) in items {
        events.push((lo, w as i64));
        events.push((hi, -(w as i64)));
    }
    // closing events first at equal coordinates: intervals are open
    events.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let (mut cur, mut best, mut at) = (0i64, 0i64, f64::NAN);
    for (k, &(x, d)) in events.iter().enumerate() {
        cur += d;
        if cur > best {
            best = cur;
            let next = events.get(k + 1).map(|e| e.0).unwrap_or(x);
            at = 0.5 * (x + next);
        }
    }
    (best as usize, at)
}

/// Grid constant of a weighted family of distinct intervals: the largest
/// pointwise weighted count over classes `2^{k−1} ≤ |I| ≤ 2^{k+1}`.
fn grid_constant(family: &[(f64, f64, usize)]) -> (usize, f64, i32) {
    if family.is_empty() {
        return (0, f64::NAN, 0);
    }
    let lens = family.iter().map(|&(lo, hi, _)| hi - lo);
    let kmin = lens.clone().fold(f64::INFINITY, f64::min).log2().floor() as i32 - 1;
    let kmax = lens.fold(0.0, f64::max).log2().ceil() as i32 + 1;
    let mut best = (0, f64::NAN, kmin);
    for k in kmin..=kmax {
        let lo = 2f64.powi(k - 1);
        let hi = 2f64.powi(k + 1);
        let class: Vec<_> = family
            .iter()
            .copied()
            .filter(|&(a, b, _)| {
                let l = b - a;
                l >= lo * (1.0 - 1e-12) && l <= hi * (1.0 + 1e-12)
            })
            .collect();
        let (c, at) = max_coverage(&class);
        if c > best.0 {
            best = (c, at, k);
        }
    }
    best
}

/// Checks area, disjointness, both grid properties and nesting.
///
/// Overlap counts treat a family of intervals as a set; an interval carried
/// by a tri-tile that occurs `m` times is counted `m` times.
pub fn collection_validate<T: Real>(s: &Collection<T>) -> ValidationReport {
    let mut witnesses = Vec::new();
    let tol = 1e-12;

    // multiplicity of identical tri-tiles
    let mut mult: HashMap<[Key; 5], usize> = HashMap::new();
    for t in &s.tiles {
        *mult.entry(tri_key(t)).or_insert(0) += 1;
    }
    let duplicates: usize = mult.values().map(|m| m - 1).sum();
    for (k, m) in &mult {
        if *m > 1 {
            let t = s.tiles.iter().find(|t| tri_key(t) == *k).expect("present");
            witnesses.push(format!(
                "tri-tile with I_s = [{}, {}] occurs {} times",
                t.time.lo(),
                t.time.hi(),
                m
            ));
        }
    }

    let mut area_ok = true;
    let mut disjoint_ok = true;
    let mut max_area = 0.0f64;
    for (n, t) in s.tiles.iter().enumerate() {
        let a = t.area().to_f64_lossy();
        max_area = max_area.max(a);
        if a > s.area_bound.to_f64_lossy() * (1.0 + tol) {
            area_ok = false;
            witnesses.push(format!("tri-tile {n}: |I_s||ω_s| = {a} exceeds {}", s.area_bound));
        }
        for i in 0..3 {
            if let Err(e) = t.tile(i) {
                area_ok = false;
                witnesses.push(format!("tri-tile {n}, sub-tile {}: {e}", i + 1));
            }
            if !t.freq.contains_interval(&t.subs[i]) {
                disjoint_ok = false;
                witnesses.push(format!("tri-tile {n}: ω_s{} not inside ω_s", i + 1));
            }
            for j in i + 1..3 {
                if t.subs[i].overlaps(&t.subs[j]) {
                    disjoint_ok = false;
                    witnesses.push(format!("tri-tile {n}: ω_s{} meets ω_s{}", i + 1, j + 1));
                }
            }
        }
    }

    let weighted = |pick: &dyn Fn(&TriTile<T>) -> Vec<Interval<T>>| {
        let mut w: HashMap<Key, (f64, f64, usize)> = HashMap::new();
        for t in &s.tiles {
            let m = mult[&tri_key(t)];
            for i in pick(t) {
                let e = w.entry(key(&i)).or_insert((i.lo().to_f64_lossy(), i.hi().to_f64_lossy(), 0));
                e.2 = e.2.max(m);
            }
        }
        let mut v: Vec<_> = w.into_values().collect();
        v.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
        v
    };
    let times = weighted(&|t| vec![t.time]);
    let freqs = weighted(&|t| vec![t.freq, t.subs[0], t.subs[1], t.subs[2]]);
    let (tc, tat, tk) = grid_constant(&times);
    let (fc, fat, fk) = grid_constant(&freqs);
    let bound = s.overlap_bound.to_f64_lossy();
    let overlap_ok = tc as f64 <= bound && fc as f64 <= bound;
    if tc as f64 > bound {
        witnesses.push(format!("time overlap {tc} at x = {tat} (scale 2^{tk})"));
    }
    if fc as f64 > bound {
        witnesses.push(format!("frequency overlap {fc} at ξ = {fat} (scale 2^{fk})"));
    }

    // nesting: ω_{s_i} ⊊ ϖ ∈ J ⟹ all ω_{s_j} ⊂ ϖ
    let mut nesting_ok = true;
    'outer: for (n, t) in s.tiles.iter().enumerate() {
        for &(lo, hi, _) in &freqs {
            let inside = |w: &Interval<T>| w.lo().to_f64_lossy() >= lo && w.hi().to_f64_lossy() <= hi;
            let strict = |w: &Interval<T>| inside(w) && (w.lo().to_f64_lossy() != lo || w.hi().to_f64_lossy() != hi);
            if t.subs.iter().any(strict) && !t.subs.iter().all(inside) {
                nesting_ok = false;
                witnesses.push(format!("tri-tile {n}: a sub-frequency sits strictly inside [{lo}, {hi}] but not all three do"));
                if witnesses.len() > 64 {
                    break 'outer;
                }
            }
        }
    }

    ValidationReport {
        pass: area_ok && disjoint_ok && overlap_ok && nesting_ok && duplicates == 0,
        tiles: s.len(),
        area_ok,
        max_area,
        disjoint_ok,
        time_overlap: tc as f64,
        freq_overlap: fc as f64,
        overlap_ok,
        nesting_ok,
        duplicates,
        witnesses,
    }
}
