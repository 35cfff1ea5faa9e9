use std::collections::BTreeMap;

use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::packet::packet_spectrum;
use super::{Collection, TriTile, WavePacketProfile};
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::signal::fourier::fft_in_place;
use crate::signal::{corona_index, dft_forward, Grid, Interval, SampledFunction};

/// One summand: tri-tile index, translation `u` (in units of `|I_s|`) and coefficient.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelTerm<T> {
    pub tile: usize,
    pub u: [i32; 3],
    pub eps: Complex<T>,
}

/// `T_S(f,g) = scale · Σ (1+|u|²)^{-N} |I_s|^{-1/2} ε_s(u) ⟨φ¹_{s1,u1},f⟩ ⟨φ²_{s2,u2},g⟩ φ³_{s3,u3}`.
///
/// `⟨φ, f⟩` denotes `∫ f·conj(φ)`, so the sum is bilinear in `(f, g)`.
#[derive(Debug, Clone)]
pub struct ModelSum<T> {
    pub collection: Collection<T>,
    pub terms: Vec<ModelTerm<T>>,
    pub profiles: [WavePacketProfile<T>; 3],
    pub damping: T,
    pub scale: T,
}

impl<T: Real> ModelSum<T> {
    /// One untranslated term per tri-tile, standard profiles.
    pub fn new(collection: Collection<T>, eps: Vec<Complex<T>>) -> Result<Self> {
        if eps.len() != collection.len() {
            return Err(Error::Shape(format!("{} coefficients for {} tri-tiles", eps.len(), collection.len())));
        }
        let terms = eps.into_iter().enumerate().map(|(tile, eps)| ModelTerm { tile, u: [0; 3], eps }).collect();
        Self::with_terms(collection, terms)
    }

    pub fn with_terms(collection: Collection<T>, terms: Vec<ModelTerm<T>>) -> Result<Self> {
        if let Some(t) = terms.iter().find(|t| t.tile >= collection.len()) {
            return Err(Error::Shape(format!("term refers to tri-tile {} of {}", t.tile, collection.len())));
        }
        let p = WavePacketProfile::standard();
        Ok(Self { collection, terms, profiles: [p.clone(), p.clone(), p], damping: T::lit(8.0), scale: T::one() })
    }

    pub fn with_profiles(mut self, profiles: [WavePacketProfile<T>; 3]) -> Self {
        self.profiles = profiles;
        self
    }

    pub fn with_damping(mut self, n: T) -> Self {
        self.damping = n;
        self
    }

    /// Rescales so that `max |ε| = 1`, moving the factor into `scale`.
    pub fn normalize(&mut self) {
        let m = self.terms.iter().fold(T::zero(), |m, t| m.max(t.eps.norm()));
        if m > T::zero() {
            for t in &mut self.terms {
                t.eps = t.eps / m;
            }
            self.scale = self.scale * m;
        }
    }

    pub fn max_eps(&self) -> T {
        self.terms.iter().fold(T::zero(), |m, t| m.max(t.eps.norm()))
    }

    /// Full scalar weight `scale (1+|u|²)^{-N} |I_s|^{-1/2} ε`.
    pub fn weight(&self, term: &ModelTerm<T>) -> Complex<T> {
        let u2: i64 = term.u.iter().map(|&x| (x as i64) * (x as i64)).sum();
        let damp = (T::one() + T::from_i64(u2).unwrap()).powf(-self.damping);
        let s = &self.collection.tiles[term.tile];
        term.eps * (self.scale * damp / s.time.length().sqrt())
    }
}

type Packet<T> = Vec<(usize, Complex<T>)>;

fn normalized<T: Real>(tri: &TriTile<T>, i: usize, shift: i32, profile: &WavePacketProfile<T>, grid: &Grid<T>) -> Result<Packet<T>> {
    let tile = tri.translated(T::from_i32(shift).unwrap()).tile(i)?;
    let (spec, norm) = packet_spectrum(&tile, profile, grid)?;
    if !(norm > T::zero()) {
        return Err(Error::Resolution("no frequency bin falls inside ω".into()));
    }
    Ok(spec.into_iter().map(|(k, v)| (k, v / norm)).collect())
}

/// `h Σ_k F_k conj(Φ_k)`, i.e. `∫ f conj(φ)`.
fn pair<T: Real>(spec: &[Complex<T>], packet: &Packet<T>, h: T) -> Complex<T> {
    packet.iter().fold(Complex::new(T::zero(), T::zero()), |acc, (k, v)| acc + spec[*k] * v.conj()) * h
}

fn term_packets<T: Real>(m: &ModelSum<T>, t: &ModelTerm<T>, grid: &Grid<T>) -> Result<[Packet<T>; 3]> {
    let tri = &m.collection.tiles[t.tile];
    Ok([
        normalized(tri, 0, t.u[0], &m.profiles[0], grid)?,
        normalized(tri, 1, t.u[1], &m.profiles[1], grid)?,
        normalized(tri, 2, t.u[2], &m.profiles[2], grid)?,
    ])
}

const CHUNK: usize = 256;

/// Sums per-chunk spectra in chunk order so the result does not depend on scheduling.
fn reduce_in_order<T: Real>(n: usize, parts: Vec<Vec<Complex<T>>>) -> Vec<Complex<T>> {
    let mut total = vec![Complex::new(T::zero(), T::zero()); n];
    for part in parts {
        for (a, b) in total.iter_mut().zip(part) {
            *a += b;
        }
    }
    total
}

fn synthesize<T: Real>(grid: &Grid<T>, mut spec: Vec<Complex<T>>) -> Result<SampledFunction<T>> {
    fft_in_place(&mut spec, true);
    SampledFunction::new(*grid, spec)
}

/// Evaluates the model sum on the grid of `f`.
pub fn model_sum_eval<T: Real>(m: &ModelSum<T>, f: &SampledFunction<T>, g: &SampledFunction<T>) -> Result<SampledFunction<T>> {
    let grid = *f.grid();
    grid.ensure_same(g.grid())?;
    let h = grid.spacing();
    let fs = dft_forward(f)?.into_values();
    let gs = dft_forward(g)?.into_values();
    let parts: Vec<Vec<Complex<T>>> = m
        .terms
        .par_chunks(CHUNK)
        .map(|chunk| {
            let mut out = vec![Complex::new(T::zero(), T::zero()); grid.len()];
            for t in chunk {
                let p = term_packets(m, t, &grid)?;
                let c = m.weight(t) * pair(&fs, &p[0], h) * pair(&gs, &p[1], h);
                for (k, v) in &p[2] {
                    out[*k] += c * *v;
                }
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    let total = reduce_in_order(grid.len(), parts);
    synthesize(&grid, total)
}

/// `Λ(f1, f2, f3) = ⟨T_S(f1,f2), f3·1_I⟩ = Σ_j T_j conj(f3_j 1_I(x_j)) h`.
pub fn trilinear_form<T: Real>(
    m: &ModelSum<T>,
    f1: &SampledFunction<T>,
    f2: &SampledFunction<T>,
    f3: &SampledFunction<T>,
    interval: &Interval<T>,
) -> Result<Complex<T>> {
    let t = model_sum_eval(m, f1, f2)?;
    let r = f3.restrict(&interval.mask(f3.grid()))?;
    t.inner(&r)
}

/// Pieces of the model sum split by the coronas of `I` met by the inputs
/// and by the scale of `I_s` relative to `I`.
#[derive(Debug, Clone)]
pub struct DecomposedModelSum<T> {
    pub interval: Interval<T>,
    /// `(k1, k2) ↦ Σ_{I_s ⊂ 2I} …` applied to `(f 1_{C_{k1}}, g 1_{C_{k2}})`.
    pub t0: BTreeMap<(usize, usize), SampledFunction<T>>,
    /// `(k1, k2, l) ↦ Σ_{I_s ⊄ 2I, 2^l|I| ≤ |I_s| < 2^{l+1}|I|} …`.
    pub t1: BTreeMap<(usize, usize, i32), SampledFunction<T>>,
    pub t0_terms: Vec<usize>,
    pub t1_terms: BTreeMap<i32, Vec<usize>>,
}

impl<T: Real> DecomposedModelSum<T> {
    pub fn sum(&self, grid: &Grid<T>) -> Result<SampledFunction<T>> {
        let mut acc = SampledFunction::zeros(*grid);
        for p in self.t0.values().chain(self.t1.values()) {
            acc = acc.add(p)?;
        }
        Ok(acc)
    }
}

/// Splits the model sum by corona and scale indices.
///
/// Fails with a precondition error if some `|I_s|` is at least
/// `scale_bound·|I|`.
pub fn model_sum_decompose<T: Real>(
    m: &ModelSum<T>,
    interval: &Interval<T>,
    f: &SampledFunction<T>,
    g: &SampledFunction<T>,
    scale_bound: T,
) -> Result<DecomposedModelSum<T>> {
    let grid = *f.grid();
    grid.ensure_same(g.grid())?;
    let two_i = interval.dilate(T::lit(2.0))?;
    let mut t0_terms = Vec::new();
    let mut t1_terms: BTreeMap<i32, Vec<usize>> = BTreeMap::new();
    for (n, t) in m.terms.iter().enumerate() {
        let s = &m.collection.tiles[t.tile];
        let ratio = s.time.length() / interval.length();
        if ratio >= scale_bound {
            return Err(Error::Precondition(format!(
                "tri-tile {} has |I_s| = {} ≥ {}·|I|",
                t.tile,
                s.time.length(),
                scale_bound
            )));
        }
        if two_i.contains_interval(&s.time) {
            t0_terms.push(n);
        } else {
            let l = ratio.log2().floor().to_i32().unwrap();
            t1_terms.entry(l).or_default().push(n);
        }
    }

    let h = grid.spacing();
    let idx: Vec<usize> = grid.points().map(|x| corona_index(interval, x)).collect();
    let kmax = idx.iter().copied().max().unwrap_or(0);
    let restricted = |u: &SampledFunction<T>| -> Result<Vec<Vec<Complex<T>>>> {
        (0..=kmax)
            .map(|k| {
                let mask: Vec<bool> = idx.iter().map(|&i| i == k).collect();
                Ok(dft_forward(&u.restrict(&mask)?)?.into_values())
            })
            .collect()
    };
    let fk = restricted(f)?;
    let gk = restricted(g)?;
    // `None` marks T0
    let bucket: Vec<Option<i32>> = {
        let mut v = vec![None; m.terms.len()];
        for (l, terms) in &t1_terms {
            for &n in terms {
                v[n] = Some(*l);
            }
        }
        v
    };
    let nk = kmax + 1;
    type Pieces<T> = BTreeMap<(Option<i32>, usize, usize), Vec<Complex<T>>>;
    let parts: Vec<Pieces<T>> = m
        .terms
        .par_chunks(CHUNK)
        .enumerate()
        .map(|(ci, chunk)| {
            let mut out: Pieces<T> = BTreeMap::new();
            for (off, t) in chunk.iter().enumerate() {
                let n = ci * CHUNK + off;
                let p = term_packets(m, t, &grid)?;
                let w = m.weight(t);
                let c1: Vec<_> = fk.iter().map(|s| pair(s, &p[0], h)).collect();
                let c2: Vec<_> = gk.iter().map(|s| pair(s, &p[1], h)).collect();
                for k1 in 0..nk {
                    for k2 in 0..nk {
                        let c = w * c1[k1] * c2[k2];
                        let e = out
                            .entry((bucket[n], k1, k2))
                            .or_insert_with(|| vec![Complex::new(T::zero(), T::zero()); grid.len()]);
                        for (k, v) in &p[2] {
                            e[*k] += c * *v;
                        }
                    }
                }
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    let mut merged: Pieces<T> = BTreeMap::new();
    for part in parts {
        for (key, spec) in part {
            let e = merged.entry(key).or_insert_with(|| vec![Complex::new(T::zero(), T::zero()); grid.len()]);
            for (a, b) in e.iter_mut().zip(spec) {
                *a += b;
            }
        }
    }
    let mut t0 = BTreeMap::new();
    let mut t1 = BTreeMap::new();
    for ((b, k1, k2), spec) in merged {
        let f = synthesize(&grid, spec)?;
        match b {
            None => {
                t0.insert((k1, k2), f);
            }
            Some(l) => {
                t1.insert((k1, k2, l), f);
            }
        }
    }
    Ok(DecomposedModelSum { interval: *interval, t0, t1, t0_terms, t1_terms })
}
