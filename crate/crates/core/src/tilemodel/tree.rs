use num_complex::Complex;
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::packet::wave_packet;
use super::{Collection, TriTile, WavePacketProfile};
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::signal::{lp_norm, Exponent, SampledFunction};

/// Largest collection accepted by the exhaustive [`size_star`].
pub const SIZE_STAR_LIMIT: usize = 64;

fn check_index(j: usize) -> Result<usize> {
    if (1..=3).contains(&j) {
        Ok(j - 1)
    } else {
        Err(Error::Parameter(format!("tile index must be 1, 2 or 3, got {j}")))
    }
}

fn in_tree<T: Real>(top: &TriTile<T>, j0: usize, s: &TriTile<T>) -> bool {
    top.time.contains_interval(&s.time) && s.subs[j0].contains_interval(&top.subs[j0])
}

/// `j`-tree with top `t`: members `s` with `I_s ⊂ I_t` and `ω_{t_j} ⊂ ω_{s_j}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Tree<T> {
    pub j: usize,
    pub top: TriTile<T>,
    pub members: Vec<usize>,
}

impl<T: Real> Tree<T> {
    /// `j ∈ {1, 2, 3}`; `members` index into `collection`.
    pub fn new(collection: &Collection<T>, j: usize, top: TriTile<T>, members: Vec<usize>) -> Result<Self> {
        let j0 = check_index(j)?;
        for &m in &members {
            let s = collection
                .tiles
                .get(m)
                .ok_or_else(|| Error::Invariant(format!("member {m} is not in the collection")))?;
            if !in_tree(&top, j0, s) {
                return Err(Error::Invariant(format!("tri-tile {m} violates the {j}-tree condition")));
            }
        }
        Ok(Self { j, top, members })
    }

    /// Largest `j`-tree in `collection` under `top`.
    pub fn maximal(collection: &Collection<T>, j: usize, top: TriTile<T>) -> Result<Self> {
        let j0 = check_index(j)?;
        let members = (0..collection.len()).filter(|&m| in_tree(&top, j0, &collection.tiles[m])).collect();
        Ok(Self { j, top, members })
    }
}

/// `⟨f, φ^j_{s_j}⟩` for every tri-tile of a collection.
#[derive(Debug, Clone, PartialEq)]
pub struct PacketCoefficients<T> {
    pub j: usize,
    pub values: Vec<Complex<T>>,
}

impl<T: Real> PacketCoefficients<T> {
    pub fn new(collection: &Collection<T>, f: &SampledFunction<T>, j: usize, profile: &WavePacketProfile<T>) -> Result<Self> {
        let j0 = check_index(j)?;
        let values = collection
            .tiles
            .iter()
            .map(|s| f.inner(&wave_packet(&s.tile(j0)?, profile, f.grid())?))
            .collect::<Result<_>>()?;
        Ok(Self { j, values })
    }
}

fn tree_sum<T: Real>(members: &[usize], c: &PacketCoefficients<T>) -> T {
    members.iter().map(|&m| c.values[m].norm_sqr()).fold(T::zero(), |a, b| a + b)
}

/// `((1/|I_T|) Σ_{s∈T} |⟨f, φ^j_{s_j}⟩|²)^{1/2}` with `j = coeffs.j`.
pub fn size_tree<T: Real>(tree: &Tree<T>, coeffs: &PacketCoefficients<T>) -> Result<T> {
    if let Some(m) = tree.members.iter().find(|&&m| m >= coeffs.values.len()) {
        return Err(Error::Invariant(format!("member {m} has no coefficient")));
    }
    Ok((tree_sum(&tree.members, coeffs) / tree.top.time.length()).sqrt())
}

fn best_over_tops<T: Real>(q: &Collection<T>, coeffs: &PacketCoefficients<T>, tops: impl Iterator<Item = usize>) -> Result<T> {
    let mut best = T::zero();
    for t in tops {
        for i in 1..=3 {
            if i == coeffs.j {
                continue;
            }
            let tree = Tree::maximal(q, i, q.tiles[t])?;
            best = best.max(size_tree(&tree, coeffs)?);
        }
    }
    Ok(best)
}

/// `sup` of the size over `i`-trees in `Q`, `i ≠ j`, with tops in `Q`.
///
/// The size is monotone in the member set, so the maximal tree under each
/// top attains the supremum for that top.
pub fn size_star<T: Real>(q: &Collection<T>, coeffs: &PacketCoefficients<T>) -> Result<T> {
    if q.len() > SIZE_STAR_LIMIT {
        return Err(Error::Size(format!(
            "{} tri-tiles exceed the exhaustive limit {SIZE_STAR_LIMIT}; use size_star_sampled",
            q.len()
        )));
    }
    best_over_tops(q, coeffs, 0..q.len())
}

/// Non-exhaustive lower estimate of [`size_star`] over `tops` randomly chosen
/// tops. Returns the value and the number of tops examined.
pub fn size_star_sampled<T: Real>(q: &Collection<T>, coeffs: &PacketCoefficients<T>, tops: usize, seed: u64) -> Result<(T, usize)> {
    let k = tops.min(q.len());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut picked: Vec<usize> = sample(&mut rng, q.len(), k).into_vec();
    picked.sort_unstable();
    Ok((best_over_tops(q, coeffs, picked.into_iter())?, k))
}

/// Both sides of the size bound for one function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SizeBoundReport {
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    pub finite: bool,
}

/// `size*_j(Q)` against `sup_s |I_s|^{-1} ∫ (1 + d(x, I_s)/|I_s|)^{-N} |f|`,
/// with `d` the periodic distance to the center of `I_s`.
pub fn size_bound_check<T: Real>(
    q: &Collection<T>,
    f: &SampledFunction<T>,
    j: usize,
    n: T,
    profile: &WavePacketProfile<T>,
) -> Result<SizeBoundReport> {
    let coeffs = PacketCoefficients::new(q, f, j, profile)?;
    let lhs = size_star(q, &coeffs)?;
    let g = f.grid();
    let h = g.spacing();
    let mut rhs = T::zero();
    for s in &q.tiles {
        let len = s.time.length();
        let c = s.time.center();
        let integral = f
            .values()
            .iter()
            .enumerate()
            .map(|(k, v)| (T::one() + g.periodic_offset(g.x(k), c).abs() / len).powf(-n) * v.norm())
            .fold(T::zero(), |a, b| a + b)
            * h;
        rhs = rhs.max(integral / len);
    }
    let (l, r) = (lhs.to_f64_lossy(), rhs.to_f64_lossy());
    let ratio = if r > 0.0 { l / r } else if l == 0.0 { 0.0 } else { f64::INFINITY };
    Ok(SizeBoundReport { lhs: l, rhs: r, ratio, finite: ratio.is_finite() })
}

/// Left side, right side (without constant) and their ratio.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PropositionReport {
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    pub sizes: [f64; 3],
    pub norms: [f64; 3],
}

/// `|Σ_s |I_s|^{-1/2} Π_i ⟨f_i, φ^i_{s_i}⟩|` against
/// `Π_i size*_i(Q)^{θ_i} ‖f_i‖₂^{1−θ_i}`.
pub fn tree_proposition_diagnostic<T: Real>(
    q: &Collection<T>,
    f: [&SampledFunction<T>; 3],
    theta: [T; 3],
    profiles: &[WavePacketProfile<T>; 3],
) -> Result<PropositionReport> {
    let sum = theta[0] + theta[1] + theta[2];
    if (sum - T::one()).abs() > T::lit(1e-12) || theta.iter().any(|t| *t < T::zero() || *t >= T::one()) {
        return Err(Error::Parameter(format!(
            "θ must lie in [0,1) and sum to 1, got ({}, {}, {})",
            theta[0], theta[1], theta[2]
        )));
    }
    let coeffs: Vec<PacketCoefficients<T>> =
        (0..3).map(|i| PacketCoefficients::new(q, f[i], i + 1, &profiles[i])).collect::<Result<_>>()?;
    let mut total = Complex::new(T::zero(), T::zero());
    for (n, s) in q.tiles.iter().enumerate() {
        total += coeffs[0].values[n] * coeffs[1].values[n] * coeffs[2].values[n] / s.time.length().sqrt();
    }
    let mut rhs = T::one();
    let mut sizes = [0.0; 3];
    let mut norms = [0.0; 3];
    for i in 0..3 {
        let s = size_star(q, &coeffs[i])?;
        let nrm = lp_norm(f[i], Exponent::Finite(T::lit(2.0)), None)?;
        sizes[i] = s.to_f64_lossy();
        norms[i] = nrm.to_f64_lossy();
        rhs = rhs * s.powf(theta[i]) * nrm.powf(T::one() - theta[i]);
    }
    let (l, r) = (total.norm().to_f64_lossy(), rhs.to_f64_lossy());
    let ratio = if r > 0.0 { l / r } else if l == 0.0 { 0.0 } else { f64::INFINITY };
    Ok(PropositionReport { lhs: l, rhs: r, ratio, sizes, norms })
}
