//! Time-frequency combinatorics: tiles, tri-tiles, collections, wave packets,
//! model sums and their decomposition, trees and sizes, and a Whitney-type
//! discretization of symbols singular along a line.
//!
//! Time is in spatial units and frequency in cycles per unit length, so a
//! wave packet on `I × ω` oscillates like `e^{2πi x c(ω)}`.

mod collection;
mod model;
mod packet;
pub mod text;
mod tree;
mod whitney;

pub use collection::{collection_validate, Collection, ValidationReport};
pub use model::{model_sum_decompose, model_sum_eval, trilinear_form, DecomposedModelSum, ModelSum, ModelTerm};
pub use packet::{profile_seminorm, wave_packet, WavePacketProfile};
pub use tree::{
    size_bound_check, size_star, size_star_sampled, size_tree, tree_proposition_diagnostic, PacketCoefficients,
    PropositionReport, SizeBoundReport, Tree, SIZE_STAR_LIMIT,
};
pub use whitney::{probe_pairs, whitney_decompose, WhitneyConfig, WhitneyModel, WhitneyReport};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::signal::Interval;

const AREA_TOL: f64 = 1e-12;

/// Rectangle `I × ω` of area one (`ω` in cycles).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tile<T> {
    pub time: Interval<T>,
    pub freq: Interval<T>,
}

impl<T: Real> Tile<T> {
    pub fn new(time: Interval<T>, freq: Interval<T>) -> Result<Self> {
        let area = time.length() * freq.length();
        if (area - T::one()).abs() > T::lit(AREA_TOL).max(T::epsilon() * T::lit(16.0)) {
            return Err(Error::Invariant(format!("tile area is {area}, expected 1")));
        }
        Ok(Self { time, freq })
    }

    /// Tile with time interval `I` and frequency interval of length `1/|I|` centered at `w`.
    pub fn from_time(time: Interval<T>, center_freq: T) -> Result<Self> {
        Self::new(time, Interval::new(center_freq, T::one() / time.length())?)
    }
}

/// Tri-tile `I_s × ω_s` carrying three tiles `I_s × ω_{s_i}`.
///
/// Frequencies are stored in chart coordinates; sub-frequency `i` maps to
/// physical frequency by multiplication with `scales[i]`. The identity chart
/// has all scales equal to one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TriTile<T> {
    pub time: Interval<T>,
    pub freq: Interval<T>,
    pub subs: [Interval<T>; 3],
    pub scales: [T; 3],
}

impl<T: Real> TriTile<T> {
    pub fn new(time: Interval<T>, freq: Interval<T>, subs: [Interval<T>; 3]) -> Result<Self> {
        Self::with_chart(time, freq, subs, [T::one(); 3])
    }

    pub fn with_chart(time: Interval<T>, freq: Interval<T>, subs: [Interval<T>; 3], scales: [T; 3]) -> Result<Self> {
        let t = Self { time, freq, subs, scales };
        for s in &scales {
            if *s == T::zero() || !s.is_finite() {
                return Err(Error::Invariant("chart scales must be finite and nonzero".into()));
            }
        }
        for i in 0..3 {
            t.tile(i)?;
            if !freq.contains_interval(&subs[i]) {
                return Err(Error::Invariant(format!("sub-frequency {} is not inside ω_s", i + 1)));
            }
            for j in i + 1..3 {
                if subs[i].overlaps(&subs[j]) {
                    return Err(Error::Invariant(format!("sub-frequencies {} and {} intersect", i + 1, j + 1)));
                }
            }
        }
        Ok(t)
    }

    /// Physical tile `I_s × ω_{s_i}` (`i` in `0..3`).
    pub fn tile(&self, i: usize) -> Result<Tile<T>> {
        let s = self.scales[i];
        let w = self.subs[i];
        Tile::new(self.time, Interval::new(s * w.center(), s.abs() * w.length())?)
    }

    /// `|I_s|·|ω_s|` in chart units.
    pub fn area(&self) -> T {
        self.time.length() * self.freq.length()
    }

    /// Same tri-tile with the time interval moved by `k·|I_s|`.
    pub fn translated(&self, k: T) -> Self {
        Self { time: self.time.translate(k * self.time.length()), ..*self }
    }

    /// Mirror image `ω ↦ −ω` in every frequency.
    pub fn reflect_frequency(&self) -> Self {
        let r = |w: Interval<T>| Interval::new(-w.center(), w.length()).expect("valid interval");
        Self { time: self.time, freq: r(self.freq), subs: [r(self.subs[0]), r(self.subs[1]), r(self.subs[2])], scales: self.scales }
    }
}
