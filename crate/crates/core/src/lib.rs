//! Bilinear singular-integral operators whose symbols are singular along a
//! line in frequency space, together with their wave-packet model sums,
//! maximal variants, weight classes and numerical estimate harnesses.
//!
//! All numerical code is generic over [`Real`] (`f32` or `f64`); the aliases
//! below fix `f64`.

pub mod error;
pub mod scalar;
pub mod signal;
pub mod symbol;
pub mod operator;
pub mod tilemodel;
pub mod weights;
pub mod experiments;

pub use error::{Error, Result};
pub use scalar::Real;

pub type Grid = signal::Grid<f64>;
pub type SampledFunction = signal::SampledFunction<f64>;
pub type Spectrum = signal::Spectrum<f64>;
pub type Interval = signal::Interval<f64>;
pub type Symbol = symbol::Symbol<f64>;
pub type SingularLine = symbol::SingularLine<f64>;
pub type Tile = tilemodel::Tile<f64>;
pub type TriTile = tilemodel::TriTile<f64>;
pub type Collection = tilemodel::Collection<f64>;
pub type ModelSum = tilemodel::ModelSum<f64>;
