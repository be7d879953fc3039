//! Ruin probabilities and expected surplus under ruin constraints for a
//! proof-of-work miner, either following the protocol or withholding blocks
//! with a two-block buffer.
//!
//! Closed forms are generic over [`Scalar`] (`f64` and `f32`); the
//! Monte-Carlo oracle in [`montecarlo`] and the figure tables in [`figures`]
//! work in `f64`.

pub mod error;
pub mod figures;
pub mod honest;
pub mod montecarlo;
pub mod orderstats;
pub mod params;
pub mod rootfind;
pub mod scalar;
pub mod segments;
pub mod selfish;

pub use error::{Error, Result};
pub use params::{EconomicInputs, MiningParams};
pub use scalar::Scalar;

pub type Params = MiningParams<f64>;
pub type Params32 = MiningParams<f32>;
pub type Economics = EconomicInputs<f64>;
