//! Models of a roadside sensing base station that serves users and detects
//! targets with one OFDM waveform.
//!
//! - [`array_geometry`]: concentric circular array, steering vectors.
//! - [`beamforming`]: per-beam weights and the regularized joint combiner.
//! - [`ofdm_isac`]: symbol-domain echo synthesis, range/velocity estimation
//!   and the closed-form bin-decision theory, plus a Monte Carlo harness.
//! - [`link_budget`]: Rician outage, capacity, communication and sensing range.
//! - [`scanning`]: road footprint of the detection beam and its scan period.
//! - [`frame_scheduler`]: TDD half-frame layout and beam/time/frequency
//!   user allocation.
//!
//! Every numeric model is generic over [`Scalar`] (`f32` or `f64`); the
//! aliases below fix the scalar to `f64`.

pub mod array_geometry;
pub mod beamforming;
mod error;
pub mod frame_scheduler;
pub mod link_budget;
pub mod ofdm_isac;
mod scalar;
pub mod scanning;
pub mod special;
pub mod units;

pub use error::{Error, Result};
pub use scalar::Scalar;

/// Double-precision scalar used by the aliases.
pub type Real = f64;

pub type ArrayConfig = array_geometry::ArrayConfig<Real>;
pub type Direction = array_geometry::Direction<Real>;
pub type SteeringVector = array_geometry::SteeringVector<Real>;
pub type SteeringMatrix = array_geometry::SteeringMatrix<Real>;
pub type BeamSpec = beamforming::BeamSpec<Real>;
pub type WeightVector = beamforming::WeightVector<Real>;
pub type WeightMatrix = beamforming::WeightMatrix<Real>;
pub type DesiredResponse = beamforming::DesiredResponse<Real>;
pub type BeamPattern = beamforming::BeamPattern<Real>;
pub type CombinerSolution = beamforming::CombinerSolution<Real>;
pub type OfdmConfig = ofdm_isac::OfdmConfig<Real>;
pub type EchoModel = ofdm_isac::EchoModel<Real>;
pub type SymbolMatrix = ofdm_isac::SymbolMatrix<Real>;
pub type DivisionGrid = ofdm_isac::DivisionGrid<Real>;
pub type RadioParams = link_budget::RadioParams<Real>;
pub type SceneGeometry = scanning::SceneGeometry<Real>;
pub type BeamWidths = scanning::BeamWidths<Real>;
pub type Footprint = scanning::Footprint<Real>;
