//! Steady states, stability, nonreciprocal transmission and added noise of a
//! gain-assisted two-cavity optomechanical amplifier.

pub mod constants;
pub mod exec;
pub mod noise;
pub mod nonreciprocity;
pub mod numerics;
pub mod params;
pub mod presets;
pub mod stability;
pub mod steady;

use thiserror::Error;

pub use exec::Execution;
pub use params::{Direction, EffectiveParams, ParamSpec, SystemParams};
pub use stability::Stability;
pub use steady::SteadyBranch;

/// Any error raised by this crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error(transparent)]
    Param(#[from] params::ParamError),
    #[error(transparent)]
    Numerics(#[from] numerics::NumericsError),
    #[error(transparent)]
    SteadyState(#[from] steady::SteadyStateError),
    #[error(transparent)]
    Analysis(#[from] nonreciprocity::AnalysisError),
    #[error(transparent)]
    Noise(#[from] noise::NoiseError),
}
