//! Error type shared across the crate.

use thiserror::Error;

#[derive(Error, Debug)]
pub enum CoreError {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("wavefunctions live on different grids")]
    GridMismatch,

    #[error("relaxation did not converge after {steps} steps (last energy {last_energy})")]
    NotConverged { steps: usize, last_energy: f64 },

    #[error("only {found} bound states below zero energy, {requested} requested")]
    BoundStateShortfall { found: usize, requested: usize },

    #[error("all chaotic-light modes were removed by spectral holes")]
    EmptySpectrum,

    #[error("non-finite amplitudes at step {step}")]
    NonFinite { step: usize },

    #[error("enhancement undefined: reference probability P_l + P_n is zero")]
    UndefinedEnhancement,

    #[error("realization with seed {seed} failed: {source}")]
    Realization {
        seed: u64,
        #[source]
        source: Box<CoreError>,
    },

    #[error("spectrum cache: {0}")]
    Cache(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
