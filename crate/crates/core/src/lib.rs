//! Time-dependent Schrödinger dynamics of a one-dimensional soft-core atom
//! driven by femtosecond laser pulses, Gaussian white noise, and synthesized
//! broadband chaotic light.
//!
//! Everything is in atomic units (ħ = m = e = 1). The dynamical core is a
//! stochastic split-operator stepper: kinetic half steps applied in momentum
//! space via FFT, a coordinate-space phase for the atomic potential plus the
//! dipole-coupled fields, and one Gaussian momentum kick per step for the
//! white-noise term. Ionization is measured both as the probability current
//! through a distant probe point and as the norm removed by the absorbing
//! boundary.
//!
//! Modules follow the physical decomposition:
//!
//! * [`qsystem`] — grid, wavefunctions, the soft-core atom, and its bound
//!   spectrum (imaginary-time relaxation).
//! * [`fields`] — laser/probe pulses, white-noise and chaotic-light
//!   specifications, and their composition into a timed schedule.
//! * [`propagator`] — the split-operator stepper, absorbing boundary, and
//!   single-realization driver.
//! * [`observables`] — flux, ionization probability, enhancement factor,
//!   ensemble statistics, energy absorption, and power spectra.
//! * [`ensemble`] — deterministic seeded execution of many realizations,
//!   optionally in parallel (feature `parallel`, on by default).

// `!(x > 0.0)` guards are deliberate: they reject NaN along with the
// out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod ensemble;
pub mod error;
pub mod fft;
pub mod fields;
pub mod observables;
pub mod propagator;
pub mod qsystem;
pub mod rng;

pub use error::CoreError;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, CoreError>;
