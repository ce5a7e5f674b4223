//! Forward models and estimators for a cavity-enhanced optomechanical
//! displacement sensor.
//!
//! The crate is organised bottom-up:
//!
//! - [`constants`] and [`spectrum`]: physical constants, the one-sided
//!   [`NoiseSpectrum`] container and its CSV format.
//! - [`cavity`]: Fabry-Perot cavity, Pound-Drever-Hall readout and the
//!   shot-noise-limited displacement sensitivity.
//! - [`mechanics`]: mechanical modes, fluctuation-dissipation thermal noise,
//!   clamped-beam mode shapes and optical-spot overlap.
//! - [`budget`]: the composed displacement noise budget.
//! - [`feedback`]: cold-damping feedback and effective temperatures.
//! - [`dsp`]: time-series synthesis, Welch estimation and Lorentzian fits.
//! - [`scenario`] and [`commands`]: configuration files and the command
//!   runner behind the `optomech` binary.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod budget;
pub mod cavity;
pub mod commands;
pub mod constants;
pub mod dsp;
mod error;
pub mod feedback;
pub mod mechanics;
pub(crate) mod numeric;
pub mod scenario;
pub mod spectrum;

pub use error::{Error, Result};
pub use spectrum::{AmplitudeSpectrum, FrequencyGrid, GridSpacing, NoiseSpectrum, SpectrumUnit};
