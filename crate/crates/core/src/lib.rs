//! Gravitational-wave energy flux, Bondi mass loss and nonlinear memory for
//! Einstein-Maxwell radiative data at null infinity.
//!
//! The [`sphere`] module carries the spectral calculus on the unit sphere;
//! [`radiation`], [`memory`], [`detector`] and [`bondi`] build on it.
//! Units are geometric (`G = c = 1`) throughout.

pub mod detector;
pub mod bondi;
pub mod error;
pub mod par;
pub mod quadrature;
pub mod radiation;
pub mod memory;
pub mod sphere;
pub mod synth;

pub use error::{Error, Result};
