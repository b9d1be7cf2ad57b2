//! High-precision Toeplitz determinants with gap symbols, their asymptotic
//! expansions, and numerical checks of the associated Riemann–Hilbert
//! parametrices.

pub mod asymptotics;
pub mod cli;
pub mod cue;
pub mod equilibrium;
pub mod error;
pub mod numerics;
pub mod parametrix;
pub mod sine_kernel;
pub mod symbol;
pub mod toeplitz;

pub use error::{Error, Result};
