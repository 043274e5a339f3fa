//! Pulse-level simulation of superconducting qubit gates.
//!
//! Units: `ħ = 1`, amplitudes and detunings are angular rates, and every propagator is
//! `U = exp(−iHt)`.

pub mod calibrate;
pub mod crgate;
pub mod envelope;
pub mod error;
pub mod hamiltonian;
pub mod hardware;
pub mod io;
pub mod magnus;
pub mod numkit;
pub mod propagate;
pub mod spectral;

pub use error::{Error, Result};

/// Crate version, recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
