//! Rotor dynamics in a truncated `(2l+1)`-dimensional Hilbert space.
//!
//! - [`rotor`]: momentum and angle states, cyclic ladders.
//! - [`evolution`]: free and flux-threaded evolution at quantized times,
//!   revival scans.
//! - [`wigner`]: the doubled-lattice Wigner function, its marginals,
//!   representative sublattice and shear transport.
//! - [`flux`]: exact-rational admissibility of flux values and time-quantum
//!   dilations.
//! - [`classical`]: the arithmetical twist map and the quantum/classical
//!   transport comparison.
//! - [`config`], [`output`], [`run`]: batch configuration, file formats and
//!   the driver used by the command-line tool; [`selftest`] runs quick
//!   invariant checks.

pub mod classical;
pub mod config;
pub mod error;
pub mod evolution;
pub mod flux;
pub mod output;
pub mod rotor;
pub mod run;
pub mod selftest;
pub mod wigner;

pub use error::{Error, Result};
