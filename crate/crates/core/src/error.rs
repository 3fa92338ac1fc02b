use thiserror::Error;

use crate::flux::FluxParameter;

/// Errors raised by the numerical modules.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{what} = {value} is outside the valid range [{lo}, {hi}]")]
    OutOfRange {
        what: &'static str,
        value: i64,
        lo: i64,
        hi: i64,
    },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    /// The flux/time-quantum combination leaves the Wigner lattice (or its
    /// representative sublattice) without a well defined image.
    #[error(
        "flux alpha = {alpha} is not admissible after {steps} time quanta: {reason}; \
         the Wigner function would not even be defined"
    )]
    FluxNotAdmissible {
        alpha: FluxParameter,
        steps: u64,
        reason: &'static str,
    },

    #[error("reality check failed: imaginary residue {residue:e} at (s = {s}, r = {r})")]
    RealityCheck { residue: f64, s: i64, r: i64 },

    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
