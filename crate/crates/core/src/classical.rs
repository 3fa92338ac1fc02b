//! The arithmetical twist map on the representative lattice.
//!
//! On `(Z_D)^2` the map is `(a, b) -> (a - 2b mod D, b)`, the integer form of
//! `x -> x - 2y (mod 1)`, `y -> y` with `x = a/D`, `y = b/D`. At quantized times
//! free quantum evolution of the Wigner function is exactly this relabeling.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::evolution::{free_evolve, QuantizedTime};
use crate::rotor::RotorState;
use crate::wigner::{build_wigner, representative, RepresentativeGrid};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct TwistPoint {
    a: i64,
    b: i64,
    dim: i64,
}

impl TwistPoint {
    pub fn new(a: i64, b: i64, dim: usize) -> Result<Self> {
        let d = dim as i64;
        if dim == 0 {
            return Err(Error::Domain("dimension must be at least 1".into()));
        }
        for (what, v) in [("angle coordinate a", a), ("momentum coordinate b", b)] {
            if !(0..d).contains(&v) {
                return Err(Error::OutOfRange {
                    what,
                    value: v,
                    lo: 0,
                    hi: d - 1,
                });
            }
        }
        Ok(TwistPoint { a, b, dim: d })
    }

    pub fn a(&self) -> i64 {
        self.a
    }

    pub fn b(&self) -> i64 {
        self.b
    }

    pub fn dim(&self) -> usize {
        self.dim as usize
    }

    /// Continuous torus coordinates `(x, y) = (a/D, b/D)`.
    pub fn xy(&self) -> (f64, f64) {
        (self.a as f64 / self.dim as f64, self.b as f64 / self.dim as f64)
    }
}

pub fn twist_step(p: &TwistPoint) -> TwistPoint {
    TwistPoint {
        a: (p.a - 2 * p.b).rem_euclid(p.dim),
        ..*p
    }
}

/// Inverse of [`twist_step`]: `a = a' + 2b mod D`.
pub fn twist_step_inverse(p: &TwistPoint) -> TwistPoint {
    TwistPoint {
        a: (p.a + 2 * p.b).rem_euclid(p.dim),
        ..*p
    }
}

/// `j` applications of the twist in one step.
pub fn twist_power(p: &TwistPoint, j: u64) -> TwistPoint {
    let shear = ((2 * j as u128) % p.dim as u128) as i64;
    TwistPoint {
        a: (p.a - shear * p.b).rem_euclid(p.dim),
        ..*p
    }
}

/// Least `j >= 1` with the `j`-th iterate equal to the identity on every point.
pub fn map_period(dim: usize) -> Result<u64> {
    if dim.is_multiple_of(2) {
        return Err(Error::Unsupported(format!("map period needs odd dimension, got {dim}")));
    }
    let points: Vec<TwistPoint> = (0..dim as i64)
        .flat_map(|a| (0..dim as i64).map(move |b| TwistPoint { a, b, dim: dim as i64 }))
        .collect();
    let mut current = points.clone();
    for j in 1.. {
        for p in current.iter_mut() {
            *p = twist_step(p);
        }
        if current == points {
            return Ok(j);
        }
    }
    unreachable!()
}

/// Length of the orbit of `p` under the twist.
pub fn orbit_length(p: &TwistPoint) -> u64 {
    let mut q = twist_step(p);
    let mut n = 1;
    while q != *p {
        q = twist_step(&q);
        n += 1;
    }
    n
}

/// Transport the representative grid through `j` twist steps:
/// `out(a, b) = in((a - 2 j b) mod D, b)`.
pub fn transport_grid(rep: &RepresentativeGrid, j: u64) -> RepresentativeGrid {
    let d = rep.dim() as i64;
    let shear = ((2 * j as u128) % d as u128) as i64;
    let values = rep.cells().map(|(a, b, _)| rep.get(a - shear * b, b)).collect();
    RepresentativeGrid::from_values(rep.dim(), values).expect("same shape as input")
}

/// Max-abs difference between the representative Wigner grid of the freely
/// evolved state and the classically transported initial grid.
pub fn compare_quantum_classical(state: &RotorState, j: u64) -> Result<f64> {
    let qt = QuantizedTime::base(j, state.dim())?;
    let quantum = representative(&build_wigner(&free_evolve(state, &qt)?)?)?;
    let classical = transport_grid(&representative(&build_wigner(state)?)?, j);
    quantum.max_abs_deviation(&classical)
}
