//! Discrete Wigner function on the doubled `(2D) x (2D)` lattice.
//!
//! `W(s, r) = 1/(2D) sum_{k=-l}^{l} conj(c_k) c_{r-k} exp(i pi s (r - 2k) / D)`
//! with `0 <= s < 2D`, `-2l <= r <= 2l + 1` and `c` periodic modulo `D`. The
//! angle is `theta = pi s / D` and the momentum `r / 2`. For odd `D` every
//! class `{(s, r), (s + D, r), (s, r + D), (s + D, r + D)}` has exactly one
//! even-even member, which gives the representative `D x D` grid.

use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::evolution::{flux_evolve, QuantizedTime};
use crate::flux::FluxParameter;
use crate::rotor::{cis_fraction, RotorState};

/// Largest tolerated imaginary part of a freshly built Wigner value.
pub const REALITY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct WignerGrid {
    dim: usize,
    /// `values[s * 2D + (r + 2l)]`
    values: Vec<f64>,
    reality_residue: f64,
}

impl WignerGrid {
    /// Wrap raw values in `s`-major order, `r` running over `-2l..=2l+1`.
    pub fn from_values(dim: usize, values: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Domain("dimension must be at least 1".into()));
        }
        if values.len() != 4 * dim * dim {
            return Err(Error::DimensionMismatch {
                expected: 4 * dim * dim,
                found: values.len(),
            });
        }
        Ok(WignerGrid {
            dim,
            values,
            reality_residue: 0.0,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    fn side(&self) -> usize {
        2 * self.dim
    }

    /// Smallest stored `r`, i.e. `-2l` for odd `D`.
    pub fn r_min(&self) -> i64 {
        -(2 * (self.dim as i64 / 2))
    }

    pub fn r_range(&self) -> std::ops::RangeInclusive<i64> {
        self.r_min()..=self.r_min() + self.side() as i64 - 1
    }

    fn index(&self, s: i64, r: i64) -> usize {
        let side = self.side() as i64;
        let s = s.rem_euclid(side) as usize;
        let r = (r - self.r_min()).rem_euclid(side) as usize;
        s * self.side() + r
    }

    /// `W(s, r)` with both indices taken cyclically over the `2D` range.
    pub fn get(&self, s: i64, r: i64) -> f64 {
        self.values[self.index(s, r)]
    }

    /// `(s, r, W)` in `s`-major order.
    pub fn cells(&self) -> impl Iterator<Item = (i64, i64, f64)> + '_ {
        let side = self.side();
        let r_min = self.r_min();
        self.values
            .iter()
            .enumerate()
            .map(move |(i, &v)| ((i / side) as i64, (i % side) as i64 + r_min, v))
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn total(&self) -> f64 {
        self.values.iter().sum()
    }

    /// Largest `|Im W|` discarded when the grid was built.
    pub fn reality_residue(&self) -> f64 {
        self.reality_residue
    }

    pub fn max_abs_deviation(&self, other: &WignerGrid) -> Result<f64> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }
}

pub fn build_wigner(state: &RotorState) -> Result<WignerGrid> {
    let dim = state.dim();
    let l = state.cutoff() as i64;
    let side = 2 * dim;
    let r_min = -2 * l;
    // exp(-2 pi i t / D), t = 0..D
    let twiddle: Vec<C64> = (0..dim as i128).map(|t| cis_fraction(-t, dim as i128)).collect();
    let norm = 1.0 / side as f64;

    let columns: Vec<(Vec<f64>, f64, i64)> = (0..side as i64)
        .into_par_iter()
        .map(|ri| {
            let r = r_min + ri;
            let products: Vec<C64> = (-l..=l).map(|k| state.amp(k).conj() * state.amp(r - k)).collect();
            // The k-sum is D-periodic in s; only the prefactor exp(i pi s r / D) is not.
            let inner: Vec<C64> = (0..dim)
                .map(|s| {
                    products
                        .iter()
                        .enumerate()
                        .map(|(p, &f)| {
                            let k = p as i64 - l;
                            f * twiddle[((s as i64 * k).rem_euclid(dim as i64)) as usize]
                        })
                        .sum()
                })
                .collect();
            let mut column = Vec::with_capacity(side);
            let (mut residue, mut worst_s) = (0.0f64, 0);
            for s in 0..side {
                let w = cis_fraction(s as i128 * r as i128, side as i128) * inner[s % dim] * norm;
                if w.im.abs() > residue {
                    residue = w.im.abs();
                    worst_s = s as i64;
                }
                column.push(w.re);
            }
            (column, residue, worst_s)
        })
        .collect();

    let mut values = vec![0.0; side * side];
    let mut reality_residue = 0.0f64;
    for (ri, (column, residue, worst_s)) in columns.into_iter().enumerate() {
        if residue > REALITY_TOL {
            return Err(Error::RealityCheck {
                residue,
                s: worst_s,
                r: r_min + ri as i64,
            });
        }
        reality_residue = reality_residue.max(residue);
        for (s, v) in column.into_iter().enumerate() {
            values[s * side + ri] = v;
        }
    }
    Ok(WignerGrid {
        dim,
        values,
        reality_residue,
    })
}

/// `sum_s W(s, r)`: `|c_{r/2}|^2` for even `r`, zero for odd `r`.
pub fn marginal_momentum(grid: &WignerGrid, r: i64) -> Result<f64> {
    let range = grid.r_range();
    if !range.contains(&r) {
        return Err(Error::OutOfRange {
            what: "momentum lattice index r",
            value: r,
            lo: *range.start(),
            hi: *range.end(),
        });
    }
    Ok((0..grid.side() as i64).map(|s| grid.get(s, r)).sum())
}

/// `sum_r W(s, r)`: `|<theta_{s/2}|psi>|^2` for even `s`, zero for odd `s`.
pub fn marginal_angle(grid: &WignerGrid, s: i64) -> Result<f64> {
    let hi = grid.side() as i64 - 1;
    if !(0..=hi).contains(&s) {
        return Err(Error::OutOfRange {
            what: "angle lattice index s",
            value: s,
            lo: 0,
            hi,
        });
    }
    Ok(grid.r_range().map(|r| grid.get(s, r)).sum())
}

/// Values on the even-even sublattice, `(a, b) = (s/2, r/2)` modulo `D`.
#[derive(Debug, Clone, PartialEq)]
pub struct RepresentativeGrid {
    dim: usize,
    /// `values[a * D + b]`
    values: Vec<f64>,
}

impl RepresentativeGrid {
    pub fn from_values(dim: usize, values: Vec<f64>) -> Result<Self> {
        if dim.is_multiple_of(2) {
            return Err(Error::Unsupported(format!(
                "representative grid needs odd dimension, got {dim}"
            )));
        }
        if values.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: values.len(),
            });
        }
        Ok(RepresentativeGrid { dim, values })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Value at `(a, b)`, both taken modulo `D`.
    pub fn get(&self, a: i64, b: i64) -> f64 {
        let d = self.dim as i64;
        self.values[(a.rem_euclid(d) * d + b.rem_euclid(d)) as usize]
    }

    /// `(a, b, value)` in `a`-major order.
    pub fn cells(&self) -> impl Iterator<Item = (i64, i64, f64)> + '_ {
        let d = self.dim;
        self.values
            .iter()
            .enumerate()
            .map(move |(i, &v)| ((i / d) as i64, (i % d) as i64, v))
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn max_abs_deviation(&self, other: &RepresentativeGrid) -> Result<f64> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }
}

pub fn representative(grid: &WignerGrid) -> Result<RepresentativeGrid> {
    let d = grid.dim();
    if d.is_multiple_of(2) {
        return Err(Error::Unsupported(format!(
            "no canonical representative point for even dimension {d}"
        )));
    }
    let mut values = Vec::with_capacity(d * d);
    for a in 0..d as i64 {
        for b in 0..d as i64 {
            values.push(grid.get(2 * a, 2 * b));
        }
    }
    Ok(RepresentativeGrid { dim: d, values })
}

/// Relabel the lattice after `j` quanta of `dilation` base quanta each:
/// `out(s, r) = in(s - 2 J r + 4 J alpha, r)` with `J = j n'`.
///
/// Fails when `4 J alpha` is not an integer, since the shear then has no
/// lattice image at all.
pub fn shear_transport(grid: &WignerGrid, j: u64, dilation: u64, alpha: &FluxParameter) -> Result<WignerGrid> {
    let quanta = (j * dilation) as i64;
    let offset = alpha.as_rational().mul_int(4 * quanta);
    if !offset.is_integer() {
        return Err(Error::FluxNotAdmissible {
            alpha: *alpha,
            steps: quanta as u64,
            reason: "the s-shear 4 j n' alpha is not an integer",
        });
    }
    let side = grid.side() as i64;
    let offset = offset.numer().rem_euclid(side);
    let shear = (2 * quanta).rem_euclid(side);
    let mut values = vec![0.0; grid.values.len()];
    for (s, r, _) in grid.cells() {
        let src = s - shear * r + offset;
        values[grid.index(s, r)] = grid.get(src, r);
    }
    Ok(WignerGrid {
        dim: grid.dim,
        values,
        reality_residue: grid.reality_residue,
    })
}

/// The shear `s -> s - 2 J r + 4 J alpha` keeps `s` even for every `r`.
pub fn representative_invariant(j: u64, dilation: u64, alpha: &FluxParameter) -> bool {
    let quanta = (j * dilation) as i64;
    let offset = alpha.as_rational().mul_int(4 * quanta);
    // 2 J r is always even, so only the constant part decides the parity.
    offset.is_integer() && offset.numer() % 2 == 0
}

/// Max-abs difference between the Wigner function of the evolved state and
/// the sheared Wigner function of the initial state.
pub fn verify_shear_equivalence(state: &RotorState, j: u64, dilation: u64, alpha: &FluxParameter) -> Result<f64> {
    if !representative_invariant(j, dilation, alpha) {
        return Err(Error::FluxNotAdmissible {
            alpha: *alpha,
            steps: j * dilation,
            reason: "2 j n' alpha is not an integer, so the representative lattice is not left invariant",
        });
    }
    let qt = QuantizedTime::new(j, dilation, state.dim())?;
    let evolved = build_wigner(&flux_evolve(state, &qt, alpha)?)?;
    let transported = shear_transport(&build_wigner(state)?, j, dilation, alpha)?;
    evolved.max_abs_deviation(&transported)
}
