//! States of the truncated `(2l+1)`-dimensional rotor Hilbert space.
//!
//! Amplitudes are stored in momentum order `m = -l..=l` at position `m + l`.
//! Indices outside `[-l, l]` wrap modulo `D = 2l + 1`, so the momentum
//! ladder and the angle ladder are both cyclic.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64 as C64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// `exp(2 pi i num / den)` with the argument reduced modulo `den` before the
/// transcendental call.
pub(crate) fn cis_fraction(num: i128, den: i128) -> C64 {
    let reduced = num.rem_euclid(den);
    C64::from_polar(1.0, TAU * reduced as f64 / den as f64)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RotorState {
    l: usize,
    amps: Vec<C64>,
}

impl RotorState {
    /// Build a state from amplitudes in `m = -l..=l` order, normalizing them.
    pub fn from_amplitudes(l: usize, amps: Vec<C64>) -> Result<Self> {
        let dim = 2 * l + 1;
        if amps.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: amps.len(),
            });
        }
        let norm = amps.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::Domain(format!("cannot normalize a state of norm {norm}")));
        }
        Ok(RotorState {
            l,
            amps: amps.into_iter().map(|c| c / norm).collect(),
        })
    }

    /// Amplitudes that are already normalized (output of a unitary map).
    pub(crate) fn from_unitary_image(l: usize, amps: Vec<C64>) -> Self {
        debug_assert_eq!(amps.len(), 2 * l + 1);
        RotorState { l, amps }
    }

    /// Gaussian random amplitudes, normalized.
    pub fn random<R: Rng + ?Sized>(l: usize, rng: &mut R) -> Self {
        let amps = (0..2 * l + 1)
            .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        Self::from_amplitudes(l, amps).expect("gaussian sample has nonzero norm")
    }

    pub fn cutoff(&self) -> usize {
        self.l
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    /// Amplitudes in `m = -l..=l` order.
    pub fn amps(&self) -> &[C64] {
        &self.amps
    }

    /// `c_m`, with `m` taken modulo `D`.
    pub fn amp(&self, m: i64) -> C64 {
        self.amps[self.position(m)]
    }

    fn position(&self, m: i64) -> usize {
        (m + self.l as i64).rem_euclid(self.dim() as i64) as usize
    }

    /// `(m, c_m)` pairs over `m = -l..=l`.
    pub fn momenta(&self) -> impl Iterator<Item = (i64, C64)> + '_ {
        let l = self.l as i64;
        self.amps.iter().enumerate().map(move |(p, &c)| (p as i64 - l, c))
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|c| c.norm_sqr()).sum()
    }
}

/// Amplitudes `<theta_n|psi>` on the angle grid `theta_n = 2 pi n / D`.
#[derive(Debug, Clone, PartialEq)]
pub struct AngleRepresentation {
    pub vals: Vec<C64>,
    pub thetas: Vec<f64>,
}

impl AngleRepresentation {
    pub fn dim(&self) -> usize {
        self.vals.len()
    }

    /// Probabilities `|<theta_n|psi>|^2`.
    pub fn probabilities(&self) -> Vec<f64> {
        self.vals.iter().map(|v| v.norm_sqr()).collect()
    }

    /// Expand back into the momentum basis.
    pub fn to_state(&self) -> Result<RotorState> {
        let dim = self.dim();
        if dim.is_multiple_of(2) {
            return Err(Error::Unsupported(format!("even dimension {dim}")));
        }
        let l = (dim - 1) / 2;
        let scale = 1.0 / (dim as f64).sqrt();
        let amps = (0..dim)
            .map(|p| {
                let m = p as i128 - l as i128;
                self.vals
                    .iter()
                    .enumerate()
                    .map(|(n, &v)| v * cis_fraction(-m * n as i128, dim as i128))
                    .sum::<C64>()
                    * scale
            })
            .collect();
        Ok(RotorState::from_unitary_image(l, amps))
    }
}

fn check_angle_index(l: usize, n: i64) -> Result<()> {
    let hi = 2 * l as i64;
    if !(0..=hi).contains(&n) {
        return Err(Error::OutOfRange {
            what: "angle index n",
            value: n,
            lo: 0,
            hi,
        });
    }
    Ok(())
}

/// The momentum eigenstate `|m>`.
pub fn make_momentum_state(l: usize, m: i64) -> Result<RotorState> {
    let li = l as i64;
    if !(-li..=li).contains(&m) {
        return Err(Error::OutOfRange {
            what: "momentum m",
            value: m,
            lo: -li,
            hi: li,
        });
    }
    let mut amps = vec![C64::new(0.0, 0.0); 2 * l + 1];
    amps[(m + li) as usize] = C64::new(1.0, 0.0);
    Ok(RotorState { l, amps })
}

/// The angle eigenstate `|theta_n> = D^{-1/2} sum_m exp(-i m theta_n) |m>`.
pub fn make_angle_state(l: usize, n: i64) -> Result<RotorState> {
    check_angle_index(l, n)?;
    let dim = (2 * l + 1) as i128;
    let scale = 1.0 / (dim as f64).sqrt();
    let amps = (-(l as i128)..=l as i128)
        .map(|m| cis_fraction(-m * n as i128, dim) * scale)
        .collect();
    Ok(RotorState { l, amps })
}

/// `theta_n = 2 pi n / (2l + 1)`.
pub fn angle_eigenvalue(l: usize, n: i64) -> Result<f64> {
    check_angle_index(l, n)?;
    Ok(TAU * n as f64 / (2 * l + 1) as f64)
}

/// A Gaussian packet `c_m ~ exp(-width^2 m^2 / 2) exp(-i m center)`, peaked
/// at `center` (radians) with angular width `width`.
pub fn make_gaussian_packet(l: usize, center_angle: f64, width: f64) -> Result<RotorState> {
    if width <= 0.0 || !width.is_finite() {
        return Err(Error::Domain(format!(
            "packet width must be positive and finite, got {width}"
        )));
    }
    if !center_angle.is_finite() {
        return Err(Error::Domain(format!(
            "packet center must be finite, got {center_angle}"
        )));
    }
    let center = center_angle.rem_euclid(2.0 * PI);
    let amps = (-(l as i64)..=l as i64)
        .map(|m| {
            let m = m as f64;
            C64::from_polar((-0.5 * width * width * m * m).exp(), -m * center)
        })
        .collect();
    RotorState::from_amplitudes(l, amps)
}

pub fn to_angle_representation(state: &RotorState) -> AngleRepresentation {
    let dim = state.dim();
    let scale = 1.0 / (dim as f64).sqrt();
    let vals = (0..dim as i128)
        .map(|n| {
            state
                .momenta()
                .map(|(m, c)| c * cis_fraction(m as i128 * n, dim as i128))
                .sum::<C64>()
                * scale
        })
        .collect();
    let thetas = (0..dim).map(|n| TAU * n as f64 / dim as f64).collect();
    AngleRepresentation { vals, thetas }
}

/// `<a|b> = sum_m conj(a_m) b_m`.
pub fn inner_product(a: &RotorState, b: &RotorState) -> Result<C64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    Ok(a.amps.iter().zip(&b.amps).map(|(x, y)| x.conj() * y).sum())
}

/// Cyclic momentum ladder: `|m> -> |m+1>`, with `|l>` wrapping to `|-l>`.
pub fn momentum_shift(state: &RotorState) -> RotorState {
    let mut amps = state.amps.clone();
    amps.rotate_right(1);
    RotorState { l: state.l, amps }
}

/// Cyclic angle ladder: `|theta_n> -> |theta_{n+1}>`, with `|theta_{2l}>`
/// wrapping to `|theta_0>`.
pub fn angle_shift(state: &RotorState) -> RotorState {
    angle_shift_by(state, 1)
}

/// `angle_shift` applied `steps` times.
pub fn angle_shift_by(state: &RotorState, steps: i64) -> RotorState {
    let dim = state.dim() as i128;
    let amps = state
        .momenta()
        .map(|(m, c)| c * cis_fraction(-(m as i128) * steps as i128, dim))
        .collect();
    RotorState { l: state.l, amps }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const TOL: f64 = 1e-12;

    fn close(a: C64, b: C64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn momentum_states() {
        let s = make_momentum_state(0, 0).unwrap();
        assert_eq!(s.amps(), &[C64::new(1.0, 0.0)]);
        let s = make_momentum_state(1, 1).unwrap();
        assert_eq!(s.amps(), &[C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(1.0, 0.0)]);
        let err = make_momentum_state(1, 2).unwrap_err();
        assert_eq!(
            err,
            Error::OutOfRange {
                what: "momentum m",
                value: 2,
                lo: -1,
                hi: 1
            }
        );
        assert!(err.to_string().contains("[-1, 1]"));
    }

    #[test]
    fn angle_states() {
        let s = make_angle_state(1, 0).unwrap();
        for c in s.amps() {
            assert!(close(*c, C64::new(1.0 / 3f64.sqrt(), 0.0), TOL));
        }
        assert!(close(make_angle_state(0, 0).unwrap().amp(0), C64::new(1.0, 0.0), TOL));
        let s = make_angle_state(1, 1).unwrap();
        for m in -1..=1 {
            let want = C64::from_polar(1.0 / 3f64.sqrt(), -(m as f64) * TAU / 3.0);
            assert!(close(s.amp(m), want, TOL));
        }
        assert!((s.norm_sqr() - 1.0).abs() < TOL);
        assert!(make_angle_state(1, 3).is_err());
        assert!(make_angle_state(1, -1).is_err());
    }

    #[test]
    fn angle_eigenvalues() {
        assert!((angle_eigenvalue(1, 1).unwrap() - TAU / 3.0).abs() < 1e-15);
        assert_eq!(angle_eigenvalue(1, 0).unwrap(), 0.0);
        assert!((angle_eigenvalue(2, 4).unwrap() - 8.0 * PI / 5.0).abs() < 1e-15);
        assert!(angle_eigenvalue(2, 5).is_err());
    }

    #[test]
    fn gaussian_packets() {
        // Hand normalization for l = 1, sigma = 1.
        let s = make_gaussian_packet(1, 0.0, 1.0).unwrap();
        let e = (-0.5f64).exp();
        let norm = (1.0 + 2.0 * e * e).sqrt();
        assert!(close(s.amp(0), C64::new(1.0 / norm, 0.0), TOL));
        assert!(close(s.amp(1), C64::new(e / norm, 0.0), TOL));
        assert!(close(s.amp(-1), C64::new(e / norm, 0.0), TOL));

        let wide = make_gaussian_packet(5, 0.3, 50.0).unwrap();
        assert!((wide.amp(0).norm() - 1.0).abs() < TOL);

        let argmax = |s: &RotorState| {
            let p = to_angle_representation(s).probabilities();
            (0..p.len()).max_by(|&a, &b| p[a].total_cmp(&p[b])).unwrap()
        };
        let l = 20;
        assert_eq!(argmax(&make_gaussian_packet(l, 0.0, 0.3).unwrap()), 0);
        // pi sits between lattice points 20 and 21 when D = 41.
        let peak = argmax(&make_gaussian_packet(l, PI, 0.3).unwrap());
        assert!(peak == l || peak == l + 1, "peak {peak}");

        assert!(make_gaussian_packet(1, 0.0, 0.0).is_err());
        assert!(make_gaussian_packet(1, 0.0, -1.0).is_err());
    }

    #[test]
    fn angle_representation_examples() {
        let rep = to_angle_representation(&make_momentum_state(1, 0).unwrap());
        for v in &rep.vals {
            assert!(close(*v, C64::new(1.0 / 3f64.sqrt(), 0.0), TOL));
        }
        let rep = to_angle_representation(&make_angle_state(1, 2).unwrap());
        for (n, v) in rep.vals.iter().enumerate() {
            let want = if n == 2 { 1.0 } else { 0.0 };
            assert!(close(*v, C64::new(want, 0.0), TOL));
        }
        assert_eq!(rep.thetas.len(), 3);
        assert_eq!(rep.thetas[0], 0.0);
    }

    #[test]
    fn inner_products() {
        let t0 = make_angle_state(1, 0).unwrap();
        let t1 = make_angle_state(1, 1).unwrap();
        assert!(close(inner_product(&t0, &t0).unwrap(), C64::new(1.0, 0.0), TOL));
        assert!(close(inner_product(&t0, &t1).unwrap(), C64::new(0.0, 0.0), TOL));
        let m0 = make_momentum_state(3, 0).unwrap();
        for n in 0..7 {
            let t = make_angle_state(3, n).unwrap();
            let v = inner_product(&m0, &t).unwrap();
            assert!(close(v, C64::new(1.0 / 7f64.sqrt(), 0.0), TOL));
        }
        assert!(matches!(
            inner_product(&t0, &m0),
            Err(Error::DimensionMismatch { expected: 3, found: 7 })
        ));
    }

    #[test]
    fn ladders() {
        let l = 3;
        let top = make_momentum_state(l, 3).unwrap();
        assert_eq!(momentum_shift(&top), make_momentum_state(l, -3).unwrap());
        let last = make_angle_state(l, 6).unwrap();
        let shifted = angle_shift(&last);
        let zero = make_angle_state(l, 0).unwrap();
        for (a, b) in shifted.amps().iter().zip(zero.amps()) {
            assert!(close(*a, *b, TOL));
        }

        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let psi = RotorState::random(l, &mut rng);
        let (mut a, mut m) = (psi.clone(), psi.clone());
        for _ in 0..psi.dim() {
            a = angle_shift(&a);
            m = momentum_shift(&m);
        }
        for i in 0..psi.dim() {
            assert!(close(a.amps()[i], psi.amps()[i], TOL));
            assert_eq!(m.amps()[i], psi.amps()[i]);
        }
    }

    #[test]
    fn weyl_commutation() {
        // A M = exp(-2 pi i / D) M A for the ladders as defined above.
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for l in [1, 2, 7] {
            let psi = RotorState::random(l, &mut rng);
            let am = angle_shift(&momentum_shift(&psi));
            let ma = momentum_shift(&angle_shift(&psi));
            let w = C64::from_polar(1.0, -TAU / psi.dim() as f64);
            for i in 0..psi.dim() {
                assert!(close(am.amps()[i], w * ma.amps()[i], TOL));
            }
        }
    }

    #[test]
    fn periodic_indexing() {
        let s = make_momentum_state(2, -2).unwrap();
        assert_eq!(s.amp(3), s.amp(-2));
        assert_eq!(s.amp(-7), s.amp(-2));
    }

    #[test]
    fn from_amplitudes_checks() {
        assert!(matches!(
            RotorState::from_amplitudes(1, vec![C64::new(1.0, 0.0); 2]),
            Err(Error::DimensionMismatch { expected: 3, found: 2 })
        ));
        assert!(RotorState::from_amplitudes(1, vec![C64::new(0.0, 0.0); 3]).is_err());
        let s = RotorState::from_amplitudes(1, vec![C64::new(2.0, 0.0); 3]).unwrap();
        assert!((s.norm_sqr() - 1.0).abs() < TOL);
    }
}
