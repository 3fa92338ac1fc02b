//! Free and flux-threaded evolution at quantized times.
//!
//! Time only exists at multiples of the time quantum `T0 = 4 pi M R^2 / (D hbar)`:
//! after `j` dilated quanta the dimensionless time is `tau = 2 pi j n' / D`.
//! Evolution is diagonal in momentum, `c_k -> exp(-i tau (k - alpha)^2) c_k`,
//! and every phase is reduced exactly before it is evaluated.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::flux::{FluxParameter, Rational};
use crate::rotor::{angle_shift_by, cis_fraction, inner_product, RotorState};

/// Autocorrelation threshold for declaring a full revival.
pub const REVIVAL_EPS: f64 = 1e-9;

/// `j` steps of the (possibly dilated) time quantum in a `D`-dimensional space.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuantizedTime {
    j: u64,
    dilation: u64,
    dim: usize,
}

impl QuantizedTime {
    pub fn new(j: u64, dilation: u64, dim: usize) -> Result<Self> {
        if dilation == 0 {
            return Err(Error::Domain("time-quantum dilation must be at least 1".into()));
        }
        if dim.is_multiple_of(2) {
            return Err(Error::Unsupported(format!("even dimension {dim}")));
        }
        Ok(QuantizedTime { j, dilation, dim })
    }

    /// `j` undilated quanta.
    pub fn base(j: u64, dim: usize) -> Result<Self> {
        Self::new(j, 1, dim)
    }

    pub fn j(&self) -> u64 {
        self.j
    }

    pub fn dilation(&self) -> u64 {
        self.dilation
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Elapsed undilated quanta, `j n'`.
    pub fn quanta(&self) -> u64 {
        self.j * self.dilation
    }

    pub fn tau(&self) -> f64 {
        tau_of(self)
    }
}

/// Dimensionless time `tau = hbar t / (2 M R^2) = 2 pi j n' / D`.
pub fn tau_of(qt: &QuantizedTime) -> f64 {
    let reduced_free = qt.quanta() as f64 / qt.dim as f64;
    TAU * reduced_free
}

/// Mass, ring radius and Planck constant. Defaults to natural units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhysicalScale {
    pub mass: f64,
    pub radius: f64,
    pub hbar: f64,
}

impl PhysicalScale {
    pub fn new(mass: f64, radius: f64, hbar: f64) -> Result<Self> {
        for (name, v) in [("mass", mass), ("radius", radius), ("hbar", hbar)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Domain(format!("{name} must be positive and finite, got {v}")));
            }
        }
        Ok(PhysicalScale { mass, radius, hbar })
    }

    pub fn natural() -> Self {
        PhysicalScale {
            mass: 1.0,
            radius: 1.0,
            hbar: 1.0,
        }
    }

    /// `M R^2 / hbar`, the natural time unit.
    pub fn time_unit(&self) -> f64 {
        self.mass * self.radius * self.radius / self.hbar
    }
}

impl Default for PhysicalScale {
    fn default() -> Self {
        Self::natural()
    }
}

/// `T0 = 4 pi M R^2 / ((2l + 1) hbar)`.
pub fn time_quantum_t0(l: usize, scale: &PhysicalScale) -> Result<f64> {
    let scale = PhysicalScale::new(scale.mass, scale.radius, scale.hbar)?;
    Ok(4.0 * PI * scale.time_unit() / (2 * l + 1) as f64)
}

/// Physical time after `qt`: `j n' T0`.
pub fn physical_time(qt: &QuantizedTime, scale: &PhysicalScale) -> Result<f64> {
    let l = (qt.dim - 1) / 2;
    Ok(qt.quanta() as f64 * time_quantum_t0(l, scale)?)
}

fn check_dim(state: &RotorState, qt: &QuantizedTime) -> Result<()> {
    if state.dim() != qt.dim {
        return Err(Error::DimensionMismatch {
            expected: qt.dim,
            found: state.dim(),
        });
    }
    Ok(())
}

/// `c_k -> exp(-i tau k^2) c_k`.
pub fn free_evolve(state: &RotorState, qt: &QuantizedTime) -> Result<RotorState> {
    flux_evolve(state, qt, &FluxParameter::ZERO)
}

/// `c_k -> exp(-i tau (k - alpha)^2) c_k`.
///
/// With `alpha = p/q` the phase is `2 pi J (q k - p)^2 / (D q^2)`; the
/// numerator is reduced modulo `D q^2` in integers first.
pub fn flux_evolve(state: &RotorState, qt: &QuantizedTime, alpha: &FluxParameter) -> Result<RotorState> {
    check_dim(state, qt)?;
    let p = alpha.numer() as i128;
    let q = alpha.denom() as i128;
    let modulus = qt.dim as i128 * q * q;
    let quanta = qt.quanta() as i128 % modulus;
    let amps = state
        .momenta()
        .map(|(k, c)| {
            let shifted = q * k as i128 - p;
            let num = quanta * ((shifted * shifted) % modulus);
            c * cis_fraction(-num, modulus)
        })
        .collect();
    Ok(RotorState::from_unitary_image(state.cutoff(), amps))
}

/// `|<initial| U(qt) |initial>|^2`.
pub fn autocorrelation(initial: &RotorState, qt: &QuantizedTime, alpha: Option<&FluxParameter>) -> Result<f64> {
    let evolved = flux_evolve(initial, qt, alpha.unwrap_or(&FluxParameter::ZERO))?;
    Ok(inner_product(initial, &evolved)?.norm_sqr())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RevivalScan {
    /// `(j, autocorrelation)` for `j = 0..=j_max`.
    pub points: Vec<(u64, f64)>,
    /// Smallest `j > 0` with autocorrelation `>= 1 - REVIVAL_EPS`.
    pub revival_step: Option<u64>,
}

pub fn revival_scan(
    initial: &RotorState,
    j_max: u64,
    alpha: Option<&FluxParameter>,
    dilation: u64,
) -> Result<RevivalScan> {
    if j_max < 1 {
        return Err(Error::Domain("revival scan needs j_max >= 1".into()));
    }
    let dim = initial.dim();
    let points = (0..=j_max)
        .into_par_iter()
        .map(|j| {
            let qt = QuantizedTime::new(j, dilation, dim)?;
            Ok((j, autocorrelation(initial, &qt, alpha)?))
        })
        .collect::<Result<Vec<_>>>()?;
    let revival_step = points
        .iter()
        .skip(1)
        .find(|(_, a)| *a >= 1.0 - REVIVAL_EPS)
        .map(|(j, _)| *j);
    Ok(RevivalScan { points, revival_step })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FractionalRevival {
    pub fidelity: f64,
    /// Relative phase `phi` of the best two-packet model, in `[0, 2 pi)`.
    pub phase: f64,
    /// Number of angle-lattice steps used for the rotated copy.
    pub shift: i64,
}

/// Overlap of the state evolved freely for `j` quanta with the two-packet
/// model `(|psi_0> + e^{i phi} |psi_pi>) / norm`, maximized over `phi`.
///
/// `psi_pi` is the initial packet rotated by half the ring; for odd `D` both
/// neighbouring lattice rotations are tried and the better one is kept.
pub fn fractional_revival_fidelity(initial: &RotorState, j: u64) -> Result<FractionalRevival> {
    let qt = QuantizedTime::base(j, initial.dim())?;
    let evolved = free_evolve(initial, &qt)?;
    two_packet_fidelity(initial, &evolved)
}

/// Continuous-time variant used only to calibrate the lattice result.
#[doc(hidden)]
pub fn fractional_revival_fidelity_continuous(initial: &RotorState, tau: f64) -> Result<FractionalRevival> {
    let amps = initial
        .momenta()
        .map(|(k, c)| c * C64::from_polar(1.0, -tau * (k * k) as f64))
        .collect();
    let evolved = RotorState::from_unitary_image(initial.cutoff(), amps);
    two_packet_fidelity(initial, &evolved)
}

fn two_packet_fidelity(initial: &RotorState, evolved: &RotorState) -> Result<FractionalRevival> {
    let dim = initial.dim() as i64;
    let a = inner_product(initial, evolved)?;
    let mut best: Option<FractionalRevival> = None;
    for shift in [dim / 2, dim / 2 + 1] {
        let rotated = angle_shift_by(initial, shift);
        let b = inner_product(&rotated, evolved)?;
        let c = inner_product(initial, &rotated)?;
        let (phase, fidelity) = maximize_over_phase(a, b, c);
        if best.is_none_or(|f| fidelity > f.fidelity) {
            best = Some(FractionalRevival { fidelity, phase, shift });
        }
    }
    Ok(best.expect("two candidate shifts"))
}

/// Maximize `|a + e^{-i phi} b|^2 / (2 + 2 Re(e^{i phi} c))` over `phi`.
fn maximize_over_phase(a: C64, b: C64, c: C64) -> (f64, f64) {
    let objective = |phi: f64| {
        let norm = 2.0 + 2.0 * (C64::from_polar(1.0, phi) * c).re;
        if norm <= 1e-14 {
            return 0.0;
        }
        (a + C64::from_polar(1.0, -phi) * b).norm_sqr() / norm
    };
    const GRID: usize = 2048;
    let step = TAU / GRID as f64;
    let (mut best_phi, mut best_val) = (0.0, objective(0.0));
    for i in 1..GRID {
        let phi = i as f64 * step;
        let v = objective(phi);
        if v > best_val {
            best_phi = phi;
            best_val = v;
        }
    }
    // Golden-section refinement inside the bracketing grid cells.
    let inv_golden = (5f64.sqrt() - 1.0) / 2.0;
    let (mut lo, mut hi) = (best_phi - step, best_phi + step);
    for _ in 0..60 {
        let x1 = hi - inv_golden * (hi - lo);
        let x2 = lo + inv_golden * (hi - lo);
        if objective(x1) < objective(x2) {
            lo = x1;
        } else {
            hi = x2;
        }
    }
    let phi = 0.5 * (lo + hi);
    let val = objective(phi);
    if val > best_val {
        (phi.rem_euclid(TAU), val.min(1.0))
    } else {
        (best_phi, best_val.min(1.0))
    }
}

/// Energies `(m - alpha)^2` for `m = -l..=l`, in units of `hbar^2 / (2 M R^2)`.
pub fn flux_spectrum(l: usize, alpha: &FluxParameter) -> Vec<Rational> {
    let alpha = alpha.as_rational();
    (-(l as i64)..=l as i64)
        .map(|m| {
            // (m - alpha)^2 = (alpha - m)^2
            alpha.sub_int(m).square()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rotor::{make_angle_state, make_gaussian_packet, make_momentum_state};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn q(s: &str) -> FluxParameter {
        s.parse().unwrap()
    }

    fn close(a: C64, b: C64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn time_quantum_values() {
        let nat = PhysicalScale::natural();
        assert!((time_quantum_t0(1, &nat).unwrap() - 4.0 * PI / 3.0).abs() < 1e-15);
        assert!((time_quantum_t0(0, &nat).unwrap() - 4.0 * PI).abs() < 1e-15);
        let big = PhysicalScale::new(1.0, 2.0, 1.0).unwrap();
        let ratio = time_quantum_t0(3, &big).unwrap() / time_quantum_t0(3, &nat).unwrap();
        assert!((ratio - 4.0).abs() < 1e-15);
        assert!(PhysicalScale::new(0.0, 1.0, 1.0).is_err());
        assert!(time_quantum_t0(
            1,
            &PhysicalScale {
                mass: 1.0,
                radius: -1.0,
                hbar: 1.0
            }
        )
        .is_err());
    }

    #[test]
    fn tau_values() {
        assert_eq!(QuantizedTime::base(0, 3).unwrap().tau(), 0.0);
        assert!((QuantizedTime::base(7, 7).unwrap().tau() - TAU).abs() < 1e-15);
        assert!((QuantizedTime::base(1, 3).unwrap().tau() - TAU / 3.0).abs() < 1e-15);
        // hbar t / (2 M R^2) with t = j n' T0.
        let scale = PhysicalScale::new(2.0, 0.5, 3.0).unwrap();
        let qt = QuantizedTime::new(4, 3, 9).unwrap();
        let t = physical_time(&qt, &scale).unwrap();
        let tau = scale.hbar * t / (2.0 * scale.mass * scale.radius * scale.radius);
        assert!((tau - qt.tau()).abs() < 1e-12);
        // D tau / pi = 2 j n'
        assert!((9.0 * qt.tau() / PI - 24.0).abs() < 1e-12);
        assert!(QuantizedTime::new(1, 0, 3).is_err());
        assert!(QuantizedTime::new(1, 1, 4).is_err());
    }

    #[test]
    fn free_evolution_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let psi = RotorState::random(1, &mut rng);
        let id = free_evolve(&psi, &QuantizedTime::base(0, 3).unwrap()).unwrap();
        assert_eq!(id.amps(), psi.amps());

        let one = free_evolve(&psi, &QuantizedTime::base(1, 3).unwrap()).unwrap();
        let w = C64::from_polar(1.0, -TAU / 3.0);
        assert!(close(one.amp(0), psi.amp(0), 1e-15));
        assert!(close(one.amp(1), w * psi.amp(1), 1e-15));
        assert!(close(one.amp(-1), w * psi.amp(-1), 1e-15));

        let full = free_evolve(&psi, &QuantizedTime::base(3, 3).unwrap()).unwrap();
        for (a, b) in full.amps().iter().zip(psi.amps()) {
            assert!(close(*a, *b, 1e-15));
        }

        let other = RotorState::random(2, &mut rng);
        assert!(matches!(
            free_evolve(&other, &QuantizedTime::base(1, 3).unwrap()),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn flux_evolution_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let psi = RotorState::random(2, &mut rng);
        let qt = QuantizedTime::base(3, 5).unwrap();
        assert_eq!(
            flux_evolve(&psi, &qt, &FluxParameter::ZERO).unwrap(),
            free_evolve(&psi, &qt).unwrap()
        );

        let psi = RotorState::random(1, &mut rng);
        let out = flux_evolve(&psi, &QuantizedTime::base(1, 3).unwrap(), &q("1/2")).unwrap();
        let phases = [(-1, -1.5 * PI), (0, -PI / 6.0), (1, -PI / 6.0)];
        for (k, ph) in phases {
            assert!(
                close(out.amp(k), C64::from_polar(1.0, ph) * psi.amp(k), 1e-14),
                "k = {k}"
            );
        }
    }

    #[test]
    fn integer_flux_shift_differs_at_finite_dim() {
        // alpha -> alpha + 1 is the momentum relabeling k -> k - 1 on an
        // infinite ladder. At finite D the wrapped level breaks this unless
        // the phases happen to be D-periodic.
        use crate::rotor::momentum_shift;
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let psi = RotorState::random(2, &mut rng);
        let qt = QuantizedTime::base(1, 5).unwrap();
        let relabeled = |alpha: &str| {
            let mut down = psi.clone();
            for _ in 0..4 {
                down = momentum_shift(&down);
            }
            momentum_shift(&flux_evolve(&down, &qt, &q(alpha)).unwrap())
        };
        let deviation = |a: &RotorState, b: &RotorState| {
            a.amps()
                .iter()
                .zip(b.amps())
                .map(|(x, y)| (x - y).norm())
                .fold(0.0, f64::max)
        };
        let shifted = flux_evolve(&psi, &qt, &q("4/3")).unwrap();
        assert!(deviation(&shifted, &relabeled("1/3")) > 1e-3);
        // With 2 j alpha integral the phases are periodic and the two agree.
        let shifted = flux_evolve(&psi, &qt, &q("3/2")).unwrap();
        assert!(deviation(&shifted, &relabeled("1/2")) < 1e-13);
    }

    #[test]
    fn autocorrelation_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let psi = RotorState::random(3, &mut rng);
        assert!((autocorrelation(&psi, &QuantizedTime::base(0, 7).unwrap(), None).unwrap() - 1.0).abs() < 1e-14);
        assert!((autocorrelation(&psi, &QuantizedTime::base(7, 7).unwrap(), None).unwrap() - 1.0).abs() < 1e-14);

        // D = 5 angle state: |sum_k exp(-2 pi i k^2 / 5)|^2 / 25, by hand.
        let theta0 = make_angle_state(2, 0).unwrap();
        let a = autocorrelation(&theta0, &QuantizedTime::base(1, 5).unwrap(), None).unwrap();
        let g: C64 = (-2i64..=2)
            .map(|k| C64::from_polar(1.0, -TAU * (k * k) as f64 / 5.0))
            .sum();
        assert!((a - g.norm_sqr() / 25.0).abs() < 1e-14);
        // The quadratic Gauss sum has modulus sqrt(5).
        assert!((a - 0.2).abs() < 1e-14);
    }

    #[test]
    fn revival_scans() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for l in 1..=15 {
            let psi = RotorState::random(l, &mut rng);
            let dim = psi.dim() as u64;
            let scan = revival_scan(&psi, 2 * dim, None, 1).unwrap();
            assert_eq!(scan.revival_step, Some(dim));
            assert_eq!(scan.points.len() as u64, 2 * dim + 1);
        }

        // Support on m in {0, 1}: alpha = 1/2 makes both levels degenerate.
        let amps = vec![
            C64::new(0.0, 0.0),
            C64::new(0.0, 0.0),
            C64::new(0.6, 0.0),
            C64::new(0.0, 0.8),
            C64::new(0.0, 0.0),
        ];
        let psi = RotorState::from_amplitudes(2, amps).unwrap();
        assert_eq!(revival_scan(&psi, 10, None, 1).unwrap().revival_step, Some(5));
        assert_eq!(
            revival_scan(&psi, 10, Some(&q("1/2")), 1).unwrap().revival_step,
            Some(1)
        );
        assert!(revival_scan(&psi, 0, None, 1).is_err());
    }

    #[test]
    fn fractional_revival_degenerate_cases() {
        // One-dimensional space: the rotated copy is the packet itself.
        let s = make_momentum_state(0, 0).unwrap();
        let f = fractional_revival_fidelity(&s, 0).unwrap();
        assert!((f.fidelity - 1.0).abs() < 1e-12);
        let g = make_gaussian_packet(20, 0.0, 0.5).unwrap();
        let single = autocorrelation(&g, &QuantizedTime::base(0, 41).unwrap(), None).unwrap();
        assert!((single - 1.0).abs() < 1e-14);
    }

    #[test]
    fn two_packets_at_quarter_revival() {
        // At tau = pi/2 the phases exp(-i pi k^2 / 2) split the packet into
        // two equal copies half a ring apart.
        let g = make_gaussian_packet(100, 0.0, 0.5).unwrap();
        let f = fractional_revival_fidelity_continuous(&g, PI / 2.0).unwrap();
        assert!(f.fidelity > 0.99, "{f:?}");
    }

    #[test]
    fn phase_maximizer() {
        // Orthogonal packets, evolved = (psi0 + i psi_pi)/sqrt2.
        let s = 0.5f64.sqrt();
        let (phi, val) = maximize_over_phase(C64::new(s, 0.0), C64::new(0.0, s), C64::new(0.0, 0.0));
        assert!((val - 1.0).abs() < 1e-12);
        assert!((phi - PI / 2.0).abs() < 1e-6);
    }

    #[test]
    fn spectra() {
        let r = |s: &str| s.parse::<Rational>().unwrap();
        assert_eq!(flux_spectrum(1, &FluxParameter::ZERO), vec![r("1"), r("0"), r("1")]);
        assert_eq!(flux_spectrum(1, &q("1/2")), vec![r("9/4"), r("1/4"), r("1/4")]);
        let l = 6;
        let e = flux_spectrum(l, &q("1/2"));
        for m in -(l as i64) + 1..=l as i64 {
            let partner = 1 - m;
            let (i, k) = ((m + l as i64) as usize, (partner + l as i64) as usize);
            assert_eq!(e[i], e[k]);
        }
    }
}
