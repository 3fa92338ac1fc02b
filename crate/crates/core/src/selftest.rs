//! Quick invariant checks, run by `rotor selftest`.

use rand::rngs::StdRng;
use rand::SeedableRng;

use crate::classical::{compare_quantum_classical, map_period};
use crate::evolution::{autocorrelation, flux_evolve, free_evolve, QuantizedTime};
use crate::flux::{canonicalize, minimal_dilation, representative_admissible, FluxParameter};
use crate::rotor::{angle_shift, momentum_shift, to_angle_representation, RotorState};
use crate::wigner::{build_wigner, marginal_angle, marginal_momentum, verify_shear_equivalence, REALITY_TOL};
use crate::Result;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    /// Worst observed value against the tolerance.
    pub detail: String,
}

fn check(name: &'static str, worst: f64, tol: f64) -> Check {
    Check {
        name,
        passed: worst <= tol,
        detail: format!("worst {worst:.3e} (tolerance {tol:.0e})"),
    }
}

fn max_dev(a: &RotorState, b: &RotorState) -> f64 {
    a.amps()
        .iter()
        .zip(b.amps())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

pub fn run_all(seed: u64) -> Result<Vec<Check>> {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut checks = Vec::new();

    let mut worst = 0.0f64;
    for l in 1..=10 {
        let psi = RotorState::random(l, &mut rng);
        let rep = to_angle_representation(&psi);
        worst = worst.max((rep.probabilities().iter().sum::<f64>() - 1.0).abs());
        worst = worst.max(max_dev(&rep.to_state()?, &psi));
        worst = worst.max((momentum_shift(&psi).norm_sqr() - 1.0).abs());
        worst = worst.max((angle_shift(&psi).norm_sqr() - 1.0).abs());
        let qt = QuantizedTime::base(3, psi.dim())?;
        worst = worst.max((flux_evolve(&psi, &qt, &"1/2".parse()?)?.norm_sqr() - 1.0).abs());
    }
    checks.push(check("unitarity and angle-basis completeness", worst, 1e-12));

    let mut worst = 0.0f64;
    for l in 1..=5 {
        let psi = RotorState::random(l, &mut rng);
        let grid = build_wigner(&psi)?;
        let probs = to_angle_representation(&psi).probabilities();
        worst = worst.max((grid.total() - 1.0).abs());
        for r in grid.r_range() {
            let want = if r % 2 == 0 { psi.amp(r / 2).norm_sqr() } else { 0.0 };
            worst = worst.max((marginal_momentum(&grid, r)? - want).abs());
        }
        for s in 0..2 * psi.dim() as i64 {
            let want = if s % 2 == 0 { probs[(s / 2) as usize] } else { 0.0 };
            worst = worst.max((marginal_angle(&grid, s)? - want).abs());
        }
        if grid.reality_residue() > REALITY_TOL {
            worst = f64::INFINITY;
        }
    }
    checks.push(check("Wigner total and marginals", worst, 1e-10));

    let mut worst = 0.0f64;
    let fluxes: [(FluxParameter, u64); 3] = [(FluxParameter::ZERO, 1), ("1/2".parse()?, 1), ("1/4".parse()?, 2)];
    for l in [1, 3, 5] {
        let psi = RotorState::random(l, &mut rng);
        for (alpha, dilation) in &fluxes {
            for j in 0..=2 * psi.dim() as u64 {
                worst = worst.max(verify_shear_equivalence(&psi, j, *dilation, alpha)?);
            }
        }
    }
    checks.push(check("Wigner shear equivalence", worst, 1e-10));

    let mut worst = 0.0f64;
    for l in [1, 2, 4, 7] {
        let psi = RotorState::random(l, &mut rng);
        for j in 0..=2 * psi.dim() as u64 {
            worst = worst.max(compare_quantum_classical(&psi, j)?);
        }
    }
    checks.push(check("quantum Wigner vs classical twist map", worst, 1e-10));

    let mut failures = 0u32;
    for l in 1..=10 {
        let psi = RotorState::random(l, &mut rng);
        let d = psi.dim() as u64;
        if map_period(psi.dim())? != d {
            failures += 1;
        }
        let back = free_evolve(&psi, &QuantizedTime::base(d, psi.dim())?)?;
        if max_dev(&back, &psi) > 1e-12 {
            failures += 1;
        }
        for j in 1..d {
            if autocorrelation(&psi, &QuantizedTime::base(j, psi.dim())?, None)? >= 1.0 - 1e-6 {
                failures += 1;
            }
        }
    }
    checks.push(Check {
        name: "revival at j = D and map period",
        passed: failures == 0,
        detail: format!("{failures} failures"),
    });

    let mut failures = 0u32;
    for n in 1..=24 {
        for m in 0..n {
            let alpha = canonicalize(m, n)?;
            let brute = (1..).find(|&d| representative_admissible(&alpha, d)).unwrap_or(0);
            if brute != minimal_dilation(&alpha) {
                failures += 1;
            }
        }
    }
    checks.push(Check {
        name: "minimal dilation vs brute force",
        passed: failures == 0,
        detail: format!("{failures} mismatches"),
    });

    Ok(checks)
}
