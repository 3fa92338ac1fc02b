//! Exact-rational flux bookkeeping.
//!
//! A threading flux enters the dynamics through `alpha = Phi / Phi_0`. Over `J`
//! elapsed time quanta the Wigner lattice is sheared in `s` by
//! `2 J r - 4 J alpha`. The full `(2D)^2` grid is mapped onto itself when that
//! shift is an integer (`4 J alpha` integral); the even-even representative
//! sublattice additionally needs the shift to be even (`2 J alpha` integral).
//! Everything in this module is integer arithmetic; floating point only shows
//! up at the boundary of [`irrational_flux_probe`].

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A rational number in lowest terms with a positive denominator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Rational {
    num: i64,
    den: i64,
}

impl Rational {
    pub const ZERO: Rational = Rational { num: 0, den: 1 };

    pub fn new(num: i64, den: i64) -> Result<Self> {
        if den == 0 {
            return Err(Error::Domain(format!("zero denominator in {num}/{den}")));
        }
        Ok(Self::reduced(num as i128, den as i128))
    }

    pub fn integer(n: i64) -> Self {
        Rational { num: n, den: 1 }
    }

    fn reduced(num: i128, den: i128) -> Self {
        let g = num.gcd(&den);
        let (mut num, mut den) = (num / g, den / g);
        if den < 0 {
            num = -num;
            den = -den;
        }
        Rational {
            num: i64::try_from(num).expect("rational numerator overflows i64"),
            den: i64::try_from(den).expect("rational denominator overflows i64"),
        }
    }

    pub fn numer(&self) -> i64 {
        self.num
    }

    pub fn denom(&self) -> i64 {
        self.den
    }

    pub fn is_integer(&self) -> bool {
        self.den == 1
    }

    /// `k * self` is an integer.
    pub fn times_is_integer(&self, k: i128) -> bool {
        (k * self.num as i128) % self.den as i128 == 0
    }

    pub fn mul_int(&self, k: i64) -> Self {
        Self::reduced(self.num as i128 * k as i128, self.den as i128)
    }

    pub fn sub_int(&self, k: i64) -> Self {
        Self::reduced(self.num as i128 - k as i128 * self.den as i128, self.den as i128)
    }

    pub fn square(&self) -> Self {
        let n = self.num as i128;
        let d = self.den as i128;
        Self::reduced(n * n, d * d)
    }

    pub fn to_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Rational {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.num as i128 * other.den as i128).cmp(&(other.num as i128 * self.den as i128))
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl FromStr for Rational {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Domain(format!("cannot parse {s:?} as a rational m/n"));
        let s = s.trim();
        match s.split_once('/') {
            Some((m, n)) => {
                let m = m.trim().parse::<i64>().map_err(|_| bad())?;
                let n = n.trim().parse::<i64>().map_err(|_| bad())?;
                Rational::new(m, n)
            }
            None => s.parse::<i64>().map(Rational::integer).map_err(|_| bad()),
        }
    }
}

/// Flux through the ring in units of the flux quantum, `alpha = m/n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FluxParameter(Rational);

impl FluxParameter {
    pub const ZERO: FluxParameter = FluxParameter(Rational::ZERO);

    pub fn as_rational(&self) -> Rational {
        self.0
    }

    pub fn numer(&self) -> i64 {
        self.0.num
    }

    pub fn denom(&self) -> i64 {
        self.0.den
    }

    pub fn is_zero(&self) -> bool {
        self.0.num == 0
    }

    /// Floating-point value, for phase evaluation only.
    pub fn to_f64(&self) -> f64 {
        self.0.to_f64()
    }
}

impl From<Rational> for FluxParameter {
    fn from(r: Rational) -> Self {
        FluxParameter(r)
    }
}

impl fmt::Display for FluxParameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl FromStr for FluxParameter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.parse().map(FluxParameter)
    }
}

impl Serialize for FluxParameter {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for FluxParameter {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Int(i64),
            Text(String),
        }
        match Repr::deserialize(deserializer)? {
            Repr::Int(n) => Ok(FluxParameter(Rational::integer(n))),
            Repr::Text(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

/// Reduce `m/n` to lowest terms with a positive denominator.
pub fn canonicalize(m: i64, n: i64) -> Result<FluxParameter> {
    Rational::new(m, n).map(FluxParameter)
}

/// `4 n' alpha` is an integer: the `s`-shear is a lattice relabeling of the
/// full `(2D)^2` grid at every multiple of the dilated time quantum.
pub fn full_grid_admissible(alpha: &FluxParameter, dilation: u64) -> bool {
    alpha.0.times_is_integer(4 * dilation as i128)
}

/// `2 n' alpha` is an integer: the shear preserves the parity of `s`, so the
/// even-even representative lattice maps onto itself.
pub fn representative_admissible(alpha: &FluxParameter, dilation: u64) -> bool {
    alpha.0.times_is_integer(2 * dilation as i128)
}

/// Smallest dilation `n'` with `2 n' alpha` integral, i.e. `n / gcd(2, n)`.
pub fn minimal_dilation(alpha: &FluxParameter) -> u64 {
    let n = alpha.denom() as u64;
    n / n.gcd(&2)
}

/// The dilation obtained by stretching the time quantum by the full
/// denominator of `alpha`.
pub fn denominator_dilation(alpha: &FluxParameter) -> u64 {
    alpha.denom() as u64
}

/// How to pick the time-quantum multiplier for a given flux.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum DilationPolicy {
    Minimal,
    /// Dilate by the denominator of `alpha`.
    #[default]
    Denominator,
    Fixed(u64),
}

impl DilationPolicy {
    pub fn resolve(&self, alpha: &FluxParameter) -> u64 {
        match *self {
            DilationPolicy::Minimal => minimal_dilation(alpha),
            DilationPolicy::Denominator => denominator_dilation(alpha),
            DilationPolicy::Fixed(n) => n,
        }
    }
}

impl fmt::Display for DilationPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DilationPolicy::Minimal => f.write_str("minimal"),
            DilationPolicy::Denominator => f.write_str("denominator"),
            DilationPolicy::Fixed(n) => write!(f, "{n}"),
        }
    }
}

impl FromStr for DilationPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "minimal" => Ok(DilationPolicy::Minimal),
            "denominator" => Ok(DilationPolicy::Denominator),
            other => match other.parse::<u64>() {
                Ok(n) if n >= 1 => Ok(DilationPolicy::Fixed(n)),
                _ => Err(Error::Domain(format!(
                    "dilation must be \"minimal\", \"denominator\" or a positive integer, got {other:?}"
                ))),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AdmissibilityReport {
    pub alpha: FluxParameter,
    pub full_grid_ok_at_base: bool,
    pub representative_ok_at_base: bool,
    pub minimal_dilation: u64,
    pub denominator_dilation: u64,
    /// Number of times the fundamental path encircles the flux line: the
    /// chosen dilation.
    pub winding_number: u64,
}

impl AdmissibilityReport {
    /// Re-point the winding number at a different dilation choice.
    pub fn with_policy(mut self, policy: DilationPolicy) -> Self {
        self.winding_number = policy.resolve(&self.alpha);
        self
    }
}

pub fn admissibility_report(alpha: &FluxParameter) -> AdmissibilityReport {
    AdmissibilityReport {
        alpha: *alpha,
        full_grid_ok_at_base: full_grid_admissible(alpha, 1),
        representative_ok_at_base: representative_admissible(alpha, 1),
        minimal_dilation: minimal_dilation(alpha),
        denominator_dilation: denominator_dilation(alpha),
        winding_number: denominator_dilation(alpha),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ProbeOutcome {
    /// The float is the correctly rounded value of a rational with
    /// denominator at most `n_max`.
    Match {
        alpha: FluxParameter,
        minimal_dilation: u64,
    },
    /// No admissible dilation up to `n_max`. The continued-fraction
    /// convergents that were tried are listed; each is admissible only for
    /// its own exact value.
    NoneFound { convergents: Vec<FluxParameter> },
}

/// Search dilations up to `n_max` for one that makes `alpha` admissible, by
/// reconstructing `alpha` as a rational through its continued fraction.
pub fn irrational_flux_probe(alpha: f64, n_max: u64) -> Result<ProbeOutcome> {
    if n_max < 1 {
        return Err(Error::Domain("n_max must be at least 1".into()));
    }
    if !alpha.is_finite() {
        return Err(Error::Domain(format!("flux {alpha} is not finite")));
    }

    // h_{k} = a_k h_{k-1} + h_{k-2}, same for the denominators.
    let (mut h_prev, mut h) = (1i128, alpha.floor() as i128);
    let (mut k_prev, mut k) = (0i128, 1i128);
    let mut rem = alpha - alpha.floor();
    let mut convergents = Vec::new();

    loop {
        if k as u64 > n_max {
            break;
        }
        let approx = FluxParameter(Rational::reduced(h, k));
        if (h as f64) / (k as f64) == alpha {
            let dilation = (1..=n_max)
                .find(|&d| representative_admissible(&approx, d))
                .expect("the denominator itself is always an admissible dilation");
            return Ok(ProbeOutcome::Match {
                alpha: approx,
                minimal_dilation: dilation,
            });
        }
        convergents.push(approx);
        if rem == 0.0 {
            break;
        }
        let inv = 1.0 / rem;
        let a = inv.floor();
        rem = inv - a;
        let a = a as i128;
        (h_prev, h) = (h, a * h + h_prev);
        (k_prev, k) = (k, a * k + k_prev);
    }
    Ok(ProbeOutcome::NoneFound { convergents })
}
