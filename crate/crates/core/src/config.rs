//! Run configuration (TOML).
//!
//! ```toml
//! l = 2
//! alpha = "1/2"            # optional, default 0
//! dilation = "denominator"       # "denominator" (default), "minimal" or a positive integer
//! steps = { start = 0, end = 10 }   # or `steps = 10`; default 0..=D
//! outputs = ["wigner", "revival_scan"]
//! output_dir = "out"       # default "out"
//! seed = 7                 # default 0, used by `kind = "random"`
//! image = false            # also write PGM images of Wigner grids
//!
//! [initial_state]
//! kind = "gaussian"        # momentum { m } | angle { n } | gaussian { center, sigma } | random
//! center = 0.0
//! sigma = 0.5
//!
//! [scale]                  # optional, natural units when absent
//! mass = 1.0
//! radius = 1.0
//! hbar = 1.0
//! ```

use std::collections::BTreeSet;
use std::fmt;
use std::path::PathBuf;

use rand::SeedableRng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::evolution::PhysicalScale;
use crate::flux::{representative_admissible, DilationPolicy, FluxParameter};
use crate::rotor::{make_angle_state, make_gaussian_packet, make_momentum_state, RotorState};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("config error at `{path}`: {message}")]
    Schema { path: String, message: String },

    #[error(
        "alpha = {alpha} is not admissible with time-quantum dilation {dilation}: \
         2 * dilation * alpha must be an integer or the representative Wigner lattice \
         is not left invariant (try dilation = \"minimal\" or \"denominator\")"
    )]
    Inadmissible { alpha: FluxParameter, dilation: u64 },
}

impl ConfigError {
    fn at(path: &str, message: impl fmt::Display) -> Self {
        ConfigError::Schema {
            path: path.to_string(),
            message: message.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum InitialState {
    Momentum { m: i64 },
    Angle { n: i64 },
    Gaussian { center: f64, sigma: f64 },
    Random,
}

impl InitialState {
    pub fn build(&self, l: usize, seed: u64) -> crate::Result<RotorState> {
        match *self {
            InitialState::Momentum { m } => make_momentum_state(l, m),
            InitialState::Angle { n } => make_angle_state(l, n),
            InitialState::Gaussian { center, sigma } => make_gaussian_packet(l, center, sigma),
            InitialState::Random => {
                let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
                Ok(RotorState::random(l, &mut rng))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputKind {
    /// Per-step state amplitudes.
    States,
    Wigner,
    Representative,
    Marginals,
    RevivalScan,
    Admissibility,
    MapCompare,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StepRange {
    #[serde(default)]
    pub start: u64,
    pub end: u64,
}

impl StepRange {
    pub fn iter(&self) -> std::ops::RangeInclusive<u64> {
        self.start..=self.end
    }
}

/// A validated run description.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub l: usize,
    pub initial_state: InitialState,
    pub alpha: FluxParameter,
    #[serde(rename = "dilation", serialize_with = "serialize_policy")]
    pub dilation_policy: DilationPolicy,
    /// The dilation the policy resolves to for `alpha`.
    #[serde(skip)]
    pub dilation: u64,
    pub steps: StepRange,
    pub outputs: BTreeSet<OutputKind>,
    pub output_dir: PathBuf,
    pub seed: u64,
    pub image: bool,
    pub scale: PhysicalScale,
}

impl RunConfig {
    pub fn dim(&self) -> usize {
        2 * self.l + 1
    }

    pub fn initial(&self) -> crate::Result<RotorState> {
        self.initial_state.build(self.l, self.seed)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("run config is always representable in TOML")
    }

    /// Defaults for a given cutoff and initial state.
    pub fn new(l: usize, initial_state: InitialState) -> Self {
        RunConfig {
            l,
            initial_state,
            alpha: FluxParameter::ZERO,
            dilation_policy: DilationPolicy::Denominator,
            dilation: 1,
            steps: StepRange {
                start: 0,
                end: (2 * l + 1) as u64,
            },
            outputs: BTreeSet::new(),
            output_dir: PathBuf::from("out"),
            seed: 0,
            image: false,
            scale: PhysicalScale::natural(),
        }
    }

    /// Re-run validation after fields were edited in place.
    pub fn validated(mut self) -> Result<Self, ConfigError> {
        validate_state(self.l, &self.initial_state)?;
        if self.steps.start > self.steps.end {
            return Err(ConfigError::at(
                "steps",
                format!("start {} exceeds end {}", self.steps.start, self.steps.end),
            ));
        }
        PhysicalScale::new(self.scale.mass, self.scale.radius, self.scale.hbar)
            .map_err(|e| ConfigError::at("scale", e))?;
        self.dilation = self.dilation_policy.resolve(&self.alpha);
        if !representative_admissible(&self.alpha, self.dilation) {
            return Err(ConfigError::Inadmissible {
                alpha: self.alpha,
                dilation: self.dilation,
            });
        }
        Ok(self)
    }
}

fn serialize_policy<S: Serializer>(policy: &DilationPolicy, serializer: S) -> Result<S::Ok, S::Error> {
    match policy {
        DilationPolicy::Fixed(n) => serializer.serialize_u64(*n),
        other => serializer.collect_str(other),
    }
}

fn deserialize_policy<'de, D: Deserializer<'de>>(deserializer: D) -> Result<Option<DilationPolicy>, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Int(i64),
        Text(String),
    }
    let text = match Repr::deserialize(deserializer)? {
        Repr::Int(n) => n.to_string(),
        Repr::Text(s) => s,
    };
    text.parse().map(Some).map_err(serde::de::Error::custom)
}

fn deserialize_steps<'de, D: Deserializer<'de>>(deserializer: D) -> Result<Option<StepRange>, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        End(u64),
        Range(StepRange),
    }
    Ok(Some(match Repr::deserialize(deserializer)? {
        Repr::End(end) => StepRange { start: 0, end },
        Repr::Range(r) => r,
    }))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    l: usize,
    initial_state: InitialState,
    #[serde(default)]
    alpha: Option<FluxParameter>,
    #[serde(default, deserialize_with = "deserialize_policy")]
    dilation: Option<DilationPolicy>,
    #[serde(default, deserialize_with = "deserialize_steps")]
    steps: Option<StepRange>,
    outputs: BTreeSet<OutputKind>,
    #[serde(default)]
    output_dir: Option<PathBuf>,
    #[serde(default)]
    seed: u64,
    #[serde(default)]
    image: bool,
    #[serde(default)]
    scale: Option<RawScale>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScale {
    mass: f64,
    radius: f64,
    hbar: f64,
}

/// Largest accepted cutoff; the Wigner grid has `4 (2l+1)^2` cells.
pub const MAX_CUTOFF: usize = 5000;

fn validate_state(l: usize, state: &InitialState) -> Result<(), ConfigError> {
    if l > MAX_CUTOFF {
        return Err(ConfigError::at(
            "l",
            format!("cutoff {l} exceeds the supported maximum {MAX_CUTOFF}"),
        ));
    }
    let li = l as i64;
    match *state {
        InitialState::Momentum { m } if !(-li..=li).contains(&m) => Err(ConfigError::at(
            "initial_state.m",
            format!("momentum {m} outside [{}, {li}]", -li),
        )),
        InitialState::Angle { n } if !(0..=2 * li).contains(&n) => Err(ConfigError::at(
            "initial_state.n",
            format!("angle index {n} outside [0, {}]", 2 * li),
        )),
        InitialState::Gaussian { sigma, .. } if !(sigma > 0.0 && sigma.is_finite()) => Err(ConfigError::at(
            "initial_state.sigma",
            format!("width must be positive, got {sigma}"),
        )),
        InitialState::Gaussian { center, .. } if !center.is_finite() => Err(ConfigError::at(
            "initial_state.center",
            format!("center must be finite, got {center}"),
        )),
        _ => Ok(()),
    }
}

pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let de = toml::Deserializer::parse(text).map_err(|e| ConfigError::at("", e.to_string().trim_end()))?;
    let raw: RawConfig = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        ConfigError::at(&path, e.into_inner().to_string().trim_end())
    })?;

    let mut config = RunConfig::new(raw.l, raw.initial_state);
    config.alpha = raw.alpha.unwrap_or(FluxParameter::ZERO);
    config.dilation_policy = raw.dilation.unwrap_or_default();
    if let Some(steps) = raw.steps {
        config.steps = steps;
    }
    config.outputs = raw.outputs;
    if let Some(dir) = raw.output_dir {
        config.output_dir = dir;
    }
    config.seed = raw.seed;
    config.image = raw.image;
    if let Some(s) = raw.scale {
        config.scale = PhysicalScale {
            mass: s.mass,
            radius: s.radius,
            hbar: s.hbar,
        };
    }
    config.validated()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_gets_defaults() {
        let c = parse_config(
            r#"
            l = 1
            outputs = ["wigner"]
            [initial_state]
            kind = "momentum"
            m = 0
            "#,
        )
        .unwrap();
        assert_eq!(c.l, 1);
        assert_eq!(c.alpha, FluxParameter::ZERO);
        assert_eq!(c.dilation_policy, DilationPolicy::Denominator);
        assert_eq!(c.dilation, 1);
        assert_eq!(c.steps, StepRange { start: 0, end: 3 });
        assert_eq!(c.scale, PhysicalScale::natural());
        assert_eq!(c.output_dir, PathBuf::from("out"));
        assert!(c.outputs.contains(&OutputKind::Wigner));
    }

    #[test]
    fn quarter_flux_at_base_quantum_is_rejected() {
        let err = parse_config(
            r#"
            l = 2
            alpha = "1/4"
            dilation = 1
            outputs = ["wigner"]
            initial_state = { kind = "random" }
            "#,
        )
        .unwrap_err();
        assert!(matches!(err, ConfigError::Inadmissible { dilation: 1, .. }));
        assert!(err.to_string().contains("representative Wigner lattice"));
    }

    #[test]
    fn denominator_policy_resolves_to_n() {
        let c = parse_config(
            r#"
            l = 2
            alpha = "2/5"
            dilation = "denominator"
            outputs = ["revival_scan"]
            initial_state = { kind = "angle", n = 1 }
            "#,
        )
        .unwrap();
        assert_eq!(c.dilation, 5);
        let c = parse_config(
            r#"
            l = 2
            alpha = "1/4"
            dilation = "minimal"
            steps = 4
            outputs = []
            initial_state = { kind = "random" }
            "#,
        )
        .unwrap();
        assert_eq!(c.dilation, 2);
        assert_eq!(c.steps, StepRange { start: 0, end: 4 });
    }

    #[test]
    fn schema_errors_name_the_field() {
        let err = parse_config(
            r#"
            l = 1
            outputs = ["wigner"]
            initial_state = { kind = "gaussian", center = 0.0, sigma = -1.0 }
            "#,
        )
        .unwrap_err();
        assert!(
            matches!(&err, ConfigError::Schema { path, .. } if path == "initial_state.sigma"),
            "{err}"
        );

        let err = parse_config(
            r#"
            l = 1
            outputs = ["wigner", "husimi"]
            initial_state = { kind = "random" }
            "#,
        )
        .unwrap_err();
        assert!(
            matches!(&err, ConfigError::Schema { path, .. } if path.starts_with("outputs")),
            "{err}"
        );

        let err = parse_config(
            r#"
            l = 1
            outputs = []
            initial_state = { kind = "momentum", m = 4 }
            "#,
        )
        .unwrap_err();
        assert!(matches!(&err, ConfigError::Schema { path, .. } if path == "initial_state.m"));

        let err = parse_config("outputs = []\ninitial_state = { kind = \"random\" }").unwrap_err();
        assert!(err.to_string().contains("l"), "{err}");

        assert!(parse_config("l = ").is_err());
    }

    #[test]
    fn round_trip_through_toml() {
        let text = r#"
            l = 3
            alpha = "3/4"
            dilation = "minimal"
            steps = { start = 2, end = 9 }
            outputs = ["wigner", "marginals", "admissibility"]
            output_dir = "results"
            seed = 42
            image = true
            initial_state = { kind = "gaussian", center = 1.25, sigma = 0.5 }
            scale = { mass = 2.0, radius = 0.5, hbar = 1.5 }
        "#;
        let c = parse_config(text).unwrap();
        let again = parse_config(&c.to_toml()).unwrap();
        assert_eq!(c, again);

        let mut fixed = c.clone();
        fixed.dilation_policy = DilationPolicy::Fixed(6);
        let fixed = fixed.validated().unwrap();
        assert_eq!(parse_config(&fixed.to_toml()).unwrap(), fixed);
    }
}
