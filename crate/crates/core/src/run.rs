//! Batch driver: evaluate a [`RunConfig`] and write its outputs.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::classical::compare_quantum_classical;
use crate::config::{ConfigError, OutputKind, RunConfig};
use crate::error::Error;
use crate::evolution::{flux_evolve, revival_scan, time_quantum_t0, QuantizedTime};
use crate::flux::admissibility_report;
use crate::output;
use crate::wigner::{build_wigner, marginal_angle, marginal_momentum, representative};

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),

    #[error(transparent)]
    Numerics(#[from] Error),

    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl RunError {
    /// 2: configuration, 3: flux admissibility, 4: internal consistency,
    /// 1: anything else (I/O).
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(ConfigError::Schema { .. }) => 2,
            RunError::Config(ConfigError::Inadmissible { .. }) => 3,
            RunError::Numerics(Error::FluxNotAdmissible { .. }) => 3,
            RunError::Numerics(Error::RealityCheck { .. }) => 4,
            RunError::Numerics(_) => 2,
            RunError::Io { .. } => 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RevivalSummary {
    pub revival_step: Option<u64>,
    /// `revival_step * dilation * T0` in the configured physical units.
    pub t_rev: Option<f64>,
    /// `t_rev` in units of `pi M R^2 / hbar`.
    pub t_rev_over_pi: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct RunSummary {
    pub files: Vec<PathBuf>,
    pub revival: Option<RevivalSummary>,
    pub map_deviations: Vec<(u64, f64)>,
}

impl RunSummary {
    pub fn max_map_deviation(&self) -> Option<f64> {
        self.map_deviations.iter().map(|(_, d)| *d).reduce(f64::max)
    }
}

type Artifact = (String, String);

fn step_artifacts(config: &RunConfig, j: u64) -> Result<Vec<Artifact>, Error> {
    let initial = config.initial()?;
    let qt = QuantizedTime::new(j, config.dilation, config.dim())?;
    let state = flux_evolve(&initial, &qt, &config.alpha)?;
    let mut out = Vec::new();
    if config.outputs.contains(&OutputKind::States) {
        out.push((format!("state_j{j:04}.csv"), output::state_csv(&state)));
    }
    let needs_grid = [OutputKind::Wigner, OutputKind::Representative, OutputKind::Marginals]
        .iter()
        .any(|k| config.outputs.contains(k));
    if !needs_grid {
        return Ok(out);
    }
    let grid = build_wigner(&state)?;
    if config.outputs.contains(&OutputKind::Wigner) {
        let name = format!("wigner_j{j:04}");
        out.push((format!("{name}.csv"), output::wigner_csv(&grid)));
        if config.image {
            let (pgm, sidecar) = output::wigner_pgm(&grid);
            out.push((format!("{name}.pgm"), pgm));
            out.push((format!("{name}.pgm.txt"), sidecar));
        }
    }
    if config.outputs.contains(&OutputKind::Representative) {
        let rep = representative(&grid)?;
        out.push((format!("representative_j{j:04}.csv"), output::representative_csv(&rep)));
    }
    if config.outputs.contains(&OutputKind::Marginals) {
        let mut text = String::from("axis,index,value\n");
        for r in grid.r_range() {
            let _ = writeln!(text, "r,{r},{}", output::format_value(marginal_momentum(&grid, r)?));
        }
        for s in 0..2 * config.dim() as i64 {
            let _ = writeln!(text, "s,{s},{}", output::format_value(marginal_angle(&grid, s)?));
        }
        out.push((format!("marginals_j{j:04}.csv"), text));
    }
    Ok(out)
}

/// Compute every requested output, then write the files in a fixed order.
pub fn run(config: &RunConfig) -> Result<RunSummary, RunError> {
    let config = config.clone().validated()?;
    let mut summary = RunSummary::default();
    let mut artifacts: Vec<Artifact> = Vec::new();

    if config.outputs.contains(&OutputKind::Admissibility) {
        let report = admissibility_report(&config.alpha).with_policy(config.dilation_policy);
        let text = serde_json::to_string_pretty(&report).expect("report serializes");
        artifacts.push(("admissibility.json".into(), text + "\n"));
    }

    let per_step: Vec<Vec<Artifact>> = config
        .steps
        .iter()
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|j| step_artifacts(&config, j))
        .collect::<Result<_, _>>()?;
    artifacts.extend(per_step.into_iter().flatten());

    if config.outputs.contains(&OutputKind::RevivalScan) {
        let initial = config.initial()?;
        let j_max = config.steps.end.max(1);
        let scan = revival_scan(&initial, j_max, Some(&config.alpha), config.dilation)?;
        let t0 = time_quantum_t0(config.l, &config.scale)?;
        let t_rev = scan.revival_step.map(|j| (j * config.dilation) as f64 * t0);
        summary.revival = Some(RevivalSummary {
            revival_step: scan.revival_step,
            t_rev,
            t_rev_over_pi: t_rev.map(|t| t / (std::f64::consts::PI * config.scale.time_unit())),
        });
        artifacts.push(("revival.csv".into(), output::revival_csv(&scan)));
    }

    if config.outputs.contains(&OutputKind::MapCompare) {
        if !config.alpha.is_zero() || config.dilation != 1 {
            return Err(Error::Unsupported(
                "map comparison is defined for the bare rotor (alpha = 0, base time quantum)".into(),
            )
            .into());
        }
        let initial = config.initial()?;
        summary.map_deviations = config
            .steps
            .iter()
            .collect::<Vec<_>>()
            .into_par_iter()
            .map(|j| Ok((j, compare_quantum_classical(&initial, j)?)))
            .collect::<Result<_, Error>>()?;
        let mut text = String::from("j,deviation\n");
        for (j, d) in &summary.map_deviations {
            let _ = writeln!(text, "{j},{}", output::format_value(*d));
        }
        artifacts.push(("map_compare.csv".into(), text));
    }

    let dir = &config.output_dir;
    if !artifacts.is_empty() {
        std::fs::create_dir_all(dir).map_err(|source| RunError::Io {
            path: dir.clone(),
            source,
        })?;
    }
    for (name, contents) in artifacts {
        summary.files.push(write_file(dir, &name, &contents)?);
    }
    Ok(summary)
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<PathBuf, RunError> {
    let path = dir.join(name);
    std::fs::write(&path, contents).map_err(|source| RunError::Io {
        path: path.clone(),
        source,
    })?;
    Ok(path)
}
