//! `rotor`: command-line front end for rotor-core.

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rotor_core::config::{parse_config, ConfigError, InitialState, OutputKind, RunConfig, StepRange};
use rotor_core::evolution::PhysicalScale;
use rotor_core::flux::{admissibility_report, DilationPolicy, FluxParameter};
use rotor_core::run::{run, RunError, RunSummary};
use rotor_core::selftest;

/// Environment variable consulted when `--out` is not given.
const OUT_DIR_ENV: &str = "ROTOR_OUT_DIR";

#[derive(Parser, Debug)]
#[command(
    name = "rotor",
    version,
    about = "Quantized-time rotor dynamics, Wigner lattices and flux admissibility"
)]
struct Cli {
    /// TOML run configuration.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Output directory (overrides the config and $ROTOR_OUT_DIR).
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,

    /// Natural units M = R = hbar = 1 (the default; ignored when any of
    /// --mass/--radius/--hbar is given).
    #[arg(long, global = true, default_value_t = true)]
    natural_units: bool,

    #[arg(long, global = true)]
    mass: Option<f64>,

    #[arg(long, global = true)]
    radius: Option<f64>,

    #[arg(long, global = true)]
    hbar: Option<f64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write state amplitudes after each step.
    Evolve(StateArgs),
    /// Write Wigner grids after each step.
    Wigner {
        #[command(flatten)]
        state: StateArgs,
        /// Also write the representative D x D grid.
        #[arg(long)]
        representative: bool,
        /// Also write both marginals.
        #[arg(long)]
        marginals: bool,
        /// Also write plain PGM images.
        #[arg(long)]
        image: bool,
    },
    /// Scan the autocorrelation and report the first full revival.
    Revival(StateArgs),
    /// Admissibility of flux values (rationals such as 1/4).
    FluxCheck {
        #[arg(required = true, value_name = "ALPHA")]
        alphas: Vec<String>,
        /// Dilation used for the winding number: denominator, minimal or an integer.
        #[arg(long, default_value = "denominator")]
        dilation: String,
    },
    /// Compare quantum Wigner evolution with the classical twist map.
    MapCompare(StateArgs),
    /// Run every output listed in the configuration file.
    Run,
    /// Run the built-in invariant checks.
    Selftest {
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Args, Debug, Default)]
struct StateArgs {
    /// Angular momentum cutoff l (D = 2l + 1).
    #[arg(long)]
    l: Option<usize>,
    /// momentum:M | angle:N | gaussian:CENTER,SIGMA | random
    #[arg(long, allow_hyphen_values = true)]
    state: Option<String>,
    /// Flux in units of the flux quantum, e.g. 1/2.
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<String>,
    /// denominator, minimal or a positive integer.
    #[arg(long)]
    dilation: Option<String>,
    /// Last step j (steps run from 0).
    #[arg(long, visible_alias = "j-max")]
    steps: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Debug)]
struct CliError {
    code: u8,
    message: String,
}

impl From<RunError> for CliError {
    fn from(e: RunError) -> Self {
        CliError {
            code: e.exit_code() as u8,
            message: e.to_string(),
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        RunError::from(e).into()
    }
}

fn usage_error(message: impl Into<String>) -> CliError {
    CliError {
        code: 2,
        message: message.into(),
    }
}

fn parse_state(spec: &str) -> Result<InitialState, CliError> {
    let bad = || usage_error(format!("cannot parse --state {spec:?}"));
    let (kind, rest) = spec.split_once(':').unwrap_or((spec, ""));
    Ok(match kind {
        "momentum" => InitialState::Momentum {
            m: rest.parse().map_err(|_| bad())?,
        },
        "angle" => InitialState::Angle {
            n: rest.parse().map_err(|_| bad())?,
        },
        "gaussian" => {
            let (c, s) = rest.split_once(',').ok_or_else(bad)?;
            InitialState::Gaussian {
                center: c.trim().parse().map_err(|_| bad())?,
                sigma: s.trim().parse().map_err(|_| bad())?,
            }
        }
        "random" => InitialState::Random,
        _ => return Err(bad()),
    })
}

fn base_config(cli: &Cli, args: &StateArgs) -> Result<RunConfig, CliError> {
    let mut config = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| usage_error(format!("cannot read {}: {e}", path.display())))?;
            parse_config(&text)?
        }
        None => {
            let l = args
                .l
                .ok_or_else(|| usage_error("either --config or --l is required"))?;
            RunConfig::new(l, InitialState::Angle { n: 0 })
        }
    };
    if let Some(l) = args.l {
        if cli.config.is_some() && args.steps.is_none() && config.l != l {
            config.steps = StepRange {
                start: 0,
                end: (2 * l + 1) as u64,
            };
        }
        config.l = l;
    }
    if let Some(spec) = &args.state {
        config.initial_state = parse_state(spec)?;
    }
    if let Some(a) = &args.alpha {
        config.alpha = a.parse().map_err(|e| usage_error(format!("--alpha: {e}")))?;
    }
    if let Some(d) = &args.dilation {
        config.dilation_policy = d.parse().map_err(|e| usage_error(format!("--dilation: {e}")))?;
    }
    if let Some(end) = args.steps {
        config.steps = StepRange { start: 0, end };
    }
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    apply_globals(cli, &mut config)?;
    Ok(config)
}

fn apply_globals(cli: &Cli, config: &mut RunConfig) -> Result<(), CliError> {
    if let Some(out) = &cli.out {
        config.output_dir = out.clone();
    } else if let Ok(dir) = std::env::var(OUT_DIR_ENV) {
        if cli.config.is_none() && !dir.is_empty() {
            config.output_dir = dir.into();
        }
    }
    if cli.mass.is_some() || cli.radius.is_some() || cli.hbar.is_some() {
        let s = config.scale;
        config.scale = PhysicalScale::new(
            cli.mass.unwrap_or(s.mass),
            cli.radius.unwrap_or(s.radius),
            cli.hbar.unwrap_or(s.hbar),
        )
        .map_err(|e| usage_error(e.to_string()))?;
    } else if cli.natural_units && cli.config.is_none() {
        config.scale = PhysicalScale::natural();
    }
    Ok(())
}

fn with_outputs(mut config: RunConfig, kinds: &[OutputKind]) -> Result<RunConfig, CliError> {
    config.outputs = kinds.iter().copied().collect::<BTreeSet<_>>();
    Ok(config.validated()?)
}

fn coefficient(x: f64) -> String {
    if (x - x.round()).abs() < 1e-9 {
        format!("{}", x.round() as i64)
    } else {
        format!("{x:.9}")
    }
}

fn print_files(summary: &RunSummary) {
    for f in &summary.files {
        println!("wrote {}", f.display());
    }
}

fn flux_check(cli: &Cli, alphas: &[String], dilation: &str) -> Result<(), CliError> {
    let policy: DilationPolicy = dilation.parse().map_err(|e| usage_error(format!("--dilation: {e}")))?;
    let mut reports = Vec::new();
    for a in alphas {
        let alpha: FluxParameter = a.parse().map_err(|e| usage_error(format!("{a}: {e}")))?;
        reports.push(admissibility_report(&alpha).with_policy(policy));
    }
    let yes_no = |b: bool| if b { "yes" } else { "no" };
    println!(
        "{:<10} {:<10} {:<8} {:<8} {:<6} winding",
        "alpha", "full-grid", "allowed", "minimal", "denom"
    );
    for r in &reports {
        println!(
            "{:<10} {:<10} {:<8} {:<8} {:<6} {}",
            r.alpha.to_string(),
            yes_no(r.full_grid_ok_at_base),
            yes_no(r.representative_ok_at_base),
            r.minimal_dilation,
            r.denominator_dilation,
            r.winding_number
        );
    }
    let out = cli
        .out
        .clone()
        .or_else(|| std::env::var(OUT_DIR_ENV).ok().map(PathBuf::from));
    if let Some(dir) = out {
        let path = dir.join("admissibility.json");
        let io = |e: std::io::Error| CliError {
            code: 1,
            message: format!("cannot write {}: {e}", path.display()),
        };
        std::fs::create_dir_all(&dir).map_err(io)?;
        let text = serde_json::to_string_pretty(&reports).expect("reports serialize") + "\n";
        std::fs::write(&path, text).map_err(io)?;
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn execute(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Evolve(args) => {
            let config = with_outputs(base_config(cli, args)?, &[OutputKind::States])?;
            print_files(&run(&config)?);
        }
        Command::Wigner {
            state,
            representative,
            marginals,
            image,
        } => {
            let mut kinds = vec![OutputKind::Wigner];
            if *representative {
                kinds.push(OutputKind::Representative);
            }
            if *marginals {
                kinds.push(OutputKind::Marginals);
            }
            let mut config = base_config(cli, state)?;
            config.image |= *image;
            let config = with_outputs(config, &kinds)?;
            print_files(&run(&config)?);
        }
        Command::Revival(args) => {
            let config = with_outputs(base_config(cli, args)?, &[OutputKind::RevivalScan])?;
            let summary = run(&config)?;
            println!(
                "D = {}, alpha = {}, dilation = {}",
                config.dim(),
                config.alpha,
                config.dilation
            );
            let revival = summary.revival.clone().expect("revival scan requested");
            match (revival.revival_step, revival.t_rev, revival.t_rev_over_pi) {
                (Some(step), Some(t), Some(c)) => {
                    println!("revival step: {step}");
                    println!("t_rev = {}π M R^2/hbar = {t}", coefficient(c));
                }
                _ => println!("revival step: none up to j = {}", config.steps.end.max(1)),
            }
            print_files(&summary);
        }
        Command::FluxCheck { alphas, dilation } => flux_check(cli, alphas, dilation)?,
        Command::MapCompare(args) => {
            let config = with_outputs(base_config(cli, args)?, &[OutputKind::MapCompare])?;
            let summary = run(&config)?;
            println!("j deviation");
            for (j, d) in &summary.map_deviations {
                println!("{j} {d:.3e}");
            }
            if let Some(max) = summary.max_map_deviation() {
                println!("max deviation: {max:.3e}");
            }
            print_files(&summary);
        }
        Command::Run => {
            let args = StateArgs::default();
            if cli.config.is_none() {
                return Err(usage_error("`run` needs --config"));
            }
            let config = base_config(cli, &args)?;
            let summary = run(&config)?;
            if let Some(r) = &summary.revival {
                if let Some(step) = r.revival_step {
                    println!("revival step: {step}");
                }
            }
            print_files(&summary);
        }
        Command::Selftest { seed } => {
            let checks = selftest::run_all(*seed).map_err(|e| CliError {
                code: 4,
                message: e.to_string(),
            })?;
            let mut failed = 0;
            for c in &checks {
                println!("[{}] {} ({})", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
                failed += usize::from(!c.passed);
            }
            if failed > 0 {
                return Err(CliError {
                    code: 4,
                    message: format!("{failed} self-test check(s) failed"),
                });
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
