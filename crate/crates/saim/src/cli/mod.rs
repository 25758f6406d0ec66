//! Command-line harness. Four verbs:
//!
//! - `solve` runs a campaign (adaptive or fixed-penalty) over instance
//!   files or inline generator specs and writes result records.
//! - `validate` runs the built-in correctness suites and reports each
//!   measured statistic against its threshold.
//! - `generate` writes random instances in the canonical JSON format.
//! - `oracle` solves small instances exhaustively.
//!
//! Numeric flags override preset values; presets carry the benchmark
//! parameter sets (`qkp-paper`, `mkp-paper`).

pub mod records;
pub mod solve;
pub mod validate;

use crate::instances::formats::{load_canonical, load_mkp_orlib, load_qkp, write_canonical};
use crate::instances::{generate_mkp, generate_qkp, Instance, InstanceError};
use crate::model::ModelError;
use crate::oracle::{exhaustive_solve, OracleError, MAX_EXHAUSTIVE_VARS};
use crate::sampler::SamplerError;
use crate::solver::{SaimConfig, SolverError};
use clap::{Args, Parser, Subcommand, ValueEnum};
use solve::Campaign;
use std::fmt::Write as _;
use std::path::PathBuf;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("io: {0}")]
    Io(String),
    #[error(transparent)]
    Instance(#[from] InstanceError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Sampler(#[from] SamplerError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Saim,
    Penalty,
}

impl Mode {
    pub fn as_str(&self) -> &'static str {
        match self {
            Mode::Saim => "saim",
            Mode::Penalty => "penalty",
        }
    }
}

/// Shippable parameter sets for the benchmark families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    /// P = 2dN, 2000 runs of 1000 MCS, beta_max 10, eta 20.
    QkpPaper,
    /// P = 5dN, 5000 runs of 1000 MCS, beta_max 50, eta 0.05.
    MkpPaper,
}

struct PresetValues {
    alpha: f64,
    eta: f64,
    runs: usize,
    mcs: usize,
    beta_max: f64,
}

impl Preset {
    fn values(&self) -> PresetValues {
        match self {
            Preset::QkpPaper => PresetValues {
                alpha: 2.0,
                eta: 20.0,
                runs: 2000,
                mcs: 1000,
                beta_max: 10.0,
            },
            Preset::MkpPaper => PresetValues {
                alpha: 5.0,
                eta: 0.05,
                runs: 5000,
                mcs: 1000,
                beta_max: 50.0,
            },
        }
    }
}

// desk-scale defaults when no preset is named
const DEFAULT_ALPHA: f64 = 2.0;
const DEFAULT_ETA: f64 = 20.0;
const DEFAULT_RUNS: usize = 200;
const DEFAULT_MCS: usize = 500;
const DEFAULT_BETA_MAX: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FileFormat {
    /// Sniff: JSON documents are canonical, all-numeric streams are
    /// OR-Library MKP, anything else is community QKP.
    Auto,
    Canonical,
    Qkp,
    MkpOrlib,
}

#[derive(Debug, Parser)]
#[command(name = "saim", version, about = "Self-adaptive Ising machine for constrained optimization")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a solve campaign over instances and write result records.
    Solve(SolveArgs),
    /// Run the built-in validation suites.
    Validate(ValidateArgs),
    /// Generate random instances in the canonical format.
    Generate(GenerateArgs),
    /// Solve small instances exhaustively.
    Oracle(OracleArgs),
}

#[derive(Debug, Args)]
struct SolveArgs {
    /// Parameter preset; individual flags below override its values.
    #[arg(long, value_enum)]
    preset: Option<Preset>,
    /// saim adapts multipliers; penalty freezes them at zero.
    #[arg(long, value_enum, default_value = "saim")]
    mode: Mode,
    /// Instance file globs, or inline generator specs like
    /// `gen:qkp:n=12,density=0.5,seed=7,count=10`.
    #[arg(long, required = true, num_args = 1..)]
    instances: Vec<String>,
    /// Outer iterations (annealed runs) per replicate.
    #[arg(long)]
    runs: Option<usize>,
    /// Monte Carlo sweeps per run.
    #[arg(long)]
    mcs: Option<usize>,
    #[arg(long)]
    beta_max: Option<f64>,
    /// Multiplier step size.
    #[arg(long)]
    eta: Option<f64>,
    /// Penalty prefactor in P = alpha * d * N.
    #[arg(long)]
    alpha: Option<f64>,
    /// Explicit penalty weight, overriding the alpha rule.
    #[arg(long)]
    penalty: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    replicates: usize,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    #[arg(long, default_value = "results")]
    out: PathBuf,
    #[arg(long, value_enum, default_value = "auto")]
    format: FileFormat,
}

#[derive(Debug, Args)]
struct ValidateArgs {
    /// Comma-separated checks to run (default: all). Known names:
    /// tv-distance, energy-roundtrip, slack-completeness,
    /// subgradient-concavity.
    #[arg(long)]
    suite: Option<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Args)]
struct GenerateArgs {
    /// qkp or mkp.
    #[arg(long)]
    family: String,
    #[arg(long)]
    n: usize,
    /// Pairwise-value density (qkp only).
    #[arg(long, default_value_t = 0.5)]
    density: f64,
    /// Constraint count (mkp only).
    #[arg(long, default_value_t = 5)]
    m: usize,
    /// Capacity fraction of total weight (mkp only).
    #[arg(long, default_value_t = 0.5)]
    tightness: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of instances (consecutive seeds starting at --seed).
    #[arg(long, default_value_t = 1)]
    count: usize,
    #[arg(long, default_value_t = 1)]
    value_min: i64,
    #[arg(long, default_value_t = 100)]
    value_max: i64,
    #[arg(long, default_value_t = 1)]
    weight_min: i64,
    #[arg(long, default_value_t = 50)]
    weight_max: i64,
    #[arg(long, default_value = "instances")]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct OracleArgs {
    /// Instance file (any supported format).
    path: PathBuf,
    #[arg(long, value_enum, default_value = "auto")]
    format: FileFormat,
}

/// Parses argv and runs; returns the process exit code.
pub fn run() -> i32 {
    run_from(std::env::args())
}

/// Same as [`run`] but over explicit arguments, for tests.
pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            // clap handles --help/--version as "errors" with success codes
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

fn dispatch(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::Solve(args) => {
            cmd_solve(args)?;
            Ok(0)
        }
        Command::Validate(args) => cmd_validate(args),
        Command::Generate(args) => {
            cmd_generate(args)?;
            Ok(0)
        }
        Command::Oracle(args) => {
            cmd_oracle(args)?;
            Ok(0)
        }
    }
}

fn cmd_solve(args: SolveArgs) -> Result<(), CliError> {
    let preset = args.preset.map(|p| p.values());
    let pick = |flag: Option<f64>, preset_v: Option<f64>, fallback: f64| {
        flag.or(preset_v).unwrap_or(fallback)
    };
    let base = SaimConfig {
        alpha: pick(args.alpha, preset.as_ref().map(|p| p.alpha), DEFAULT_ALPHA),
        penalty_override: args.penalty,
        eta: pick(args.eta, preset.as_ref().map(|p| p.eta), DEFAULT_ETA),
        runs: args
            .runs
            .or(preset.as_ref().map(|p| p.runs))
            .unwrap_or(DEFAULT_RUNS),
        mcs_per_run: args
            .mcs
            .or(preset.as_ref().map(|p| p.mcs))
            .unwrap_or(DEFAULT_MCS),
        beta_max: pick(
            args.beta_max,
            preset.as_ref().map(|p| p.beta_max),
            DEFAULT_BETA_MAX,
        ),
        seed: args.seed,
        stream: 0,
    };
    let instances = resolve_instances(&args.instances, args.format)?;
    let campaign = Campaign {
        mode: args.mode,
        base,
        replicates: args.replicates,
        workers: args.workers,
        out: args.out,
        instances,
    };
    solve::run_campaign(&campaign)
}

fn cmd_validate(args: ValidateArgs) -> Result<i32, CliError> {
    let checks = match &args.suite {
        None => validate::CheckName::ALL.to_vec(),
        Some(list) => {
            let names: Vec<&str> = list
                .split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .collect();
            if names.is_empty() {
                return Err(CliError::Usage(
                    "empty --suite selection; name at least one check".into(),
                ));
            }
            names
                .into_iter()
                .map(|name| name.parse().map_err(CliError::Usage))
                .collect::<Result<Vec<_>, _>>()?
        }
    };
    let outcomes = validate::run_checks(&checks, args.seed);
    let mut all_pass = true;
    for o in &outcomes {
        all_pass &= o.pass;
        println!(
            "check {:<24} statistic={:<12.6e} threshold={:<12.6e} {} ({})",
            o.name,
            o.statistic,
            o.threshold,
            if o.pass { "pass" } else { "FAIL" },
            o.detail
        );
    }
    println!(
        "{} of {} checks passed",
        outcomes.iter().filter(|o| o.pass).count(),
        outcomes.len()
    );
    Ok(if all_pass { 0 } else { 1 })
}

fn cmd_generate(args: GenerateArgs) -> Result<(), CliError> {
    std::fs::create_dir_all(&args.out)
        .map_err(|e| CliError::Io(format!("{}: {e}", args.out.display())))?;
    for k in 0..args.count {
        let seed = args.seed + k as u64;
        let instance = match args.family.as_str() {
            "qkp" => Instance::Qkp(generate_qkp(
                args.n,
                args.density,
                seed,
                (args.value_min, args.value_max),
                (args.weight_min, args.weight_max),
            )?),
            "mkp" => Instance::Mkp(generate_mkp(
                args.n,
                args.m,
                seed,
                args.tightness,
                (args.weight_min, args.weight_max),
            )?),
            other => {
                return Err(CliError::Usage(format!(
                    "unknown family {other:?}, expected qkp or mkp"
                )))
            }
        };
        let path = args.out.join(format!("{}.json", instance.name()));
        std::fs::write(&path, write_canonical(&instance))
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        println!("{}", path.display());
    }
    Ok(())
}

fn cmd_oracle(args: OracleArgs) -> Result<(), CliError> {
    let text = std::fs::read_to_string(&args.path)
        .map_err(|e| CliError::Io(format!("{}: {e}", args.path.display())))?;
    let instances = parse_text(&text, args.format)?;
    for instance in instances {
        if instance.n() > MAX_EXHAUSTIVE_VARS {
            return Err(CliError::Usage(format!(
                "instance {} has {} variables; the exhaustive oracle is limited to {} \
                 (use known optima or accept raw costs instead)",
                instance.name(),
                instance.n(),
                MAX_EXHAUSTIVE_VARS
            )));
        }
        let solution = exhaustive_solve(&instance.to_problem()?)?;
        let mut state = String::with_capacity(solution.state.len());
        for bit in &solution.state {
            let _ = write!(state, "{bit}");
        }
        println!(
            "{}",
            serde_json::json!({
                "instance": instance.name(),
                "n": instance.n(),
                "opt": solution.value,
                "state": state,
                "optimal_count": solution.optimal_count,
            })
        );
    }
    Ok(())
}

/// Expands globs and `gen:` specs into loaded instances.
fn resolve_instances(specs: &[String], format: FileFormat) -> Result<Vec<Instance>, CliError> {
    let mut instances = Vec::new();
    for spec in specs {
        if let Some(rest) = spec.strip_prefix("gen:") {
            instances.extend(parse_gen_spec(rest)?);
            continue;
        }
        let mut paths: Vec<PathBuf> = glob::glob(spec)
            .map_err(|e| CliError::Usage(format!("bad glob {spec:?}: {e}")))?
            .collect::<Result<_, _>>()
            .map_err(|e| CliError::Io(e.to_string()))?;
        paths.sort();
        if paths.is_empty() {
            return Err(CliError::Usage(format!("no files match {spec:?}")));
        }
        for path in paths {
            let text = std::fs::read_to_string(&path)
                .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            instances.extend(parse_text(&text, format).map_err(|e| match e {
                CliError::Instance(inner) => {
                    CliError::Usage(format!("{}: {inner}", path.display()))
                }
                other => other,
            })?);
        }
    }
    Ok(instances)
}

fn parse_text(text: &str, format: FileFormat) -> Result<Vec<Instance>, CliError> {
    match format {
        FileFormat::Canonical => Ok(vec![load_canonical(text)?]),
        FileFormat::Qkp => Ok(vec![Instance::Qkp(load_qkp(text)?)]),
        FileFormat::MkpOrlib => Ok(load_mkp_orlib(text)?.into_iter().map(Instance::Mkp).collect()),
        FileFormat::Auto => {
            if text.trim_start().starts_with('{') {
                return Ok(vec![load_canonical(text)?]);
            }
            let all_numeric = text
                .split_whitespace()
                .all(|tok| tok.parse::<i64>().is_ok());
            if all_numeric {
                Ok(load_mkp_orlib(text)?
                    .into_iter()
                    .map(Instance::Mkp)
                    .collect())
            } else {
                Ok(vec![Instance::Qkp(load_qkp(text)?)])
            }
        }
    }
}

/// `qkp:n=12,density=0.5,seed=7,count=10` or
/// `mkp:n=20,m=5,seed=3,tightness=0.5,count=10`, with optional
/// `vmin/vmax/wmin/wmax` range keys.
fn parse_gen_spec(spec: &str) -> Result<Vec<Instance>, CliError> {
    let (family, params) = spec
        .split_once(':')
        .ok_or_else(|| CliError::Usage(format!("gen spec {spec:?} needs a family prefix")))?;
    let mut n = None;
    let mut m = 5usize;
    let mut density = 0.5;
    let mut tightness = 0.5;
    let mut seed = 0u64;
    let mut count = 1usize;
    let mut vmin = 1i64;
    let mut vmax = 100i64;
    let mut wmin = 1i64;
    // default weight ceilings differ by family
    let mut wmax = None;

    fn parsed<T: std::str::FromStr>(pair: &str, value: &str) -> Result<T, CliError> {
        value
            .parse()
            .map_err(|_| CliError::Usage(format!("gen spec entry {pair:?} has a bad value")))
    }
    for pair in params.split(',').filter(|p| !p.is_empty()) {
        let (key, value) = pair
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("gen spec entry {pair:?} is not key=value")))?;
        match key {
            "n" => n = Some(parsed(pair, value)?),
            "m" => m = parsed(pair, value)?,
            "density" | "d" => density = parsed(pair, value)?,
            "tightness" => tightness = parsed(pair, value)?,
            "seed" => seed = parsed(pair, value)?,
            "count" => count = parsed(pair, value)?,
            "vmin" => vmin = parsed(pair, value)?,
            "vmax" => vmax = parsed(pair, value)?,
            "wmin" => wmin = parsed(pair, value)?,
            "wmax" => wmax = Some(parsed(pair, value)?),
            other => {
                return Err(CliError::Usage(format!(
                    "unknown gen spec key {other:?}"
                )))
            }
        }
    }
    let n = n.ok_or_else(|| CliError::Usage("gen spec needs n=<items>".into()))?;
    let mut instances = Vec::with_capacity(count);
    for k in 0..count {
        let s = seed + k as u64;
        let instance = match family {
            "qkp" => Instance::Qkp(generate_qkp(
                n,
                density,
                s,
                (vmin, vmax),
                (wmin, wmax.unwrap_or(50)),
            )?),
            "mkp" => Instance::Mkp(generate_mkp(
                n,
                m,
                s,
                tightness,
                (wmin, wmax.unwrap_or(1000)),
            )?),
            other => {
                return Err(CliError::Usage(format!(
                    "unknown gen family {other:?}, expected qkp or mkp"
                )))
            }
        };
        instances.push(instance);
    }
    Ok(instances)
}
