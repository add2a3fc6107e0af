//! Command-line front end. [`run`] parses arguments and returns the exit code
//! and both output streams, so commands can be exercised without a process.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::channels::{apply, Family, QuantumChannel};
use crate::error::{Error, Result};
use crate::io::{matrix_to_json, report_json, sweep_csv, ChannelFile, MatrixJson};
use crate::optimize::{maximize_coherent_information, sweep, uniform_grid, InputPolicy, OptimizerConfig};
use crate::qmath::rng_from_seed;
use crate::quantities::{analyze, entropy_exchange, random_identity_case, verify_identity};
use crate::states::{random_pure_ensemble, DensityOperator};

/// Residual below which `verify-identity` reports a pass.
pub const IDENTITY_PASS_THRESHOLD: f64 = 1e-8;

#[derive(Debug, Parser)]
#[command(name = "qprivacy", version, about = "Coherent information and private-information bounds for quantum channels")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check that a channel file describes a valid channel.
    Validate { path: PathBuf },
    /// Report entropies and Holevo quantities for a channel and ensemble.
    Analyze {
        path: PathBuf,
        /// Use the ensemble from the file or the maximally mixed input.
        #[arg(long, value_enum, default_value_t = AnalyzeInput::Ensemble)]
        input: AnalyzeInput,
    },
    /// Tabulate a channel family over a parameter grid.
    Sweep(SweepArgs),
    /// Maximize coherent information over channel inputs.
    Optimize(OptimizeArgs),
    /// Check the coherent-information identity on random cases.
    VerifyIdentity(VerifyArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum AnalyzeInput {
    Ensemble,
    MaxMixed,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct OptimizerArgs {
    #[arg(long, default_value_t = 8)]
    pub restarts: usize,
    #[arg(long, default_value_t = 500)]
    pub max_iters: usize,
    #[arg(long, default_value_t = 0.1)]
    pub step_init: f64,
    #[arg(long, default_value_t = 1e-7)]
    pub tol_obj: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

impl OptimizerArgs {
    fn config(&self) -> Result<OptimizerConfig> {
        let cfg = OptimizerConfig {
            restarts: self.restarts,
            max_iters: self.max_iters,
            step_init: self.step_init,
            tol_obj: self.tol_obj,
            seed: self.seed,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, value_parser = parse_family)]
    pub family: Family,
    #[arg(long, allow_negative_numbers = true)]
    pub from: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub to: f64,
    #[arg(long)]
    pub steps: usize,
    #[arg(long, value_parser = parse_policy, default_value = "max-mixed")]
    pub input_policy: InputPolicy,
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    pub format: OutputFormat,
    #[command(flatten)]
    pub optimizer: OptimizerArgs,
}

#[derive(Debug, Args)]
pub struct OptimizeArgs {
    /// Channel file; alternatively give --family.
    #[arg(conflicts_with = "family", required_unless_present = "family")]
    pub path: Option<PathBuf>,
    #[arg(long, value_parser = parse_family)]
    pub family: Option<Family>,
    /// Family parameter; not needed for the identity family.
    #[arg(long, allow_negative_numbers = true)]
    pub param: Option<f64>,
    /// Dimension of the identity family.
    #[arg(long, default_value_t = 2)]
    pub dim: usize,
    #[command(flatten)]
    pub optimizer: OptimizerArgs,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = 200, value_parser = clap::value_parser!(u64).range(1..))]
    pub trials: u64,
    #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u64).range(2..=4))]
    pub max_dim: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Use this family instead of random channels.
    #[arg(long, value_parser = parse_family)]
    pub family: Option<Family>,
    /// Parameter for --family.
    #[arg(long, default_value_t = 0.3, allow_negative_numbers = true)]
    pub param: f64,
}

fn parse_family(s: &str) -> std::result::Result<Family, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_policy(s: &str) -> std::result::Result<InputPolicy, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// Exit code with the text destined for standard output and standard error.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CommandOutcome {
    pub exit_code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl CommandOutcome {
    fn success(stdout: String) -> Self {
        Self {
            exit_code: 0,
            stdout,
            stderr: String::new(),
        }
    }

    fn failure(err: &Error) -> Self {
        Self {
            exit_code: exit_code_for(err),
            stdout: String::new(),
            stderr: format!("error: {err}\n"),
        }
    }
}

/// 2 for invalid input, 3 for numerical failure.
pub fn exit_code_for(err: &Error) -> i32 {
    if err.is_validation() {
        2
    } else {
        3
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> CommandOutcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => execute(&cli.command),
        Err(e) => {
            let text = e.render().to_string();
            if e.use_stderr() {
                CommandOutcome {
                    exit_code: 2,
                    stdout: String::new(),
                    stderr: text,
                }
            } else {
                CommandOutcome::success(text)
            }
        }
    }
}

pub fn execute(cmd: &Command) -> CommandOutcome {
    let result = match cmd {
        Command::Validate { path } => cmd_validate(path),
        Command::Analyze { path, input } => cmd_analyze(path, *input),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Optimize(args) => cmd_optimize(args),
        Command::VerifyIdentity(args) => cmd_verify_identity(args),
    };
    match result {
        Ok(mut out) => {
            if !out.ends_with('\n') {
                out.push('\n');
            }
            CommandOutcome::success(out)
        }
        Err(e) => CommandOutcome::failure(&e),
    }
}

fn load(path: &Path) -> Result<ChannelFile> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))?;
    ChannelFile::parse(&text)
}

#[derive(Serialize)]
struct ValidateReport {
    valid: bool,
    dim_in: usize,
    dim_out: usize,
    n_kraus: usize,
}

pub fn cmd_validate(path: &Path) -> Result<String> {
    let ch = load(path)?.channel()?;
    Ok(report_json(&ValidateReport {
        valid: true,
        dim_in: ch.dim_in(),
        dim_out: ch.dim_out(),
        n_kraus: ch.kraus().len(),
    }))
}

#[derive(Serialize)]
struct EntropyReport {
    s_output: f64,
    s_exchange: f64,
    coherent_info: f64,
}

pub fn cmd_analyze(path: &Path, input: AnalyzeInput) -> Result<String> {
    let file = load(path)?;
    let ch = file.channel()?;
    match input {
        AnalyzeInput::Ensemble => {
            let e = file.ensemble()?.ok_or_else(|| {
                Error::Domain("channel file has no ensemble; add one or pass --input max-mixed".into())
            })?;
            Ok(report_json(&analyze(&ch, &e)?))
        }
        AnalyzeInput::MaxMixed => {
            let rho = DensityOperator::maximally_mixed(ch.dim_in())?;
            let s_output = apply(&ch, &rho)?.entropy()?;
            let s_exchange = entropy_exchange(&ch, &rho)?;
            Ok(report_json(&EntropyReport {
                s_output,
                s_exchange,
                coherent_info: s_output - s_exchange,
            }))
        }
    }
}

pub fn cmd_sweep(args: &SweepArgs) -> Result<String> {
    let grid = uniform_grid(args.from, args.to, args.steps)?;
    let cfg = args.optimizer.config()?;
    let records = sweep(args.family, &grid, args.input_policy, &cfg)?;
    match args.format {
        OutputFormat::Csv => sweep_csv(&records),
        OutputFormat::Json => Ok(report_json(&records)),
    }
}

#[derive(Serialize)]
struct RestartValue {
    restart: usize,
    value: f64,
}

#[derive(Serialize)]
struct OptimizeReport {
    channel: Option<String>,
    dim_in: usize,
    best_value: f64,
    best_input: MatrixJson,
    converged: bool,
    restarts: Vec<RestartValue>,
}

fn optimize_source(args: &OptimizeArgs) -> Result<QuantumChannel> {
    match (&args.path, args.family) {
        (Some(path), _) => load(path)?.channel(),
        (None, Some(Family::Identity)) => Family::Identity.build(0.0, args.dim),
        (None, Some(family)) => {
            let p = args
                .param
                .ok_or_else(|| Error::Domain(format!("--param is required for the {family} family")))?;
            family.build(p, args.dim)
        }
        (None, None) => Err(Error::Domain("give a channel file or --family".into())),
    }
}

pub fn cmd_optimize(args: &OptimizeArgs) -> Result<String> {
    let ch = optimize_source(args)?;
    let cfg = args.optimizer.config()?;
    let res = maximize_coherent_information(&ch, &cfg)?;
    if !res.best_value.is_finite() {
        return Err(Error::Numeric("optimizer returned a non-finite value".into()));
    }
    Ok(report_json(&OptimizeReport {
        channel: ch.name().map(str::to_owned),
        dim_in: ch.dim_in(),
        best_value: res.best_value,
        best_input: matrix_to_json(res.best_input.matrix()),
        converged: res.converged,
        restarts: res
            .trace_of_runs
            .iter()
            .map(|&(restart, value)| RestartValue { restart, value })
            .collect(),
    }))
}

#[derive(Serialize)]
struct IdentityReport {
    trials: u64,
    max_residual: f64,
    pass: bool,
}

/// Largest identity residual over `trials` random cases drawn from `seed`.
pub fn identity_trials(trials: u64, max_dim: usize, seed: u64, family: Option<(Family, f64)>) -> Result<f64> {
    let mut rng = rng_from_seed(seed);
    let mut worst = 0.0_f64;
    for _ in 0..trials {
        let (ch, e) = match family {
            None => random_identity_case(max_dim, &mut rng)?,
            Some((f, param)) => {
                let ch = f.build(param, max_dim)?;
                let n = rand::Rng::random_range(&mut rng, 1..=4);
                let e = random_pure_ensemble(ch.dim_in(), n, &mut rng)?;
                (ch, e)
            }
        };
        worst = worst.max(verify_identity(&ch, &e)?);
    }
    Ok(worst)
}

pub fn cmd_verify_identity(args: &VerifyArgs) -> Result<String> {
    let family = args.family.map(|f| (f, args.param));
    let max_residual = identity_trials(args.trials, args.max_dim as usize, args.seed, family)?;
    Ok(report_json(&IdentityReport {
        trials: args.trials,
        max_residual,
        pass: max_residual < IDENTITY_PASS_THRESHOLD,
    }))
}
