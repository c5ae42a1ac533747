//! `mblab`: config-driven experiments on exponential families of Markov
//! chains and best-Markovian-arm identification.
//!
//! Each subcommand names an experiment mode; the config file must declare the
//! same mode. Results land in the output directory as CSV files plus a
//! `summary` key-value file, which is also printed to stdout.
//!
//! Exit codes: 0 on success, 2 when the invocation or config is invalid, 3
//! when a valid experiment fails at runtime.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use mblab_core::error::Error;
use mblab_core::experiment::{emit, execute, load_config, ExperimentConfig, Mode};

#[derive(Parser)]
#[command(name = "mblab", version, about = "Markov-chain bandit experiment driver")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep a theta grid and tabulate the family curves.
    Family(ModeArgs),
    /// Tabulate exact, Chernoff-bound, and Monte-Carlo tail probabilities.
    Concentration(ModeArgs),
    /// Report the optimal weights, characteristic time, and sample-complexity bound.
    LowerBound(ModeArgs),
    /// Replicate the identification strategy and aggregate the results.
    Run(ModeArgs),
}

impl Command {
    fn mode(&self) -> Mode {
        match self {
            Command::Family(_) => Mode::Family,
            Command::Concentration(_) => Mode::Concentration,
            Command::LowerBound(_) => Mode::LowerBound,
            Command::Run(_) => Mode::Run,
        }
    }

    fn args(&self) -> &ModeArgs {
        match self {
            Command::Family(a)
            | Command::Concentration(a)
            | Command::LowerBound(a)
            | Command::Run(a) => a,
        }
    }
}

#[derive(Args)]
struct ModeArgs {
    /// Experiment description file.
    #[arg(long, value_name = "PATH")]
    config: PathBuf,
    /// Override the config's master seed.
    #[arg(long, value_name = "N")]
    seed: Option<u64>,
    /// Override the config's replication count (run mode only).
    #[arg(long, value_name = "N")]
    reps: Option<usize>,
    /// Output directory, created if missing.
    #[arg(long, value_name = "DIR", default_value = "out")]
    out: PathBuf,
    /// Record the first replication's per-step trace (run mode only).
    #[arg(long)]
    trace: bool,
}

/// An error tagged with the exit code it should produce.
struct Failure {
    code: u8,
    error: Error,
}

fn invalid(error: Error) -> Failure {
    Failure { code: 2, error }
}

fn runtime(error: Error) -> Failure {
    Failure { code: 3, error }
}

fn drive(command: &Command) -> Result<(), Failure> {
    let args = command.args();
    let mode = command.mode();
    let mut config = load_config(&args.config).map_err(invalid)?;
    if config.mode != mode {
        return Err(invalid(Error::Validation {
            field: "mode".into(),
            reason: format!(
                "config declares mode \"{}\" but the {} subcommand was invoked",
                config.mode.name(),
                mode.name()
            ),
        }));
    }
    apply_overrides(&mut config, args);
    config.validate().map_err(invalid)?;

    warn_on_strategy(&config);
    let outputs = execute(&config).map_err(runtime)?;
    let written = emit(&config, &outputs, &args.out).map_err(runtime)?;

    let summary = written
        .iter()
        .find(|p| p.file_name().is_some_and(|n| n == "summary"))
        .expect("emit always writes a summary");
    match std::fs::read_to_string(summary) {
        Ok(text) => print!("{text}"),
        Err(e) => return Err(runtime(Error::Io(format!("{}: {e}", summary.display())))),
    }
    for path in &written {
        eprintln!("wrote {}", path.display());
    }
    Ok(())
}

fn apply_overrides(config: &mut ExperimentConfig, args: &ModeArgs) {
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    match (&mut config.run, args.reps, args.trace) {
        (Some(run), reps, trace) => {
            if let Some(reps) = reps {
                run.replications = reps;
            }
            run.trace |= trace;
        }
        (None, Some(_), _) => eprintln!("note: --reps has no effect in {} mode", config.mode.name()),
        (None, _, true) => eprintln!("note: --trace has no effect in {} mode", config.mode.name()),
        _ => {}
    }
}

/// Surfaces strategy-parameter warnings (for instance a threshold exponent
/// large enough to make the stopping rule needlessly conservative) before
/// the experiment starts.
fn warn_on_strategy(config: &ExperimentConfig) {
    if !matches!(config.mode, Mode::LowerBound | Mode::Run) {
        return;
    }
    let params = config
        .build_family()
        .and_then(|f| config.build_instance(f))
        .and_then(|i| config.build_params(&i));
    if let Ok(params) = params {
        for warning in params.warnings() {
            eprintln!("warning: {warning}");
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match drive(&cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure { code, error }) => {
            eprintln!("error: {error}");
            ExitCode::from(code)
        }
    }
}
