//! `qat` command-line front end.

mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::commands::Context;
use crate::config::Format;
use crate::error::CliError;

const EXIT_CODES: &str = "\
Exit codes:
  0  success
  1  invalid arguments or configuration (including bad system parameters)
  2  expansion failure, e.g. a resonant leak at a reported frequency
  3  integration failure in the exact or effective propagator
  4  one or more acceptance criteria failed (verify)
  5  output could not be written";

#[derive(Parser)]
#[command(name = "qat", version, about = "Quantum averaging theory expansions and propagators", after_help = EXIT_CODES)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute h_eff and phi up to the configured order and write their mode tables.
    Expand(RunArgs),
    /// Propagate the exact, assembled QAT and effective-only tracks on a grid.
    Simulate(RunArgs),
    /// Sweep lambda and order, reporting sup errors and fitted exponents.
    Sweep(RunArgs),
    /// Run the built-in acceptance criteria and print one line per criterion.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct Common {
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format.
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Worker threads for parallel work.
    #[arg(long, env = "QAT_THREADS")]
    threads: Option<usize>,
}

#[derive(Args)]
struct RunArgs {
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Override the configured expansion order.
    #[arg(long)]
    order: Option<usize>,
    /// Override the slow-band cutoff.
    #[arg(long)]
    cutoff: Option<f64>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct VerifyArgs {
    /// Optional JSON configuration; only its output section is read.
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    common: Common,
}

fn pool(threads: Option<usize>) -> Result<rayon::ThreadPool, CliError> {
    if threads == Some(0) {
        return Err(CliError::Config("--threads must be at least 1".into()));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads.unwrap_or(0))
        .build()
        .map_err(|e| CliError::Config(format!("thread pool: {e}")))
}

fn resolve_output(common: &Common, cfg: Option<&config::RunConfig>, default: Format) -> (Option<PathBuf>, Format) {
    let section = cfg.and_then(|c| c.output.as_ref());
    let out = common.out.clone().or_else(|| section.and_then(|o| o.path.clone()).map(PathBuf::from));
    let format = common.format.or_else(|| section.and_then(|o| o.format)).unwrap_or(default);
    (out, format)
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Expand(args) | Command::Simulate(args) | Command::Sweep(args)
            if args.order == Some(0) =>
        {
            Err(CliError::Config("--order must be at least 1".into()))
        }
        Command::Expand(args) => commands::expand(&context(args, Format::Json)?),
        Command::Simulate(args) => commands::simulate(&context(args, Format::Csv)?),
        Command::Sweep(args) => commands::sweep(&context(args, Format::Csv)?),
        Command::Verify(args) => {
            let cfg = args.config.as_deref().map(config::load).transpose()?;
            let (out, format) = resolve_output(&args.common, cfg.as_ref(), Format::Csv);
            pool(args.common.threads)?.install(|| commands::verify(out.as_deref(), format))
        }
    }
}

fn context(args: RunArgs, default: Format) -> Result<Context, CliError> {
    let config = config::load(&args.config)?;
    if let Some(c) = args.cutoff {
        if !(c.is_finite() && c >= 0.0) {
            return Err(CliError::Config(format!("--cutoff must be finite and non-negative, got {c}")));
        }
    }
    let (out, format) = resolve_output(&args.common, Some(&config), default);
    Ok(Context { pool: pool(args.common.threads)?, config, out, format, order: args.order, cutoff: args.cutoff })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("qat: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
