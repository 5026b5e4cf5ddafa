//! Command-line experiment runner: parses a TOML config, applies flag and
//! environment overrides, runs one experiment and writes a results table.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Parser, Subcommand};

use config::{Config, Format};
use error::CliError;
use output::ResultWriter;

#[derive(Debug, Parser)]
#[command(
    name = "ticksim",
    version,
    about = "Clock accuracy enhancement experiments"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// TOML config, or a results file with an embedded config.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Results file; standard output when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    #[arg(long, global = true)]
    pub trials: Option<usize>,

    /// Clock dimension(s), comma separated.
    #[arg(long, global = true, value_delimiter = ',')]
    pub d: Vec<u32>,

    /// Protocol label(s) P1..P4, comma separated.
    #[arg(long, global = true, value_delimiter = ',')]
    pub protocol: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Output inaccuracy against clock dimension for several protocols.
    Sweep,
    /// Tabulate the analytic bounds; no simulation.
    Bounds,
    /// Per-output inaccuracy of a single protocol.
    Run,
    /// Cross-node spread of a broadcast clock signal.
    Network,
    /// Compare the inaccuracy estimator with its brute-force reference.
    EstimatorCheck,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Sweep => "sweep",
            Command::Bounds => "bounds",
            Command::Run => "run",
            Command::Network => "network",
            Command::EstimatorCheck => "estimator-check",
        }
    }
}

fn single<T: Copy>(flag: &str, values: &[T]) -> Result<Option<T>, CliError> {
    match values {
        [] => Ok(None),
        [x] => Ok(Some(*x)),
        _ => Err(CliError::Config(format!(
            "--{flag} takes a single value here"
        ))),
    }
}

/// Loads the config file, then applies the seed variable and the flags,
/// in increasing precedence.
pub fn resolve_config(cli: &Cli, env_seed: Option<&str>) -> Result<Config, CliError> {
    let mut cfg = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
            Config::parse(&text)
                .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?
        }
        None => Config::default(),
    };
    if let Some(s) = env_seed {
        cfg.seed = s.trim().parse().map_err(|_| {
            CliError::Config(format!(
                "{} = `{s}` is not an unsigned integer",
                config::SEED_ENV
            ))
        })?;
    }
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(t) = cli.trials {
        cfg.trials = t;
    }
    if let Some(f) = cli.format {
        cfg.format = f;
    }
    if cli.out.is_some() {
        cfg.out = cli.out.clone();
    }
    match cli.command {
        Command::Sweep => {
            if !cli.d.is_empty() {
                cfg.sweep.d = cli.d.clone();
            }
            if !cli.protocol.is_empty() {
                cfg.sweep.protocols = cli.protocol.clone();
            }
        }
        Command::Bounds => {
            if !cli.d.is_empty() {
                cfg.bounds.d = cli.d.clone();
            }
        }
        Command::Run => {
            if let Some(d) = single("d", &cli.d)? {
                cfg.run.d = d;
            }
            match cli.protocol.as_slice() {
                [] => {}
                [p] => cfg.run.protocol = p.clone(),
                _ => {
                    return Err(CliError::Config(
                        "--protocol takes a single value here".into(),
                    ))
                }
            }
        }
        Command::Network => {
            if let Some(d) = single("d", &cli.d)? {
                cfg.network.d = d;
            }
        }
        Command::EstimatorCheck => {}
    }
    Ok(cfg)
}

fn now() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

pub fn execute(cli: &Cli, env_seed: Option<&str>) -> Result<(), CliError> {
    let cfg = resolve_config(cli, env_seed)?;
    // the embedded copy must not point a re-run at the same output file
    let mut embedded = cfg.clone();
    embedded.out = None;
    let out = cfg.out.clone();
    let open: output::Opener = Box::new(move || {
        Ok(match out {
            Some(path) => Box::new(BufWriter::new(File::create(path)?)) as Box<dyn Write>,
            None => Box::new(io::stdout()),
        })
    });
    let mut w = ResultWriter::new(open, cli.command.name(), &embedded, now());
    let mismatches = match cli.command {
        Command::Sweep => commands::sweep(&cfg, &mut w).map(|_| 0),
        Command::Bounds => commands::bounds(&cfg, &mut w).map(|_| 0),
        Command::Run => commands::run(&cfg, &mut w).map(|_| 0),
        Command::Network => commands::network(&cfg, &mut w).map(|_| 0),
        Command::EstimatorCheck => commands::estimator_check(&cfg, &mut w),
    };
    let mismatches = match mismatches {
        // rejected before any simulation: write nothing
        Err(e @ CliError::Config(_)) => return Err(e),
        // keep whatever rows were produced before the error
        Err(e) => {
            let _ = w.finish();
            return Err(e);
        }
        Ok(m) => m,
    };
    w.finish()?;
    if mismatches > 0 {
        return Err(CliError::Mismatch(mismatches));
    }
    Ok(())
}

/// Entry point shared by the binary and the tests. Returns the exit code.
pub fn main_with<I, T>(args: I, env_seed: Option<&str>) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(&cli, env_seed) {
        Ok(()) => 0,
        // reader went away, as with `| head`
        Err(CliError::Io(e)) if e.kind() == io::ErrorKind::BrokenPipe => 0,
        Err(e) => {
            eprintln!("ticksim: {e}");
            e.exit_code()
        }
    }
}
