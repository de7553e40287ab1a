//! Command-line front end.
//!
//! Exit codes: 0 success, 1 runtime failure, 2 usage error.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use crate::metrics::{emit_csv, Scheme};
use crate::name::ContentName;
use crate::placement::assign_resolver;
use crate::crc16::crc16;
use crate::scenario::{load_topology, run_scenario, ScenarioConfig, ScenarioId, Skew};

#[derive(Debug, Parser)]
#[command(name = "balancedn", version, about = "Hashed resolver placement vs flooding search simulator")]
struct Cli {
    /// Log every simulation event to stderr.
    #[arg(long, global = true)]
    verbose: bool,
    #[command(subcommand)]
    command: CliCommand,
}

#[derive(Debug, Subcommand)]
enum CliCommand {
    /// Run a scenario and write its CSV report.
    Run(RunArgs),
    /// Print the CRC16 and shard index of a name.
    Hash {
        #[arg(long)]
        name: String,
        #[arg(long, default_value_t = 8)]
        resolvers: usize,
    },
    /// Parse and validate a topology file or preset.
    Validate {
        #[arg(long)]
        topology: String,
    },
}

#[derive(Debug, Args)]
struct RunArgs {
    #[arg(long)]
    scenario: ScenarioId,
    /// Preset name (nsfnet, nsfnet-populated, oteglobe) or topology file path.
    #[arg(long)]
    topology: String,
    #[arg(long, default_value_t = 8)]
    resolvers: usize,
    /// Corpus size (default depends on the scenario).
    #[arg(long)]
    content: Option<usize>,
    /// Shard loads for s4, e.g. `0:650000,others:50000`.
    #[arg(long)]
    skew: Option<Skew>,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, value_delimiter = ',', default_value = "flooding,balancedn")]
    schemes: Vec<Scheme>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Clone)]
pub enum Command {
    Run(ScenarioConfig),
    Hash { name: ContentName, resolvers: usize },
    Validate { topology: String },
}

#[derive(Debug, Error)]
pub enum CliError {
    /// Help or version output requested; not a failure.
    #[error("{0}")]
    Info(String),
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Info(_) => 0,
            CliError::Runtime(_) => 1,
            CliError::Usage(_) => 2,
        }
    }
}

fn usage(cmd: &str, msg: impl std::fmt::Display) -> CliError {
    CliError::Usage(format!("error: {msg}\n\nFor more information, try 'balancedn {cmd} --help'."))
}

/// Parses a full argument vector (program name first).
pub fn parse_args<I, T>(argv: I) -> Result<Command, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv).map_err(|e| match e.kind() {
        ErrorKind::DisplayHelp | ErrorKind::DisplayVersion | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand
            if e.exit_code() == 0 =>
        {
            CliError::Info(e.to_string())
        }
        _ => CliError::Usage(e.render().to_string()),
    })?;
    match cli.command {
        CliCommand::Run(a) => {
            match (a.scenario, &a.skew) {
                (ScenarioId::S4, None) => return Err(usage("run", "scenario s4 requires --skew")),
                (s, Some(_)) if s != ScenarioId::S4 => {
                    return Err(usage("run", "--skew is only valid with --scenario s4"))
                }
                _ => {}
            }
            if a.resolvers == 0 {
                return Err(usage("run", "--resolvers must be at least 1"));
            }
            let mut schemes = Vec::new();
            for s in a.schemes {
                if !schemes.contains(&s) {
                    schemes.push(s);
                }
            }
            Ok(Command::Run(ScenarioConfig {
                scenario: a.scenario,
                topology: a.topology,
                resolver_count: a.resolvers,
                content_count: a.content,
                skew: a.skew,
                seed: a.seed,
                schemes,
                out: Some(a.out),
                verbose: cli.verbose,
            }))
        }
        CliCommand::Hash { name, resolvers } => {
            let name = ContentName::parse(&name).map_err(|e| usage("hash", format!("bad --name: {e}")))?;
            if resolvers == 0 {
                return Err(usage("hash", "--resolvers must be at least 1"));
            }
            Ok(Command::Hash { name, resolvers })
        }
        CliCommand::Validate { topology } => Ok(Command::Validate { topology }),
    }
}

/// Executes a parsed command, writing human-readable output to `out`.
pub fn execute(command: &Command, out: &mut dyn Write) -> Result<(), CliError> {
    let runtime = |e: &dyn std::fmt::Display| CliError::Runtime(format!("error: {e}"));
    match command {
        Command::Run(config) => {
            let report = run_scenario(config).map_err(|e| runtime(&e))?;
            let csv = emit_csv(&report);
            let path = config.out.as_ref().expect("run always has an output path");
            std::fs::write(path, &csv).map_err(|e| runtime(&format!("cannot write {}: {e}", path.display())))?;
            writeln!(
                out,
                "{}: {} requests, {} rows -> {}",
                config.scenario,
                report.records.len(),
                csv.lines().count() - 1,
                path.display()
            )
            .map_err(|e| runtime(&e))?;
        }
        Command::Hash { name, resolvers } => {
            let index = assign_resolver(name, *resolvers).map_err(|e| runtime(&e))?;
            writeln!(
                out,
                "{name} crc16=0x{:04X} resolver={index}",
                crc16(name.canonical_bytes())
            )
            .map_err(|e| runtime(&e))?;
        }
        Command::Validate { topology } => {
            let t = load_topology(topology).map_err(|e| runtime(&e))?;
            let roles: Vec<String> = t
                .role_counts()
                .into_iter()
                .map(|(r, n)| format!("{r}={n}"))
                .collect();
            writeln!(
                out,
                "ok: {} nodes, {} links ({})",
                t.node_count(),
                t.link_count(),
                roles.join(" ")
            )
            .map_err(|e| runtime(&e))?;
        }
    }
    Ok(())
}

/// Parses and executes; returns the process exit code.
pub fn run_cli<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let result = parse_args(argv).and_then(|c| execute(&c, out));
    match result {
        Ok(()) => 0,
        Err(CliError::Info(text)) => {
            let _ = write!(out, "{text}");
            0
        }
        Err(e) => {
            let _ = writeln!(err, "{}", e.to_string().trim_end());
            e.exit_code()
        }
    }
}
