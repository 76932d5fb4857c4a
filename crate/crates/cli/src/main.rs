use std::path::PathBuf;
use std::process::ExitCode;

use amo_cli::config::Command;
use amo_cli::{CliError, RunConfig};
use clap::Parser;

/// Almost Mathieu operator laboratory.
///
/// Every run writes summary.json (with the exact configuration that produced
/// it) and CSV tables to the output directory. Exit status: 0 success,
/// 2 refuted certificate, 1 error.
#[derive(Parser, Debug)]
#[command(name = "amo", version)]
struct Cli {
    /// Run the configuration stored in a JSON file (a RunConfig, or the
    /// `config` object of a previous summary).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads; defaults to AMO_WORKERS, then the core count.
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[arg(long, global = true, default_value = "amo-out")]
    out: PathBuf,
    /// double | extended | big-float:<bits>
    #[arg(long, global = true, default_value = "double")]
    precision: String,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Option<Command>,
}

fn load_config(path: &PathBuf) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let value: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| CliError::ConfigInvalid { field: "config".into(), message: format!("{}: {e}", path.display()) })?;
    let value = match value.get("config") {
        Some(inner) if value.get("status").is_some() => inner.clone(),
        _ => value,
    };
    serde_json::from_value(value)
        .map_err(|e| CliError::ConfigInvalid { field: "config".into(), message: e.to_string() })
}

fn workers(flag: Option<usize>) -> Result<Option<usize>, CliError> {
    let n = match flag {
        Some(n) => Some(n),
        None => match std::env::var("AMO_WORKERS") {
            Ok(v) => Some(v.trim().parse().map_err(|_| CliError::ConfigInvalid {
                field: "AMO_WORKERS".into(),
                message: format!("not a count: `{v}`"),
            })?),
            Err(_) => None,
        },
    };
    if n == Some(0) {
        return Err(CliError::ConfigInvalid { field: "workers".into(), message: "must be positive".into() });
    }
    Ok(n)
}

fn main_inner(cli: Cli) -> Result<u8, CliError> {
    let config = match (&cli.config, cli.command) {
        (Some(path), _) => load_config(path)?,
        (None, Some(command)) => RunConfig { command, out: cli.out, precision: cli.precision, seed: cli.seed },
        (None, None) => {
            return Err(CliError::ConfigInvalid {
                field: "command".into(),
                message: "no subcommand or --config given".into(),
            })
        }
    };
    if let Some(n) = workers(cli.workers)? {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| CliError::Io(e.to_string()))?;
    }
    let status = amo_cli::run(&config)?;
    Ok(status.exit_code())
}

fn main() -> ExitCode {
    // clap's own failure status is 2, which this tool reserves for refutations
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match main_inner(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
