//! The `ramanujan-cloud` command line. [`run`] parses arguments, loads the
//! config and dispatches; it returns the process exit status.
//!
//! Exit status: 0 on success, 1 on bad input or an unwritable output, 2 when
//! `--strict` is set and a verdict is inconclusive (for `reproduce-all`,
//! when any criterion does not pass).

pub mod args;
pub mod commands;
pub mod reproduce;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::Parser;

use ramanujan_core::Config;

pub use args::Cli;

pub const CONFIG_ENV: &str = "RAMANUJAN_CLOUD_CONFIG";

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_INCONCLUSIVE: i32 = 2;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] ramanujan_core::Error),
    #[error("config: {0}")]
    Config(String),
    #[error("output: {0}")]
    Output(String),
}

/// Reads a config file; unknown keys are rejected.
pub fn load_config(path: &Path) -> Result<Config, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let config: Config = serde_json::from_str(&text)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    config
        .validate()
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    Ok(config)
}

fn resolve_config(flag: Option<PathBuf>) -> Result<Config, CliError> {
    let path = flag.or_else(|| std::env::var_os(CONFIG_ENV).map(PathBuf::from));
    match path {
        Some(p) => load_config(&p),
        None => Ok(Config::default()),
    }
}

/// Runs one command line, writing results to `out` and diagnostics to
/// `err`.
pub fn run_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{e}");
                    EXIT_INPUT
                }
            };
        }
    };
    let result = resolve_config(cli.config)
        .and_then(|config| commands::execute(cli.command, &config, out));
    match result {
        Ok(commands::Outcome::Done) => EXIT_OK,
        Ok(commands::Outcome::Unsettled) if cli.strict => EXIT_INCONCLUSIVE,
        Ok(commands::Outcome::Unsettled) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_INPUT
        }
    }
}

pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_with(argv, &mut std::io::stdout().lock(), &mut std::io::stderr().lock())
}
