//! Command-line front end: argument grammar, report envelopes, CSV/JSON
//! serialization and SVG plots.

pub mod angle;
pub mod commands;
pub mod config;
pub mod error;
pub mod plot;
pub mod report;

use std::ffi::OsString;
use std::io::Write;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::error::ErrorKind;
use clap::Parser;

use crate::config::Cli;
use crate::error::CliError;
use crate::report::{serialize, ReportEnvelope, RunConfig, TOOL_VERSION};

pub const THREADS_ENV: &str = "QWALK_THREADS";

fn check_writable(path: &Path) -> Result<(), CliError> {
    let parent = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    if parent.is_dir() {
        Ok(())
    } else {
        Err(CliError::Io { path: path.display().to_string(), reason: "parent directory does not exist".into() })
    }
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(|e| CliError::Io { path: path.display().to_string(), reason: e.to_string() })
}

fn execute(cli: Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), CliError> {
    let command = cli.command;
    let output = command.output().clone();
    for p in output.out.iter().chain(command.plot()) {
        check_writable(p)?;
    }
    let outcome = commands::execute(&command)?;
    for line in &outcome.summary {
        let _ = writeln!(stderr, "{line}");
    }
    let timestamp = cli.timestamp.then(|| {
        let secs = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
        format!("unix:{secs}")
    });
    let plot_path = command.plot().cloned();
    let envelope = ReportEnvelope {
        tool_version: TOOL_VERSION.to_string(),
        timestamp,
        config: RunConfig::new(command),
        payload: outcome.payload,
    };
    let text = serialize(&envelope, output.resolved_format());
    match &output.out {
        Some(path) => write_file(path, &text)?,
        None => stdout
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Io { path: "standard output".into(), reason: e.to_string() })?,
    }
    if let (Some(path), Some(svg)) = (plot_path, outcome.plot) {
        write_file(&path, &svg)?;
    }
    match outcome.deferred_error {
        Some(e) => Err(e),
        None => Ok(()),
    }
}

/// Parse `args` (program name first), run, and return the exit status.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{e}");
                    0
                }
                _ => {
                    let _ = write!(stderr, "{e}");
                    1
                }
            };
            return code;
        }
    };
    match execute(cli, stdout, stderr) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}
