//! The `sel` command line tool.
//!
//! Exit codes: 0 success, 1 violated hypothesis, 2 numerical failure,
//! 64 usage or output format error.

use std::io::Write;
use std::path::Path;

use clap::error::ErrorKind;
use clap::Parser;
use sel_core::Error;

pub mod args;
mod commands;
pub mod config;

use args::Cli;

pub const EXIT_OK: i32 = 0;
pub const EXIT_DOMAIN: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;
pub const EXIT_USAGE: i32 = 64;

/// Failure of one invocation, mapped to an exit code.
#[derive(Debug)]
pub enum Failure {
    Core(Error),
    Usage(String),
    /// A numerical stage finished without an answer; the message is printed as is.
    NoResult(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Core(Error::Domain(_)) => EXIT_DOMAIN,
            Failure::Core(Error::Format(_)) | Failure::Usage(_) => EXIT_USAGE,
            Failure::Core(_) | Failure::NoResult(_) => EXIT_NUMERICAL,
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Core(e) => e.to_string(),
            Failure::Usage(m) | Failure::NoResult(m) => m.clone(),
        }
    }
}

pub(crate) fn write_to(path: Option<&Path>, bytes: &[u8], stdout: &mut dyn Write) -> Result<(), Failure> {
    match path {
        Some(p) => std::fs::write(p, bytes).map_err(|e| Failure::Usage(format!("cannot write '{}': {e}", p.display()))),
        None => stdout
            .write_all(bytes)
            .map_err(|e| Failure::Usage(format!("cannot write to standard output: {e}"))),
    }
}

fn init_logging() {
    let level = match std::env::var("SEL_LOG").as_deref() {
        Ok("debug") => log::LevelFilter::Debug,
        Ok("info") => log::LevelFilter::Info,
        Ok("quiet") => log::LevelFilter::Off,
        _ => log::LevelFilter::Warn,
    };
    // A second call (tests run many invocations in one process) is harmless.
    let _ = env_logger::Builder::new().filter_level(level).format_timestamp(None).try_init();
}

/// Runs one invocation; `argv[0]` is the program name.
pub fn run<I, S>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    init_logging();
    let argv: Vec<String> = argv.into_iter().map(Into::into).collect();
    let argv = match config::merge(argv) {
        Ok(a) => a,
        Err(msg) => {
            let _ = writeln!(stderr, "error: {msg}");
            return EXIT_USAGE;
        }
    };
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{}", e.render());
                    EXIT_OK
                }
                _ => {
                    let _ = write!(stderr, "{}", e.render());
                    EXIT_USAGE
                }
            };
        }
    };
    match commands::dispatch(cli.command, stdout, stderr) {
        Ok(()) => EXIT_OK,
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message());
            f.exit_code()
        }
    }
}
