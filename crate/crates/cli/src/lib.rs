//! Command line front end: documents, verification reports and SVG output.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::Parser;

pub mod checks;
pub mod commands;
pub mod document;
pub mod render;

pub use commands::Cli;
pub use document::{Kind, TilingDocument};

/// Exit statuses.
pub mod exit {
    pub const SUCCESS: i32 = 0;
    pub const VERIFICATION_FAILED: i32 = 1;
    pub const USAGE: i32 = 2;
    pub const GENERATION_FAILED: i32 = 3;
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{}: {source}", path.display())]
    Document {
        path: PathBuf,
        #[source]
        source: document::DocumentError,
    },
    #[error("{} ({})", .0, .0.name())]
    Generation(#[from] fairtile::Error),
    #[error("verification failed\n{report}")]
    ChecksFailed { report: String, generation: bool },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Io { .. } | CliError::Document { .. } => exit::USAGE,
            CliError::Generation(_) => exit::GENERATION_FAILED,
            CliError::ChecksFailed { generation: true, .. } => exit::GENERATION_FAILED,
            CliError::ChecksFailed { generation: false, .. } => exit::VERIFICATION_FAILED,
        }
    }
}

/// Parses `args` (including the program name), runs the command and
/// returns the exit status. Messages go to stderr.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { exit::USAGE } else { exit::SUCCESS };
        }
    };
    match commands::execute(&cli) {
        Ok(()) => exit::SUCCESS,
        Err(e) => {
            match &e {
                CliError::ChecksFailed { generation: false, .. } => {}
                e => eprintln!("error: {e}"),
            }
            e.exit_code()
        }
    }
}

/// Applies `FAIRTILE_THREADS` to the global worker pool.
pub fn configure_threads() -> Result<(), CliError> {
    let Some(v) = std::env::var_os("FAIRTILE_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .to_str()
        .and_then(|s| s.trim().parse().ok())
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Usage(format!("FAIRTILE_THREADS={v:?} is not a positive integer")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Usage(format!("cannot set up {n} threads: {e}")))
}
