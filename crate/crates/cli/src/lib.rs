//! Command-line front end: the verification ledger, singularity and
//! Thurston-Bennequin reports, the generic characteristic-field engine, and
//! the phase-portrait renderer.
//!
//! Exit codes: 0 when every requested check passes, 1 when a mathematical
//! check fails, 2 for usage or configuration errors.

pub mod analysis;
pub mod commands;
pub mod opts;
pub mod svg;

pub const EXIT_OK: i32 = 0;
pub const EXIT_MATH: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Dispatch a parsed command line; returns the process exit code.
pub fn run(cli: opts::Cli) -> i32 {
    let outcome = match cli.command {
        opts::Command::Verify(args) => commands::cmd_verify(args),
        opts::Command::Singular(args) => commands::cmd_singular(args),
        opts::Command::Tb(args) => commands::cmd_tb(args),
        opts::Command::Portrait(args) => commands::cmd_portrait(args),
        opts::Command::Engine(args) => commands::cmd_engine(args),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}", e.message);
            e.code
        }
    }
}

/// An error carrying the exit code it should produce.
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        CliError {
            code: EXIT_USAGE,
            message: msg.into(),
        }
    }

    pub fn math(msg: impl Into<String>) -> Self {
        CliError {
            code: EXIT_MATH,
            message: msg.into(),
        }
    }
}

impl From<charfol::Error> for CliError {
    fn from(e: charfol::Error) -> Self {
        match &e {
            charfol::Error::Parse { .. }
            | charfol::Error::BadRational(_)
            | charfol::Error::DimensionTooSmall(_) => CliError::usage(e.to_string()),
            _ => CliError::math(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::math(format!("i/o failure: {}", e))
    }
}
