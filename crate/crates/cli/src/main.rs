//! `vra`: command-line front-end of the visual realism assessment toolkit.
//!
//! Failures print one JSON object `{"error": {"kind", "message", "hint"}}`
//! on stderr and exit nonzero (2 for usage and config errors, 1 otherwise).

mod args;
mod commands;
mod config;
mod error;

use clap::error::ErrorKind;
use clap::Parser;

use crate::args::Cli;
use crate::config::Config;
use crate::error::{CliError, Result};

fn run() -> Result<()> {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            e.exit();
        }
        Err(e) => return Err(CliError::Usage(e.render().to_string().trim().to_string())),
    };
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    env_logger::Builder::new().filter_level(level).parse_default_env().init();
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            return Err(CliError::config("--jobs must be at least 1", "omit --jobs to use every core"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(|e| CliError::config(e.to_string(), "set --jobs once per process"))?;
    }
    let cfg = Config::load(cli.config.as_deref())?;
    commands::run(cli.command, &cfg)
}

fn main() {
    if let Err(e) = run() {
        eprintln!("{}", e.to_json());
        std::process::exit(e.exit_code());
    }
}
