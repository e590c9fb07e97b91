#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod args;
mod config;
mod run;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};

/// Usage errors exit with status 2, runtime failures with status 1.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Runtime(String),
}

impl From<auditory_rf::Error> for CliError {
    fn from(e: auditory_rf::Error) -> Self {
        match e {
            auditory_rf::Error::InvalidParameter(_) => CliError::Usage(e.to_string()),
            other => CliError::Runtime(other.to_string()),
        }
    }
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Spectrogram { wav, opts, common } => {
            let file = config::load(common.config.as_deref())?;
            run::spectrogram(&wav, &config::overlay(&file.spectrogram, &opts)?)
        }
        Command::Features {
            wav,
            opts,
            features,
            common,
        } => {
            let file = config::load(common.config.as_deref())?;
            let opts = config::overlay(&file.spectrogram, &opts)?;
            let features = config::overlay(&file.features, &features)?;
            run::features(&wav, &opts, &features)
        }
        Command::Analyze { table, csv } => run::analyze(table, csv),
        Command::Kernels { opts, common } => {
            let file = config::load(common.config.as_deref())?;
            run::kernels(&config::overlay(&file.kernels, &opts)?)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
