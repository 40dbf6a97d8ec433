mod args;
mod commands;
mod input;
mod report;

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command, Output};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Core(#[from] smvbs::Error),
}

fn run(cli: &Cli) -> Result<(String, bool), CliError> {
    let pick = |o: Option<Output>| o.unwrap_or(Output::Json);
    let (report, converged, output) = match &cli.command {
        Command::Simulate(a) => {
            let (csv, report) = commands::simulate(a)?;
            return Ok(match a.common.output {
                Some(Output::Json) => (report.render(Output::Json), true),
                _ => (csv, true),
            });
        }
        Command::Fit(a) => {
            let (r, ok) = commands::fit(a)?;
            (r, ok, pick(a.common.output))
        }
        Command::TestLambda(a) => {
            let (r, ok) = commands::test_lambda(a)?;
            (r, ok, pick(a.common.output))
        }
        Command::Compare(a) => {
            let (r, ok) = commands::compare(a)?;
            (r, ok, pick(a.common.output))
        }
        Command::Gof(a) => {
            let (r, ok) = commands::gof(a)?;
            (r, ok, pick(a.common.output))
        }
        Command::Info(a) => {
            let (r, ok) = commands::info(a)?;
            (r, ok, pick(a.common.output))
        }
        Command::Corr(a) => {
            let (r, ok) = commands::corr(a)?;
            (r, ok, pick(a.common.output))
        }
    };
    Ok((report.render(output), converged))
}

fn main() -> ExitCode {
    // usage errors exit with 1 like any other input error
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok((text, converged)) => {
            let mut out = std::io::stdout().lock();
            if out
                .write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .is_err()
            {
                return ExitCode::from(1);
            }
            if converged {
                ExitCode::SUCCESS
            } else {
                eprintln!("error: optimizer did not converge; the report shows the last iterate");
                ExitCode::from(2)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
