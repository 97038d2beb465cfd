mod args;
mod commands;
mod report;

use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;

use args::Cli;
use commands::{emit, run, Failure, Outcome};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let started = Instant::now();
    let result = run(&cli.command, &cli.output).and_then(|outcome| match outcome {
        Outcome::Report(r) => emit(&r, cli.output.format, cli.output.output.as_deref()).map(|_| 0),
        Outcome::Failed(r) => emit(&r, cli.output.format, cli.output.output.as_deref()).map(|_| 1),
        Outcome::Done => Ok(0),
    });
    if cli.output.timing {
        eprintln!("wall time: {:.3} s", started.elapsed().as_secs_f64());
    }
    match result {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}\n\nFor usage, run 'qptg --help'.");
            ExitCode::from(2)
        }
        Err(Failure::Compute(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
