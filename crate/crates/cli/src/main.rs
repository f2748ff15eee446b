mod args;
mod commands;
mod output;

use std::io::Write;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use hanflab::presentations::default_budget;

use args::Cli;
use output::{envelope, CliError};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            if std::env::args().any(|a| a == "--json") {
                let rendered = e.render().to_string();
                let message: Vec<&str> = rendered
                    .lines()
                    .map(str::trim)
                    .take_while(|l| !l.starts_with("Usage:"))
                    .filter(|l| !l.is_empty())
                    .collect();
                let err = CliError::usage(message.join(" ").trim_start_matches("error: "));
                print!("{}", envelope("", &Err(err)));
            } else {
                let _ = e.print();
            }
            return ExitCode::from(2);
        }
    };
    if let Some(n) = cli.workers {
        if n == 0 {
            return report(&cli, Err(CliError::usage("--workers must be at least 1")));
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            return report(&cli, Err(CliError::new("workers", e.to_string())));
        }
    }
    let ctx = commands::Context {
        budget: cli.budget.unwrap_or_else(default_budget),
        seed: cli.seed,
    };
    let outcome = commands::run(&cli.command, &ctx);
    report(&cli, outcome)
}

fn report(cli: &Cli, outcome: Result<output::Outcome, CliError>) -> ExitCode {
    let name = cli.command.name();
    let doc = envelope(name, &outcome);
    if let Some(path) = &cli.output {
        if let Err(e) = std::fs::write(path, &doc) {
            eprintln!("error: {}: {e}", path.display());
            return ExitCode::from(2);
        }
    }
    let mut out = std::io::stdout().lock();
    let code = match &outcome {
        Ok(o) => o.exit_code(),
        Err(e) => e.exit,
    };
    if cli.json {
        let _ = out.write_all(doc.as_bytes());
    } else {
        match &outcome {
            Ok(o) => {
                let _ = writeln!(out, "{}", o.text);
            }
            Err(e) => eprintln!("error[{}]: {}", e.code, e.message),
        }
    }
    ExitCode::from(code as u8)
}
