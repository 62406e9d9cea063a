mod args;
mod commands;
mod output;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};
use commands::Output;

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let out = Output {
        json: cli.json,
        path: cli.out,
    };
    let result = match &cli.command {
        Command::Sieve(a) => commands::sieve(a, &out),
        Command::Density(a) => commands::density(a, &out),
        Command::Tuples(c) => commands::tuples(c, &out),
        Command::Slide(a) => commands::run_slide(a, &out),
        Command::Bounds(a) => commands::bounds(a, &out),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            if !f.message.is_empty() {
                eprintln!("error: {}", f.message);
            }
            ExitCode::from(f.code)
        }
    }
}
