use std::process::ExitCode;

use clap::Parser;
use jalg_cli::{render, run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command, &cli.config) {
        Ok(out) => {
            if let Some(path) = &cli.config.out {
                if let Err(e) = std::fs::write(path, render(&out.report)) {
                    eprintln!("error: {}: {e}", path.display());
                    return ExitCode::from(2);
                }
            }
            if cli.config.json {
                print!("{}", render(&out.report));
            } else {
                print!("{}", out.summary);
            }
            ExitCode::from(out.exit_code())
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
