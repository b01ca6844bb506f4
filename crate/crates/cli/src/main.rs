use std::process::ExitCode;

use clap::Parser;
use frobrep_cli::{render, run, Cli};
use frobrep_core::Error;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    if let Some(limit) = cli.scope_limit {
        std::env::set_var("FROBREP_SCOPE_LIMIT", limit.to_string());
    }
    match run(&cli) {
        Ok(report) => {
            let text = render(&report, cli.format);
            match &cli.output {
                Some(path) => {
                    if let Err(e) = std::fs::write(path, text) {
                        eprintln!("frobrep: cannot write {}: {e}", path.display());
                        return ExitCode::from(2);
                    }
                }
                None => print!("{text}"),
            }
            if report.passed {
                ExitCode::SUCCESS
            } else {
                eprintln!("frobrep: assertions failed; see the report");
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("frobrep: {e}");
            ExitCode::from(if matches!(e, Error::Internal(_)) { 3 } else { 2 })
        }
    }
}
