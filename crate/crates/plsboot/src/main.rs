use std::io::Write;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use plsboot::{run, Cli, RunError};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let msg = e.render().to_string();
            eprintln!("{}", serde_json::json!({ "error": "config", "message": msg.trim(), "exit_code": 2 }));
            return ExitCode::from(2);
        }
    };
    let config = cli.command.into_config();
    if let Some(threads) = config.args.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
            eprintln!("{}", serde_json::json!({ "error": "config", "message": e.to_string(), "exit_code": 2 }));
            return ExitCode::from(2);
        }
    }
    match run(&config) {
        Ok(summary) => {
            // A closed stdout (e.g. piped into `head`) is not a failure of the run.
            let text = serde_json::to_string_pretty(&summary).expect("summary serializes");
            let _ = writeln!(std::io::stdout(), "{text}");
            ExitCode::SUCCESS
        }
        Err(e) => fail(&e),
    }
}

fn fail(e: &RunError) -> ExitCode {
    eprintln!("{}", e.to_json());
    ExitCode::from(e.exit_code() as u8)
}
