use std::io::{ErrorKind, Write};
use std::process::ExitCode;

use clap::Parser;
use gleason_lab::report::{run, RunConfig, EXIT_INPUT};

fn main() -> ExitCode {
    let cfg = RunConfig::parse();
    let outcome = run(&cfg);
    let written = match &cfg.output {
        Some(path) if outcome.code != EXIT_INPUT => std::fs::write(path, &outcome.text),
        _ => {
            if outcome.code == EXIT_INPUT {
                eprint!("{}", outcome.text);
                Ok(())
            } else {
                match std::io::stdout().lock().write_all(outcome.text.as_bytes()) {
                    Err(e) if e.kind() == ErrorKind::BrokenPipe => Ok(()),
                    r => r,
                }
            }
        }
    };
    if let Err(e) = written {
        eprintln!("error: cannot write report: {e}");
        return ExitCode::from(EXIT_INPUT as u8);
    }
    ExitCode::from(outcome.code as u8)
}
