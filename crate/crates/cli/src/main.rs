use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use tailfence_cli::{error_kind, run, Cli};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            report("usage", &e.render().to_string());
            return ExitCode::from(2);
        }
    };
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    match run(cli, &mut lock) {
        Ok(code) => {
            let _ = lock.flush();
            ExitCode::from(code as u8)
        }
        Err(e) => {
            let _ = lock.flush();
            report(error_kind(&e), &format!("{e:#}"));
            ExitCode::FAILURE
        }
    }
}

/// One JSON object per line on stderr.
fn report(kind: &str, message: &str) {
    let line = serde_json::json!({ "error": kind, "message": message.trim_end() });
    eprintln!("{line}");
}
