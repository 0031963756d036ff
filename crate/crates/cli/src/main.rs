use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use powerbin::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(out) => {
            let mut stdout = std::io::stdout().lock();
            if stdout.write_all(out.stdout.as_bytes()).and_then(|_| stdout.flush()).is_err() {
                return ExitCode::from(5);
            }
            ExitCode::from(out.code)
        }
        Err(e) => {
            eprintln!("powerbin: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
