use std::process::ExitCode;

use dialg::cli;

fn main() -> ExitCode {
    if let Err(e) = cli::configure_threads() {
        eprintln!("dialg: {e}");
        return ExitCode::from(cli::EXIT_ERROR as u8);
    }
    ExitCode::from(cli::run(std::env::args_os()) as u8)
}
