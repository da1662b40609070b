use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(torreg::cli::run(std::env::args()) as u8)
}
