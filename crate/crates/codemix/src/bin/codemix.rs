use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(codemix::cli::run(std::env::args_os()))
}
