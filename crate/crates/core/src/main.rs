use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(fastgm::cli::run(std::env::args_os()))
}
