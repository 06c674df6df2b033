use std::process::ExitCode;

fn main() -> ExitCode {
    entvir::cli::main_with(std::env::args_os())
}
