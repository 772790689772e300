use std::process::ExitCode;

fn main() -> ExitCode {
    gavqa::cli::main_with_args(std::env::args_os())
}
