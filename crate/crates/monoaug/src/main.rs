use std::process::ExitCode;

fn main() -> ExitCode {
    monoaug::cli::main()
}
