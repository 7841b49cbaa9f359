fn main() -> std::process::ExitCode {
    mti::cli::main_with_args(std::env::args_os())
}
